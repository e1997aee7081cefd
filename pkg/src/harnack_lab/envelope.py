"""Equilibrium envelopes of toric-radial weights on one-dimensional slices.

For torus-invariant weights, plurisubharmonicity reduces to convexity in
logarithmic coordinates, and the bundle's growth constrains slopes to
[0, 1] along the symmetry slices used here.  The upper envelope of
dominated admissible weights is then the largest convex minorant with
slopes in [0, 1], computed per slice as the supremum of admissible affine
minorants over the exact finite candidate-slope set (pairwise difference
quotients clipped to the slope window).  The test suite checks it against
an independent Graham-scan construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import ProjectivePoint, Weight, curvature_density

__all__ = [
    "EnvelopeSlice",
    "EnvelopeGrid",
    "constrained_convex_minorant",
    "equilibrium_envelope_toric",
    "toric_slice_profile",
    "build_envelope_grid",
    "equilibrium_support",
    "slice_point",
]

SLOPE_MIN = 0.0
SLOPE_MAX = 1.0
_EDGE_TOL = 1e-9
CONTACT_TOL = 1e-10


@dataclass(frozen=True)
class EnvelopeSlice:
    """One symmetry slice: log coordinates, profile values and (after the
    envelope op) envelope values with the contact mask."""

    slice_id: str
    xs: np.ndarray
    profile: np.ndarray
    envelope: np.ndarray | None = None
    contact: np.ndarray | None = None

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        if xs.ndim != 1 or xs.size < 3:
            raise ValueError("a slice needs at least 3 grid points")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "profile", np.asarray(self.profile, dtype=float))
        if self.profile.shape != xs.shape:
            raise ValueError("profile and grid shapes differ")


@dataclass(frozen=True)
class EnvelopeGrid:
    slices: tuple

    def is_computed(self) -> bool:
        return all(s.envelope is not None for s in self.slices)


def constrained_convex_minorant(
    xs: np.ndarray, vals: np.ndarray, slope_min: float = SLOPE_MIN, slope_max: float = SLOPE_MAX
) -> np.ndarray:
    """Largest convex minorant with slopes in [slope_min, slope_max].

    Equals sup over admissible slopes a of the affine minorant
    a x + min_i(vals_i - a x_i); the supremum over the continuous slope
    window is attained on the finite set of pairwise difference quotients
    plus the window endpoints, so the computation is exact.
    """
    xs = np.asarray(xs, dtype=float)
    vals = np.asarray(vals, dtype=float)
    n = xs.size
    dx = xs[None, :] - xs[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        pair = (vals[None, :] - vals[:, None]) / dx
    cand = pair[np.triu_indices(n, k=1)]
    cand = cand[(cand > slope_min) & (cand < slope_max)]
    slopes = np.concatenate([[slope_min, slope_max], np.unique(cand)])
    # intercept per slope, then pointwise max of the affine family
    c = np.min(vals[None, :] - slopes[:, None] * xs[None, :], axis=1)
    env = np.max(slopes[:, None] * xs[None, :] + c[:, None], axis=0)
    return np.minimum(env, vals)


def equilibrium_envelope_toric(grid: EnvelopeGrid) -> EnvelopeGrid:
    """Envelope of every slice; rejects profiles whose boundary slopes sit
    outside the growth window [0, 1] (such data cannot come from a weight
    of the fixed bundle restricted to the window)."""
    out = []
    for s in grid.slices:
        left = (s.profile[1] - s.profile[0]) / (s.xs[1] - s.xs[0])
        right = (s.profile[-1] - s.profile[-2]) / (s.xs[-1] - s.xs[-2])
        for name, sl in (("left", left), ("right", right)):
            if sl < SLOPE_MIN - _EDGE_TOL or sl > SLOPE_MAX + _EDGE_TOL:
                raise ValueError(
                    f"slice {s.slice_id!r}: {name} boundary slope {sl:.6g} outside [0, 1]"
                )
        env = constrained_convex_minorant(s.xs, s.profile)
        contact = np.abs(env - s.profile) <= CONTACT_TOL
        out.append(replace(s, envelope=env, contact=contact))
    return EnvelopeGrid(slices=tuple(out))


# ---------------------------------------------------------------------------
# slices of toric-radial weights


def slice_point(slice_id: str, x: float) -> ProjectivePoint:
    """Projective point of a slice coordinate.

    'diagonal' is (e^x : e^x : 1); 'axis' is (e^x : 1 : 1).  Large |x| is
    normalized by ProjectivePoint, so the whole window is usable.
    """
    ex = math.exp(x)
    if slice_id == "diagonal":
        return ProjectivePoint(ex, ex, 1.0)
    if slice_id == "axis":
        return ProjectivePoint(ex, 1.0, 1.0)
    raise ValueError(f"unknown slice {slice_id!r}")


def toric_slice_profile(w: Weight, slice_id: str, xs: np.ndarray) -> EnvelopeSlice:
    """Sample the weight along a symmetry slice in chart coordinates of the
    z = 1 chart (the chart is fixed, so the profile is a genuine function)."""
    xs = np.asarray(xs, dtype=float)
    ex = np.exp(xs)
    if slice_id == "diagonal":
        vals = w.local_weight_chart(2, ex, ex)
    elif slice_id == "axis":
        vals = w.local_weight_chart(2, ex, np.ones_like(ex))
    else:
        raise ValueError(f"unknown slice {slice_id!r}")
    return EnvelopeSlice(slice_id=slice_id, xs=xs, profile=np.asarray(vals, dtype=float))


def build_envelope_grid(
    w: Weight, window=(-4.0, 4.0), num: int = 161, slices=("diagonal", "axis")
) -> EnvelopeGrid:
    xs = np.linspace(window[0], window[1], num)
    return EnvelopeGrid(slices=tuple(toric_slice_profile(w, s, xs) for s in slices))


def equilibrium_support(w: Weight, grid: EnvelopeGrid, step: float = 1e-4):
    """Classify grid nodes: 1 = contact and positive curvature, 2 = contact
    only, 3 = outside the contact set.  The support estimate is the first
    class together with its grid neighbors (a discrete closure)."""
    if not grid.is_computed():
        raise ValueError("run equilibrium_envelope_toric first")
    out = []
    for s in grid.slices:
        classes = np.full(s.xs.size, 3, dtype=int)
        for idx in range(s.xs.size):
            if not s.contact[idx]:
                continue
            p = slice_point(s.slice_id, float(s.xs[idx]))
            dens = curvature_density(w, p, step=step, check=False)
            classes[idx] = 1 if dens > 0 else 2
        core = classes == 1
        support = core.copy()
        support[:-1] |= core[1:]
        support[1:] |= core[:-1]
        out.append({"slice_id": s.slice_id, "classes": classes, "support": support})
    return out
