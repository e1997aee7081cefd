"""Charts of the projective plane, weights on the hyperplane bundle, and quadrature.

The projective plane is covered by the three affine charts where one
homogeneous coordinate is scaled to 1.  A metric weight is represented as
the Fubini-Study local weight plus a globally defined, chart-independent
correction, so chart-transition consistency holds by construction and is
still validated by tests.

Integration over P^2 uses the probability volume form of the Fubini-Study
metric.  Writing a point as (sqrt(t1) e^{i a} : sqrt(t2) e^{i b} : sqrt(t3)),
that volume form is the uniform probability measure on the simplex
{t1 + t2 + t3 = 1, t >= 0} times the uniform measure on the two angles.
The quadrature is therefore a Gauss-Legendre rule on the simplex (through
the Duffy map) crossed with trapezoidal angular grids; it is exact for
monomial integrands up to the stated order, including the phase
cancellations that make distinct monomials orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProjectivePoint",
    "Weight",
    "QuadratureRule",
    "BudgetExceededError",
    "IllConditionedError",
    "fs_weight",
    "curvature_positive",
    "perturbed_weight",
    "build_quadrature",
    "integrate",
    "curvature_density",
    "curvature_density_at_nodes",
    "fs_monomial_integral",
    "fs_distance",
]


class BudgetExceededError(RuntimeError):
    """A requested computation exceeds its configured resource budget."""


class IllConditionedError(RuntimeError):
    """A numerical result failed its internal consistency check."""


# ---------------------------------------------------------------------------
# points


class ProjectivePoint:
    """A point of P^2, normalized so the max-modulus coordinate equals 1.

    ``chart`` records which coordinate was scaled to 1 (0 for x, 1 for y,
    2 for z).  Ties are broken toward the lowest index so normalization is
    deterministic.
    """

    __slots__ = ("coords", "chart")

    def __init__(self, x: complex, y: complex, z: complex):
        raw = np.array([x, y, z], dtype=complex)
        mods = np.abs(raw)
        if not np.all(np.isfinite(mods)) or np.max(mods) == 0.0:
            raise ValueError("homogeneous coordinates must be finite and not all zero")
        chart = int(np.argmax(mods > (1.0 - 1e-14) * mods.max()))
        self.coords = raw / raw[chart]
        self.chart = chart

    @classmethod
    def from_array(cls, zs) -> "ProjectivePoint":
        zs = np.asarray(zs, dtype=complex)
        return cls(zs[0], zs[1], zs[2])

    def affine(self, chart: int | None = None) -> tuple[complex, complex]:
        """Affine coordinates (u, v) in ``chart`` (the remaining two coords).

        Raises ValueError when the point is not visible in that chart.
        """
        if chart is None:
            chart = self.chart
        zc = self.coords[chart]
        if zc == 0:
            raise ValueError(f"point not visible in chart {chart}")
        others = [i for i in range(3) if i != chart]
        return (self.coords[others[0]] / zc, self.coords[others[1]] / zc)

    def conjugate(self) -> "ProjectivePoint":
        return ProjectivePoint(*np.conj(self.coords))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coords.imag)) <= tol)

    def __repr__(self) -> str:  # pragma: no cover
        x, y, z = self.coords
        return f"ProjectivePoint({x:.6g}, {y:.6g}, {z:.6g}; chart={self.chart})"


def _embed_chart(chart: int, u, v):
    """Homogeneous coordinates of the chart point (u, v), vectorized."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    one = np.ones_like(u)
    cols = {0: (one, u, v), 1: (u, one, v), 2: (u, v, one)}[chart]
    return np.stack(cols, axis=-1)


def fs_distance(p, q) -> float:
    """Fubini-Study distance, arccos of the normalized pairing modulus."""
    zp = p.coords if isinstance(p, ProjectivePoint) else np.asarray(p, dtype=complex)
    zq = q.coords if isinstance(q, ProjectivePoint) else np.asarray(q, dtype=complex)
    num = np.abs(np.sum(zp * np.conj(zq), axis=-1))
    den = np.linalg.norm(zp, axis=-1) * np.linalg.norm(zq, axis=-1)
    return np.arccos(np.clip(num / den, 0.0, 1.0))


def _fs_distance_many(Z: np.ndarray, center: np.ndarray) -> np.ndarray:
    num = np.abs(Z @ np.conj(center))
    den = np.linalg.norm(Z, axis=-1) * np.linalg.norm(center)
    return np.arccos(np.clip(num / den, 0.0, 1.0))


def _smooth_bump(r: np.ndarray) -> np.ndarray:
    """Compactly supported bump (1 - r^2)^8 on |r| < 1, zero outside.

    C^7 contact at the support boundary; infinitely flat profiles stall
    the spectral quadrature, this one keeps it converging fast while the
    weight stays far above the C^2 regularity the theory needs.
    """
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    ri = r[inside]
    out[inside] = (1.0 - ri * ri) ** 8
    return out


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class Weight:
    """A C^2 metric weight on the hyperplane bundle over P^2.

    ``local_weight_chart(chart, u, v)`` returns the local weight with
    respect to the standard frame of the chart; on chart overlaps two
    evaluations differ by log of the coordinate ratio.  All supported kinds
    are the Fubini-Study weight plus a global correction ``psi``:

    - ``fubini-study``: psi = 0 (curvature positive everywhere).
    - ``perturbed``: psi = amplitude * bump(dist(p, center)/radius), a
      compactly supported bump that makes curvature negative somewhere once
      the amplitude is large enough.
    - ``toric-radial``: psi = -amplitude * exp(-((l - center)/width)^2)
      with l = (1/2) log((|x|^2+|y|^2)/|z|^2), a torus-invariant dip used
      by the envelope experiments.
    """

    kind: str
    params: tuple = ()
    _center: np.ndarray | None = field(default=None, repr=False, compare=False)

    @staticmethod
    def fubini_study() -> "Weight":
        return Weight("fubini-study")

    @staticmethod
    def perturbed(amplitude: float, center=(1.0, 1.0, 1.0), radius: float = 0.6) -> "Weight":
        if amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if radius <= 0:
            raise ValueError("bump radius must be > 0")
        c = np.asarray(center, dtype=float)
        if np.max(np.abs(c)) == 0:
            raise ValueError("bump center must be a valid projective point")
        params = (float(amplitude), float(c[0]), float(c[1]), float(c[2]), float(radius))
        return Weight("perturbed", params, _center=c.astype(complex))

    @staticmethod
    def toric_radial(amplitude: float, center_log: float = 0.0, width: float = 0.8) -> "Weight":
        if width <= 0:
            raise ValueError("width must be > 0")
        return Weight("toric-radial", (float(amplitude), float(center_log), float(width)))

    @staticmethod
    def from_spec(spec: str) -> "Weight":
        """Parse 'fubini-study', 'perturbed:amp,cx,cy,cz,radius' or
        'toric-radial:amp,center,width'."""
        kind, _, rest = spec.partition(":")
        kind = kind.strip()
        vals = [float(s) for s in rest.split(",") if s.strip()] if rest else []
        if kind == "fubini-study":
            if vals:
                raise ValueError("fubini-study takes no parameters")
            return Weight.fubini_study()
        if kind == "perturbed":
            if len(vals) != 5:
                raise ValueError("perturbed expects amp,cx,cy,cz,radius")
            return Weight.perturbed(vals[0], vals[1:4], vals[4])
        if kind == "toric-radial":
            if len(vals) != 3:
                raise ValueError("toric-radial expects amp,center,width")
            return Weight.toric_radial(*vals)
        raise ValueError(f"unknown weight kind {kind!r}")

    def spec_string(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(repr(p) for p in self.params)

    # -- evaluation

    def psi(self, Z: np.ndarray) -> np.ndarray:
        """Global (chart-independent) part, vectorized over rows of Z."""
        Z = np.asarray(Z, dtype=complex)
        squeeze = Z.ndim == 1
        if squeeze:
            Z = Z[None, :]
        if self.kind == "fubini-study":
            out = np.zeros(Z.shape[0])
        elif self.kind == "perturbed":
            amp, radius = self.params[0], self.params[4]
            center = self._center
            if center is None:
                center = np.asarray(self.params[1:4], dtype=complex)
            r = _fs_distance_many(Z, center) / radius
            out = amp * _smooth_bump(r)
        elif self.kind == "toric-radial":
            amp, c0, width = self.params
            rho2 = np.abs(Z[:, 0]) ** 2 + np.abs(Z[:, 1]) ** 2
            z2 = np.abs(Z[:, 2]) ** 2
            with np.errstate(divide="ignore"):
                ell = 0.5 * (np.log(rho2) - np.log(z2))
            out = np.zeros(Z.shape[0])
            finite = np.isfinite(ell)
            out[finite] = -amp * np.exp(-(((ell[finite] - c0) / width) ** 2))
        else:  # pragma: no cover
            raise ValueError(f"unknown weight kind {self.kind!r}")
        return out[0] if squeeze else out

    def local_weight_chart(self, chart: int, u, v) -> np.ndarray:
        """Local weight in the given chart, vectorized over (u, v)."""
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        base = 0.5 * np.log1p(np.abs(u) ** 2 + np.abs(v) ** 2)
        if self.kind == "fubini-study":
            return base
        return base + self.psi(_embed_chart(chart, u, v))

    def local_weight(self, p: ProjectivePoint, chart: int | None = None) -> float:
        if chart is None:
            chart = p.chart
        u, v = p.affine(chart)
        return float(self.local_weight_chart(chart, u, v))

    def is_conjugation_symmetric(self) -> bool:
        """All built-in kinds define real metrics (phi(conj p) = phi(p))."""
        if self.kind == "perturbed":
            c = self._center
            if c is None:
                c = np.asarray(self.params[1:4], dtype=complex)
            return bool(np.max(np.abs(np.asarray(c).imag)) == 0.0)
        return True


def fs_weight(p: ProjectivePoint) -> float:
    """Fubini-Study local weight (1/2) log(1 + |u|^2 + |v|^2) in p's chart."""
    u, v = p.affine()
    return 0.5 * math.log1p(abs(u) ** 2 + abs(v) ** 2)


def perturbed_weight(p: ProjectivePoint, amplitude: float, bump_center, bump_radius: float) -> float:
    """Fubini-Study weight plus a compactly supported bump at ``bump_center``."""
    w = Weight.perturbed(amplitude, np.asarray(bump_center, dtype=float), bump_radius)
    return w.local_weight(p)


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights realizing the Fubini-Study probability volume form.

    ``hom`` holds unit-norm homogeneous coordinates, one node per row; the
    weights are positive and sum to 1.  ``order`` is the largest total
    degree for which monomial integrands |x|^2a |y|^2b |z|^2c / |Z|^2n with
    n = a+b+c <= order are integrated exactly (phase factors of mixed
    monomial pairs up to that degree integrate to exact zeros as well).
    """

    order: int
    hom: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.weights.shape[0]

    def point(self, i: int) -> ProjectivePoint:
        return ProjectivePoint.from_array(self.hom[i])

    def points(self):
        for i in range(len(self)):
            yield self.point(i)


def build_quadrature(order: int, max_nodes: int = 2_000_000) -> QuadratureRule:
    """Simplex x torus product rule exact through the given order.

    Raises BudgetExceededError when the node count would exceed ``max_nodes``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    k = order // 2 + 2  # Gauss-Legendre points per simplex direction
    n_ang = order + 1  # trapezoidal points per angle
    total = (k * k) * (n_ang * n_ang)
    if total > max_nodes:
        raise BudgetExceededError(
            f"order {order} needs {total} nodes, over the budget of {max_nodes}"
        )

    # Duffy map of the unit square onto {t1 >= 0, t2 >= 0, t1 + t2 <= 1}:
    # t1 = xi, t2 = (1 - xi) eta, with Jacobian (1 - xi); the uniform
    # probability density on the simplex is 2.
    x01, w01 = np.polynomial.legendre.leggauss(k)
    xi = 0.5 * (x01 + 1.0)
    wxi = 0.5 * w01
    XI, ETA = np.meshgrid(xi, xi, indexing="ij")
    WXI, WETA = np.meshgrid(wxi, wxi, indexing="ij")
    t1 = XI.ravel()
    t2 = ((1.0 - XI) * ETA).ravel()
    t3 = 1.0 - t1 - t2
    wt = (2.0 * WXI * WETA * (1.0 - XI)).ravel()

    ang = 2.0 * np.pi * np.arange(n_ang) / n_ang
    ea = np.exp(1j * ang)

    # node array: simplex block x (alpha, beta) angular grid
    sq1 = np.sqrt(t1)[:, None, None] * ea[None, :, None]
    sq2 = np.sqrt(t2)[:, None, None] * ea[None, None, :]
    sq3 = np.sqrt(np.clip(t3, 0.0, None))[:, None, None] * np.ones((1, n_ang, n_ang))
    hom = np.stack(
        [
            np.broadcast_to(sq1, (t1.size, n_ang, n_ang)).ravel(),
            np.broadcast_to(sq2, (t1.size, n_ang, n_ang)).ravel(),
            sq3.ravel(),
        ],
        axis=-1,
    )
    weights = np.repeat(wt / (n_ang * n_ang), n_ang * n_ang)
    weights = weights / weights.sum()
    return QuadratureRule(order=order, hom=hom, weights=weights)


def integrate(rule: QuadratureRule, f) -> float:
    """Integrate f against the rule; f is a callable on points or a node array.

    Non-finite values at nodes are a diagnostic failure and raise
    ValueError rather than polluting the sum.
    """
    if callable(f):
        vals = f(rule.hom)
    else:
        vals = np.asarray(f, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.shape != rule.weights.shape:
        raise ValueError("integrand values must match the node count")
    bad = ~np.isfinite(vals)
    if bad.any():
        raise ValueError(f"integrand non-finite at {int(bad.sum())} of {len(rule)} nodes")
    return float(np.dot(rule.weights, vals))


def fs_monomial_integral(a: int, b: int, c: int) -> float:
    """Closed form of int |x|^2a |y|^2b |z|^2c / |Z|^2(a+b+c) dV on P^2.

    Equals 2 a! b! c! / (a+b+c+2)! by the simplex moment formula.
    """
    n = a + b + c
    return 2.0 * math.factorial(a) * math.factorial(b) * math.factorial(c) / math.factorial(n + 2)


# ---------------------------------------------------------------------------
# curvature


def _hessian_data_chart(w: Weight, chart: int, u0: complex, v0: complex, step: float):
    """(det, trace) of the complex Hessian of the chart weight by central
    differences.  det > 0 and trace > 0 together certify positive
    definiteness for the 2x2 Hermitian Hessian."""

    def f(d1, d2, d3, d4):
        return w.local_weight_chart(chart, u0 + complex(d1, d2), v0 + complex(d3, d4))

    h = step
    f0 = f(0.0, 0.0, 0.0, 0.0)

    def second(axis):
        dp = [0.0] * 4
        dp[axis] = h
        dm = [0.0] * 4
        dm[axis] = -h
        return (f(*dp) + f(*dm) - 2.0 * f0) / (h * h)

    def mixed(ax1, ax2):
        d = [0.0] * 4

        def g(s1, s2):
            d2 = list(d)
            d2[ax1] = s1 * h
            d2[ax2] = s2 * h
            return f(*d2)

        return (g(1, 1) - g(1, -1) - g(-1, 1) + g(-1, -1)) / (4.0 * h * h)

    f11, f22, f33, f44 = (second(i) for i in range(4))
    f13, f24 = mixed(0, 2), mixed(1, 3)
    f14, f23 = mixed(0, 3), mixed(1, 2)

    huu = 0.25 * (f11 + f22)
    hvv = 0.25 * (f33 + f44)
    huv = 0.25 * complex(f13 + f24, f14 - f23)
    return float(huu * hvv - abs(huv) ** 2), float(huu + hvv)


def curvature_density(w: Weight, p: ProjectivePoint, step: float = 1e-4, check: bool = True) -> float:
    """Density of the squared curvature form against dV, normalized so the
    Fubini-Study weight gives exactly 1 everywhere (total curvature mass 1).

    Computed as 4 det(complex Hessian of the chart weight) (1+|u|^2+|v|^2)^3
    with central finite differences at the given step.  With ``check`` a
    step-halving consistency test raises IllConditionedError on disagreement.
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    chart = p.chart
    u0, v0 = p.affine(chart)
    det1, _tr = _hessian_data_chart(w, chart, u0, v0, step)
    scale = (1.0 + abs(u0) ** 2 + abs(v0) ** 2) ** 3
    val = 4.0 * det1 * scale
    if check:
        det2, _tr2 = _hessian_data_chart(w, chart, u0, v0, 0.5 * step)
        val2 = 4.0 * det2 * scale
        if abs(val - val2) > 1e-3 * max(1.0, abs(val2)):
            raise IllConditionedError(
                f"curvature finite differences disagree under step halving: {val} vs {val2}"
            )
    return val


def curvature_positive(w: Weight, p: ProjectivePoint, step: float = 1e-4) -> bool:
    """Whether the curvature form is positive definite at p (det and trace
    of the complex Hessian both positive)."""
    chart = p.chart
    u0, v0 = p.affine(chart)
    det, tr = _hessian_data_chart(w, chart, u0, v0, step)
    return det > 0.0 and tr > 0.0


def curvature_density_at_nodes(w: Weight, Z: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Vectorized curvature density at unit-norm homogeneous rows of Z.

    Each node is evaluated in its max-modulus chart through the same
    central-difference stencil as ``curvature_density`` (no halving check).
    """
    Z = np.asarray(Z, dtype=complex)
    out = np.empty(Z.shape[0])
    charts = np.argmax(np.abs(Z), axis=1)
    h = step
    for chart in range(3):
        sel = np.where(charts == chart)[0]
        if sel.size == 0:
            continue
        zc = Z[sel, chart]
        others = [i for i in range(3) if i != chart]
        u0 = Z[sel, others[0]] / zc
        v0 = Z[sel, others[1]] / zc

        def f(d1, d2, d3, d4):
            return w.local_weight_chart(chart, u0 + complex(d1, d2), v0 + complex(d3, d4))

        f0 = f(0.0, 0.0, 0.0, 0.0)
        sec = []
        for axis in range(4):
            dp = [0.0] * 4
            dp[axis] = h
            dm = [0.0] * 4
            dm[axis] = -h
            sec.append((f(*dp) + f(*dm) - 2.0 * f0) / (h * h))

        def mixed(ax1, ax2):
            def g(s1, s2):
                d = [0.0] * 4
                d[ax1] = s1 * h
                d[ax2] = s2 * h
                return f(*d)

            return (g(1, 1) - g(1, -1) - g(-1, 1) + g(-1, -1)) / (4.0 * h * h)

        huu = 0.25 * (sec[0] + sec[1])
        hvv = 0.25 * (sec[2] + sec[3])
        re = mixed(0, 2) + mixed(1, 3)
        im = mixed(0, 3) - mixed(1, 2)
        det = huu * hvv - 0.0625 * (re * re + im * im)
        scale = (1.0 + np.abs(u0) ** 2 + np.abs(v0) ** 2) ** 3
        out[sel] = 4.0 * det * scale
    return out
