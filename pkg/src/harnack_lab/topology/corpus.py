"""Classical plane curves with known real component counts.

The corpus spans empty conics through maximal quartics (plus a quintic),
with expected counts fixed by classical results and double-checked by the
grid oracle in the test suite.  Quartics built by perturbing products of
conics carry bump sizes small enough to keep the perturbation regime
(both were validated against the oracle before being frozen here).
"""

from __future__ import annotations

import numpy as np

from ..ensemble import MonomialBasis

__all__ = ["classical_corpus", "poly_to_coeffs", "poly_mul", "rotate_coefficients"]


def poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (a1, b1, c1), v1 in p.items():
        for (a2, b2, c2), v2 in q.items():
            k = (a1 + a2, b1 + b2, c1 + c2)
            out[k] = out.get(k, 0.0) + v1 * v2
    return out


def poly_to_coeffs(n: int, poly: dict) -> np.ndarray:
    """Monomial coefficient vector in the lex order of MonomialBasis."""
    basis = MonomialBasis(n)
    index = {tuple(e): k for k, e in enumerate(map(tuple, basis.exponents))}
    out = np.zeros(basis.dim)
    for key, val in poly.items():
        if sum(key) != n:
            raise ValueError(f"monomial {key} does not have degree {n}")
        out[index[key]] += val
    return out


def rotate_coefficients(n: int, coeffs: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Coefficients of s(R v) for a linear coordinate change R of 3-space.

    Used by the rotation-invariance checks: an orthogonal R maps the zero
    set by a homeomorphism of the projective plane, so component counts
    must match.
    """
    basis = MonomialBasis(n)
    R = np.asarray(R, dtype=float)
    rows = [
        {(1, 0, 0): R[i, 0], (0, 1, 0): R[i, 1], (0, 0, 1): R[i, 2]} for i in range(3)
    ]
    out: dict = {}
    for coef, (a, b, c) in zip(coeffs, basis.exponents):
        if coef == 0.0:
            continue
        term = {(0, 0, 0): float(coef)}
        for row, e in zip(rows, (a, b, c)):
            for _ in range(int(e)):
                term = poly_mul(term, row)
        for key, val in term.items():
            out[key] = out.get(key, 0.0) + val
    return poly_to_coeffs(n, out)


def _ellipse_pair_plus(eps: float) -> dict:
    f1 = {(2, 0, 0): 1.0, (0, 2, 0): 2.0, (0, 0, 2): -1.0}
    f2 = {(2, 0, 0): 2.0, (0, 2, 0): 1.0, (0, 0, 2): -1.0}
    out = poly_mul(f1, f2)
    out[(0, 0, 4)] = out.get((0, 0, 4), 0.0) + eps
    return out


def _circle_pair_plus(eps: float) -> dict:
    f1 = {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -1.0}
    f2 = {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -4.0}
    out = poly_mul(f1, f2)
    out[(0, 0, 4)] = out.get((0, 0, 4), 0.0) + eps
    return out


def classical_corpus():
    """List of (name, degree, monomial coefficient vector, expected b0)."""
    entries = [
        ("line-x", 1, {(1, 0, 0): 1.0}, 1),
        ("line-z", 1, {(0, 0, 1): 1.0}, 1),
        ("empty-conic", 2, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0}, 0),
        ("circle", 2, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -1.0}, 1),
        ("ellipse", 2, {(2, 0, 0): 1.0, (0, 2, 0): 4.0, (0, 0, 2): -2.0}, 1),
        # y^2 z = x^3 - x z^2: oval plus pseudoline, the maximal cubic
        ("maximal-cubic", 3, {(0, 2, 1): 1.0, (3, 0, 0): -1.0, (1, 0, 2): 1.0}, 2),
        # y^2 z = x^3 + x z^2: single branch
        ("one-branch-cubic", 3, {(0, 2, 1): 1.0, (3, 0, 0): -1.0, (1, 0, 2): -1.0}, 1),
        ("fermat-cubic", 3, {(3, 0, 0): 1.0, (0, 3, 0): 1.0, (0, 0, 3): 1.0}, 1),
        ("empty-quartic", 4, {(4, 0, 0): 1.0, (0, 4, 0): 1.0, (0, 0, 4): 1.0}, 0),
        ("fermat-quartic", 4, {(4, 0, 0): 1.0, (0, 4, 0): 1.0, (0, 0, 4): -1.0}, 1),
        ("four-oval-quartic", 4, _ellipse_pair_plus(0.05), 4),
        ("nested-oval-quartic", 4, _circle_pair_plus(0.1), 2),
        ("two-oval-quartic", 4, _ellipse_pair_plus(-0.05), 2),
        ("fermat-quintic", 5, {(5, 0, 0): 1.0, (0, 5, 0): 1.0, (0, 0, 5): 1.0}, 1),
    ]
    out = []
    for name, n, poly, b0 in entries:
        out.append((name, n, poly_to_coeffs(n, poly), b0))
    return out
