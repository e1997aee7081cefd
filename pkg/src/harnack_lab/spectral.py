"""Bergman function, Toeplitz matrices, and mass functionals.

Everything here is relative to the discrete inner product realized by an
orthonormal basis' quadrature rule, so the structural identities (total
Bergman mass equal to the dimension, trace identity, operator-norm bound)
hold to roundoff by construction; the quadrature exactness tests in the
geometry module pin that inner product to the true one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import (
    OrthonormalBasis,
    SectionSample,
    build_orthonormal_basis,
    dimension,
    monomial_coefficients,
)
from .geometry import ProjectivePoint, QuadratureRule, Weight, _smooth_bump, _fs_distance_many

__all__ = [
    "bergman_at",
    "bergman_function",
    "density_check",
    "bergman_density_profile",
    "ToeplitzMatrix",
    "toeplitz_matrix",
    "toeplitz_hs_growth",
    "mass_functional",
    "mass_quadratic_form",
    "test_functions",
]


def bergman_at(onb: OrthonormalBasis, Z: np.ndarray) -> np.ndarray:
    """Bergman function (sum of squared basis h-norms) at homogeneous rows."""
    Z = np.asarray(Z, dtype=complex)
    squeeze = Z.ndim == 1
    if squeeze:
        Z = Z[None, :]
    V = onb.basis.evaluate(Z)
    W = onb.transform.T @ V
    norms2 = np.sum(W.real**2 + W.imag**2, axis=0)
    scale = np.sum(Z.real**2 + Z.imag**2, axis=1)
    damp = np.exp(-2.0 * onb.n * onb.weight.psi(Z))
    out = norms2 / scale**onb.n * damp
    return float(out[0]) if squeeze else out


def bergman_function(onb: OrthonormalBasis, p: ProjectivePoint) -> float:
    return float(bergman_at(onb, p.coords))


def density_check(onb: OrthonormalBasis, rule: QuadratureRule | None = None) -> float:
    """Integral of the Bergman function; the dimensional density identity
    makes it equal d_n.

    With an explicit ``rule`` the integral is evaluated off the basis' own
    rule, which probes quadrature resolution instead of the identity.
    """
    r = rule if rule is not None else onb.rule
    vals = bergman_at(onb, r.hom)
    return float(np.dot(r.weights, vals))


def bergman_density_profile(onb: OrthonormalBasis, Z: np.ndarray) -> np.ndarray:
    """n^{-2} k_n at the given points (the density whose large-n limit is
    the equilibrium density on the positively curved contact region)."""
    return bergman_at(onb, Z) / onb.n**2


@dataclass(frozen=True)
class ToeplitzMatrix:
    """Compression of multiplication by a test function to the section space."""

    phi_id: str
    T: np.ndarray
    sup_abs_phi: float

    @property
    def trace(self) -> float:
        return float(np.trace(self.T))

    @property
    def op_norm(self) -> float:
        return float(np.linalg.norm(self.T, 2))

    @property
    def hs_norm(self) -> float:
        return float(np.sqrt(np.sum(self.T * self.T)))


def toeplitz_matrix(
    onb: OrthonormalBasis, phi, rule: QuadratureRule | None = None, phi_id: str = "phi"
) -> ToeplitzMatrix:
    """T_jk = int phi <S_j, S_k>_h dV over the given (default: basis) rule."""
    r = rule if rule is not None else onb.rule
    pv = np.asarray(phi(r.hom), dtype=float)
    if pv.shape != r.weights.shape:
        raise ValueError("test function must return one value per node")
    V = onb.basis.evaluate(r.hom)
    W = onb.transform.T @ V
    scale = np.sum(r.hom.real**2 + r.hom.imag**2, axis=1)
    damp = np.exp(-2.0 * onb.n * onb.weight.psi(r.hom)) / scale**onb.n
    X = W * np.sqrt(r.weights * damp)[None, :]
    phase = pv  # real test functions only
    T = np.einsum("jk,k,lk->jl", X.conj(), phase, X, optimize=True).real
    T = 0.5 * (T + T.T)
    return ToeplitzMatrix(phi_id=phi_id, T=T, sup_abs_phi=float(np.abs(pv).max()))


def toeplitz_hs_growth(weight: Weight, phi, n_list, phi_id: str = "phi", order=None):
    """Table of squared Hilbert-Schmidt norm over dimension across degrees."""
    rows = []
    for n in n_list:
        onb = build_orthonormal_basis(n, weight, order=order)
        tm = toeplitz_matrix(onb, phi, phi_id=phi_id)
        d = dimension(n)
        rows.append(
            {
                "n": n,
                "dim": d,
                "hs_sq": tm.hs_norm**2,
                "ratio": tm.hs_norm**2 / d,
                "trace": tm.trace,
                "op_norm": tm.op_norm,
            }
        )
    ratios = [r["ratio"] for r in rows]
    return {"rows": rows, "max_ratio": max(ratios), "min_ratio": min(ratios), "phi": phi_id}


def mass_functional(
    s: SectionSample, onb: OrthonormalBasis, phi, rule: QuadratureRule | None = None
) -> float:
    """(1/d_n) int phi |s|^2_h dV by quadrature."""
    r = rule if rule is not None else onb.rule
    pv = np.asarray(phi(r.hom), dtype=float)
    mc = monomial_coefficients(s, onb)
    V = onb.basis.evaluate(r.hom)
    vals = mc @ V
    scale = np.sum(r.hom.real**2 + r.hom.imag**2, axis=1)
    damp = np.exp(-2.0 * onb.n * onb.weight.psi(r.hom)) / scale**onb.n
    h2 = (vals.real**2 + vals.imag**2) * damp
    return float(np.dot(r.weights, pv * h2)) / onb.dim


def mass_quadratic_form(s: SectionSample, tm: ToeplitzMatrix) -> float:
    """The same functional as c^T T c / d, the quadratic-form route."""
    c = s.coeffs
    return float(c @ tm.T @ c) / tm.T.shape[0]


def test_functions(weight: Weight | None = None) -> dict:
    """The fixed test-function dictionary used across mass, Toeplitz and
    concentration experiments: a constant, a polar cap bump, and a bump
    aligned with the weight's perturbation center (center (1:1:1) for
    weights without one)."""
    center = np.array([1.0, 1.0, 1.0], dtype=complex)
    if weight is not None and weight.kind == "perturbed":
        center = np.asarray(weight.params[1:4], dtype=complex)
    cap_center = np.array([0.0, 0.0, 1.0], dtype=complex)

    def one(Z):
        Z = np.asarray(Z)
        return np.ones(Z.shape[0] if Z.ndim > 1 else 1)

    def cap(Z):
        return _smooth_bump(_fs_distance_many(np.atleast_2d(Z), cap_center) / 0.9)

    def aligned(Z):
        return _smooth_bump(_fs_distance_many(np.atleast_2d(Z), center) / 0.7)

    return {"one": one, "cap": cap, "aligned": aligned}
