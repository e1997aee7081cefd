"""Degree-n real section spaces: Gram matrices, orthonormal bases, sampling.

Real global sections of the n-th power of the hyperplane bundle are real
homogeneous polynomials of degree n in (x, y, z).  The weighted L^2 product
of two monomials is computed by quadrature of m_j conj(m_k) e^{-2n phi} dV;
the orthonormal basis is the inverse-transpose Cholesky factor of the Gram
matrix (the fixed convention: non-Gaussian coefficient laws depend on this
choice, so an eigenvector-based alternative is kept for basis-dependence
experiments).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .geometry import (
    IllConditionedError,
    ProjectivePoint,
    QuadratureRule,
    Weight,
    build_quadrature,
)

__all__ = [
    "MonomialBasis",
    "OrthonormalBasis",
    "SectionSample",
    "dimension",
    "default_order",
    "gram_matrix",
    "orthonormalize",
    "build_orthonormal_basis",
    "sample_section",
    "evaluate_section",
    "section_norm",
    "monomial_coefficients",
    "export_gram",
    "load_gram",
]

CONDITION_LIMIT = 1e12


def dimension(n: int) -> int:
    """Number of degree-n monomials in three variables, (n+1)(n+2)/2."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    return (n + 1) * (n + 2) // 2


def default_order(n: int) -> int:
    """Default quadrature order 2n + 8: exact for the degree-2n Gram
    integrand with margin for smooth weight corrections."""
    return 2 * n + 8


@dataclass(frozen=True)
class MonomialBasis:
    """Exponent triples (a, b, c) with a + b + c = n, in ascending lex order."""

    n: int
    exponents: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError("degree must be >= 1")
        exps = sorted(
            (a, b, n - a - b) for a in range(n + 1) for b in range(n + 1 - a)
        )
        object.__setattr__(self, "exponents", np.array(exps, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.exponents.shape[0]

    def evaluate(self, Z: np.ndarray) -> np.ndarray:
        """Monomial values at homogeneous coordinate rows; shape (dim, N)."""
        Z = np.asarray(Z, dtype=complex)
        squeeze = Z.ndim == 1
        if squeeze:
            Z = Z[None, :]
        n = self.n
        pows = [np.ones((n + 1, Z.shape[0]), dtype=complex) for _ in range(3)]
        for c in range(3):
            for k in range(1, n + 1):
                pows[c][k] = pows[c][k - 1] * Z[:, c]
        a, b, cc = self.exponents.T
        V = pows[0][a] * pows[1][b] * pows[2][cc]
        return V[:, 0] if squeeze else V


def gram_matrix(basis: MonomialBasis, w: Weight, rule: QuadratureRule) -> np.ndarray:
    """Pairwise weighted L^2 products of the monomials.

    Requires rule exactness order >= 2n.  Raises IllConditionedError when
    the result fails a Cholesky factorization, which indicates quadrature
    under-resolution rather than genuine degeneracy.
    """
    n = basis.n
    if rule.order < 2 * n:
        raise ValueError(f"quadrature order {rule.order} < 2n = {2 * n}")
    V = basis.evaluate(rule.hom)
    damp = np.exp(-2.0 * n * w.psi(rule.hom))
    X = V * np.sqrt(rule.weights * damp)[None, :]
    G = (X @ X.conj().T).real
    G = 0.5 * (G + G.T)
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(
            "Gram matrix lost positive definiteness; increase quadrature order"
        ) from exc
    return G


def orthonormalize(G: np.ndarray, method: str = "cholesky") -> np.ndarray:
    """Transform B with B^T G B = I.

    ``cholesky`` (the canonical convention) returns the inverse transpose
    of the lower Cholesky factor; ``eigen`` returns the symmetric inverse
    square root.  Fails when the condition estimate exceeds 1e12.
    """
    G = np.asarray(G, dtype=float)
    if not np.allclose(G, G.T, atol=1e-12 * max(1.0, np.abs(G).max())):
        raise ValueError("Gram matrix must be symmetric")
    cond = float(np.linalg.cond(G))
    if cond > CONDITION_LIMIT:
        raise IllConditionedError(f"Gram condition estimate {cond:.3e} exceeds 1e12")
    if method == "cholesky":
        L = np.linalg.cholesky(G)
        B = scipy.linalg.solve_triangular(L, np.eye(G.shape[0]), lower=True).T
    elif method == "eigen":
        lam, Q = np.linalg.eigh(G)
        if lam.min() <= 0:
            raise IllConditionedError("Gram matrix is not positive definite")
        B = Q @ np.diag(1.0 / np.sqrt(lam)) @ Q.T
    else:
        raise ValueError(f"unknown method {method!r}")
    return B


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal basis data for degree n under a weight and quadrature rule.

    Column j of ``transform`` holds the monomial coefficients of the j-th
    basis section.
    """

    n: int
    basis: MonomialBasis
    gram: np.ndarray
    transform: np.ndarray
    weight: Weight
    rule: QuadratureRule
    method: str = "cholesky"

    @property
    def dim(self) -> int:
        return self.basis.dim

    def with_orthogonal_mix(self, Q: np.ndarray) -> "OrthonormalBasis":
        """Replace B by B Q for an orthogonal Q (still orthonormal)."""
        Q = np.asarray(Q, dtype=float)
        if not np.allclose(Q @ Q.T, np.eye(Q.shape[0]), atol=1e-10):
            raise ValueError("Q must be orthogonal")
        return replace(self, transform=self.transform @ Q, method=self.method + "+mix")


def build_orthonormal_basis(
    n: int,
    weight: Weight,
    rule: QuadratureRule | None = None,
    order: int | None = None,
    method: str = "cholesky",
) -> OrthonormalBasis:
    if rule is None:
        rule = build_quadrature(order if order else default_order(n))
    basis = MonomialBasis(n)
    G = gram_matrix(basis, weight, rule)
    B = orthonormalize(G, method=method)
    return OrthonormalBasis(n=n, basis=basis, gram=G, transform=B, weight=weight, rule=rule, method=method)


@dataclass(frozen=True)
class SectionSample:
    """Random section: coefficient vector in the orthonormal basis plus
    provenance; identical (sampler, seed, trial) reproduces it bit for bit."""

    n: int
    coeffs: np.ndarray
    sampler_id: str
    seed: int
    trial: int
    warnings: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)


def sample_section(onb: OrthonormalBasis, sampler, seed: int, trial: int) -> SectionSample:
    """Draw d_n i.i.d. coefficients from ``sampler`` on the (seed, trial) stream."""
    c = sampler.sample(onb.dim, seed=seed, stream=trial)
    warnings = ()
    if not getattr(sampler, "absolutely_continuous", True):
        warnings = ("sampler law is not absolutely continuous; zero loci may be singular",)
    return SectionSample(
        n=onb.n, coeffs=c, sampler_id=sampler.kind, seed=seed, trial=trial, warnings=warnings
    )


def monomial_coefficients(s: SectionSample, onb: OrthonormalBasis) -> np.ndarray:
    """Coefficients of the sample in the monomial basis (lex order)."""
    if s.n != onb.n:
        raise ValueError("sample and basis degrees differ")
    return onb.transform @ s.coeffs


def evaluate_section(s: SectionSample, onb: OrthonormalBasis, p: ProjectivePoint):
    """Chart value of the section at p and its pointwise h-tensor-n norm.

    The chart value depends on p's chart; the h-norm
    |s(Z)| / |Z|^n e^{-n psi} is chart independent.  The value is real at
    real points.
    """
    mc = monomial_coefficients(s, onb)
    vals = onb.basis.evaluate(p.coords)
    hom_val = complex(np.dot(mc, vals))
    norm = float(np.linalg.norm(p.coords))
    psi = float(onb.weight.psi(p.coords))
    hnorm = abs(hom_val) / norm**onb.n * math.exp(-onb.n * psi)
    value = hom_val.real if p.is_real() else hom_val
    return value, hnorm


def _hnorm_sq_at_nodes(mc: np.ndarray, onb: OrthonormalBasis) -> np.ndarray:
    V = onb.basis.evaluate(onb.rule.hom)
    vals = mc @ V
    damp = np.exp(-2.0 * onb.n * onb.weight.psi(onb.rule.hom))
    return (vals.real**2 + vals.imag**2) * damp


def section_norm(s: SectionSample, onb: OrthonormalBasis, rule: QuadratureRule | None = None) -> float:
    """Quadrature value of the squared h-norm; equals sum c_j^2 (Parseval)."""
    if rule is None or rule is onb.rule:
        mc = monomial_coefficients(s, onb)
        return float(np.dot(onb.rule.weights, _hnorm_sq_at_nodes(mc, onb)))
    mc = monomial_coefficients(s, onb)
    V = onb.basis.evaluate(rule.hom)
    vals = mc @ V
    damp = np.exp(-2.0 * onb.n * onb.weight.psi(rule.hom))
    return float(np.dot(rule.weights, (vals.real**2 + vals.imag**2) * damp))


# ---------------------------------------------------------------------------
# text export for cross-implementation comparison


def export_gram(onb: OrthonormalBasis, fh) -> None:
    """Write degree, weight, exponent list and the Gram matrix as text,
    row-major, 17 significant digits."""
    close = False
    if isinstance(fh, (str, bytes)):
        fh = open(fh, "w", encoding="utf-8")
        close = True
    try:
        fh.write("harnack-lab gram v1\n")
        fh.write(f"degree {onb.n}\n")
        fh.write(f"weight {onb.weight.spec_string()}\n")
        fh.write(f"dimension {onb.dim}\n")
        fh.write("exponents\n")
        for a, b, c in onb.basis.exponents:
            fh.write(f"{a} {b} {c}\n")
        fh.write("matrix\n")
        for row in onb.gram:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
        fh.write("end\n")
    finally:
        if close:
            fh.close()


def load_gram(fh):
    """Read the text format back; returns (degree, weight_spec, exponents, G)."""
    close = False
    if isinstance(fh, (str, bytes)):
        fh = open(fh, "r", encoding="utf-8")
        close = True
    try:
        lines = [ln.strip() for ln in fh]
    finally:
        if close:
            fh.close()
    if not lines or lines[0] != "harnack-lab gram v1":
        raise ValueError("not a gram export file")
    n = int(lines[1].split()[1])
    weight_spec = lines[2].split(None, 1)[1]
    dim = int(lines[3].split()[1])
    if lines[4] != "exponents":
        raise ValueError("malformed gram file")
    exps = np.array([[int(t) for t in lines[5 + i].split()] for i in range(dim)])
    if lines[5 + dim] != "matrix":
        raise ValueError("malformed gram file")
    G = np.array(
        [[float(t) for t in lines[6 + dim + i].split()] for i in range(dim)]
    )
    return n, weight_spec, exps, G


def export_gram_string(onb: OrthonormalBasis) -> str:
    buf = io.StringIO()
    export_gram(onb, buf)
    return buf.getvalue()
