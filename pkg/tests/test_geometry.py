import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harnack_lab.geometry import (
    BudgetExceededError,
    IllConditionedError,
    ProjectivePoint,
    Weight,
    build_quadrature,
    curvature_density,
    curvature_density_at_nodes,
    curvature_positive,
    fs_monomial_integral,
    fs_weight,
    integrate,
    perturbed_weight,
)
from conftest import FS, PERTURBED


def sympy_monomial_integral(a, b, c):
    """Independent symbolic oracle: the simplex moment of t1^a t2^b t3^c
    against the uniform probability measure (density 2) on the 2-simplex."""
    import sympy

    t1, t2 = sympy.symbols("t1 t2", nonnegative=True)
    f = t1**a * t2**b * (1 - t1 - t2) ** c
    inner = sympy.integrate(f, (t2, 0, 1 - t1))
    return float(2 * sympy.integrate(inner, (t1, 0, 1)))


# ---------------------------------------------------------------------------
# points


def test_point_normalizes_max_modulus_to_one():
    p = ProjectivePoint(3.0, -1.0, 2.0)
    assert p.chart == 0
    assert p.coords[0] == 1.0
    assert np.abs(p.coords).max() == 1.0


def test_point_rejects_zero_and_nonfinite():
    with pytest.raises(ValueError):
        ProjectivePoint(0, 0, 0)
    with pytest.raises(ValueError):
        ProjectivePoint(float("nan"), 1, 0)


@given(
    st.tuples(
        *[st.floats(min_value=-5, max_value=5, allow_nan=False) for _ in range(6)]
    ),
    st.floats(min_value=0.1, max_value=10),
)
@settings(max_examples=50, deadline=None)
def test_point_rescaling_agrees(vals, lam):
    x = complex(vals[0], vals[1])
    y = complex(vals[2], vals[3])
    z = complex(vals[4], vals[5])
    if max(abs(x), abs(y), abs(z)) < 1e-3:
        return
    p = ProjectivePoint(x, y, z)
    q = ProjectivePoint(lam * x, lam * y, lam * z)
    assert np.abs(p.coords - q.coords).max() <= 1e-12 * np.abs(p.coords).max()


# ---------------------------------------------------------------------------
# weights


def test_fs_weight_examples():
    p = ProjectivePoint(0.0, 0.0, 1.0)
    assert fs_weight(p) == 0.0
    p2 = ProjectivePoint(1.0, 0.0, 1.0)
    assert abs(fs_weight(p2) - 0.5 * math.log(2)) < 1e-15


def test_fs_weight_chart_transition_is_log_ratio():
    p = ProjectivePoint(0.7 + 0.1j, -0.4 + 0.3j, 0.9)
    f0 = FS.local_weight(p, chart=0)
    f2 = FS.local_weight(p, chart=2)
    expected = math.log(abs(p.coords[2] / p.coords[0]))
    assert abs((f0 - f2) - expected) < 1e-12


@pytest.mark.parametrize("w", [FS, PERTURBED, Weight.toric_radial(0.3, 0.0, 0.8)])
def test_chart_transition_consistency_all_weights(w, rng):
    for _ in range(20):
        coords = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        p = ProjectivePoint(*coords)
        charts = [c for c in range(3) if abs(p.coords[c]) > 1e-6]
        for c1 in charts:
            for c2 in charts:
                lhs = w.local_weight(p, chart=c1) - w.local_weight(p, chart=c2)
                rhs = math.log(abs(p.coords[c2] / p.coords[c1]))
                assert abs(lhs - rhs) < 1e-10


def test_perturbed_weight_zero_amplitude_is_fs(rng):
    for _ in range(10):
        coords = rng.standard_normal(3)
        p = ProjectivePoint(*coords)
        assert perturbed_weight(p, 0.0, (1, 1, 1), 0.5) == pytest.approx(
            fs_weight(p), abs=1e-15
        )


def test_weight_spec_round_trip():
    for w in (FS, PERTURBED, Weight.toric_radial(0.25, -0.5, 1.2)):
        again = Weight.from_spec(w.spec_string())
        assert again.kind == w.kind
        assert again.params == w.params
    with pytest.raises(ValueError):
        Weight.from_spec("banana")
    with pytest.raises(ValueError):
        Weight.from_spec("perturbed:1.0")


# ---------------------------------------------------------------------------
# quadrature


def test_quadrature_weights_sum_to_one():
    for order in (2, 5, 12):
        rule = build_quadrature(order)
        assert abs(rule.weights.sum() - 1.0) < 1e-10
        assert (rule.weights > 0).all()


def test_quadrature_exactness_against_symbolic_oracle():
    rule = build_quadrature(6)
    for a, b, c in [(0, 0, 0), (1, 0, 0), (2, 1, 1), (3, 2, 1), (2, 2, 2)]:
        f = (
            np.abs(rule.hom[:, 0]) ** (2 * a)
            * np.abs(rule.hom[:, 1]) ** (2 * b)
            * np.abs(rule.hom[:, 2]) ** (2 * c)
        )
        got = integrate(rule, f)
        oracle = sympy_monomial_integral(a, b, c)
        assert abs(got - oracle) < 1e-8
        assert abs(fs_monomial_integral(a, b, c) - oracle) < 1e-14


def test_quadrature_exactness_high_order():
    rule = build_quadrature(16)
    for a, b, c in [(8, 4, 4), (10, 3, 3), (16, 0, 0), (6, 5, 5)]:
        f = (
            np.abs(rule.hom[:, 0]) ** (2 * a)
            * np.abs(rule.hom[:, 1]) ** (2 * b)
            * np.abs(rule.hom[:, 2]) ** (2 * c)
        )
        assert abs(integrate(rule, f) - fs_monomial_integral(a, b, c)) < 1e-8


def test_quadrature_self_convergence():
    # the smooth (bump) component of a weight: spectral accuracy
    r1 = build_quadrature(16)
    r2 = build_quadrature(32)
    v1 = integrate(r1, PERTURBED.psi(r1.hom))
    v2 = integrate(r2, PERTURBED.psi(r2.hom))
    assert abs(v1 - v2) < 1e-8
    # the chart-local fs weight is log-singular along the chart's line at
    # infinity, so only slow self-convergence is attainable there
    w1 = integrate(r1, 0.5 * np.log(np.sum(np.abs(r1.hom) ** 2, axis=1)) - np.log(np.abs(r1.hom[:, 2])))
    w2 = integrate(r2, 0.5 * np.log(np.sum(np.abs(r2.hom) ** 2, axis=1)) - np.log(np.abs(r2.hom[:, 2])))
    assert abs(w1 - w2) < 5e-3


def test_quadrature_budget():
    with pytest.raises(BudgetExceededError):
        build_quadrature(40, max_nodes=1000)


def test_integrate_constants_and_errors():
    rule = build_quadrature(4)
    assert integrate(rule, np.ones(len(rule))) == pytest.approx(1.0, abs=1e-14)
    assert integrate(rule, np.full(len(rule), 3.7)) == pytest.approx(3.7, abs=1e-12)
    bad = np.ones(len(rule))
    bad[5] = np.inf
    with pytest.raises(ValueError, match="non-finite"):
        integrate(rule, bad)


# ---------------------------------------------------------------------------
# curvature


def test_fs_curvature_is_constant_one():
    d1 = curvature_density(FS, ProjectivePoint(1, 0, 0))
    d2 = curvature_density(FS, ProjectivePoint(1, 1, 1))
    assert abs(d1 - d2) < 1e-6
    assert abs(d1 - 1.0) < 1e-6


def test_fs_total_curvature_mass_is_one():
    rule = build_quadrature(10)
    dens = curvature_density_at_nodes(FS, rule.hom)
    assert (dens > 0).all()
    assert abs(integrate(rule, dens) - 1.0) < 1e-6


def test_small_amplitude_keeps_positive_curvature():
    rule = build_quadrature(12)
    w = Weight.perturbed(0.05, (1, 1, 1), 0.8)
    dens = curvature_density_at_nodes(w, rule.hom)
    assert dens.min() > 0


def test_large_amplitude_creates_negative_curvature():
    rule = build_quadrature(12)
    dens = curvature_density_at_nodes(PERTURBED, rule.hom)
    assert dens.min() < 0
    # the bump is radial, so at its exact center the Hessian stays a
    # multiple of the identity: indefiniteness shows up as a ring around
    # the center together with the definiteness test
    assert not curvature_positive(PERTURBED, ProjectivePoint(0, 0, 1))


def test_curvature_chart_independence():
    p_mid = ProjectivePoint(0.8, 0.9, 1.0)
    vals = []
    for chart in range(3):
        u, v = p_mid.affine(chart)
        from harnack_lab.geometry import _hessian_data_chart

        det, _ = _hessian_data_chart(PERTURBED, chart, u, v, 1e-4)
        zc = abs(p_mid.coords[chart])
        norm2 = float(np.sum(np.abs(p_mid.coords) ** 2))
        vals.append(4.0 * det * (norm2 / zc**2) ** 3)
    assert max(vals) - min(vals) < 1e-5


def test_curvature_step_halving_flags_rough_weights():
    spiky = Weight.perturbed(0.9, (1, 1, 1), 2e-3)
    with pytest.raises(IllConditionedError):
        curvature_density(spiky, ProjectivePoint(1.0007, 1, 1), step=1e-3)


def test_perturbed_total_mass_still_one():
    # topological invariant: the curvature form's square integrates to one
    # for any metric weight once the rule resolves it
    rule = build_quadrature(24)
    dens = curvature_density_at_nodes(PERTURBED, rule.hom)
    assert abs(integrate(rule, dens) - 1.0) < 2e-3
