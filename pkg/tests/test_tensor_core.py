import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from calabi_glue import charts
from calabi_glue.calabi import CalabiParams, calabi_cartesian_chart
from calabi_glue.errors import PointOutsideDomain, SingularMetric, ValenceMismatch
from calabi_glue.tensor_core import (Box, ChartMetric, Shell, TensorField, christoffel,
                                     covariant_derivative, curvature, inner, jet, norm)


def sphere_point(m, rng):
    return np.concatenate(([rng.uniform(0.6, np.pi - 0.6)], rng.uniform(0.6, np.pi - 0.6, m - 2),
                           [rng.uniform(-2.5, 2.5)]))


# ---------------------------------------------------------------- calibration

def test_unit_four_sphere_scalar_is_twelve():
    chart = charts.sphere_polar_chart(4)
    b = curvature(chart, np.array([1.1, 1.2, 1.3, 0.4]))
    assert abs(b.scalar - 12.0) < 1e-4


def test_round_sphere_tensor_matches_convention(rng):
    chart = charts.sphere_polar_chart(4)
    p = sphere_point(4, rng)
    b = curvature(chart, p)
    g = b.metric
    expected = np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g)
    assert np.abs(b.riemann - expected).max() < 1e-5 * np.abs(expected).max()


def test_hyperbolic_scalar_and_sectional():
    chart = charts.hyperbolic_polar_chart(6)
    b = curvature(chart, np.array([1.4, 1.0, 1.2, 1.1, 1.3, 0.2]))
    assert abs(b.scalar + 30.0) < 1e-4
    assert np.abs(b.ricci + 5 * b.metric).max() < 1e-5 * np.abs(b.metric).max()


def test_euclidean_curvature_vanishes_exactly():
    b = curvature(charts.euclidean_chart(6), np.linspace(-1, 1, 6))
    assert np.all(b.riemann == 0) and b.scalar == 0
    assert np.all(christoffel(charts.euclidean_chart(3), np.zeros(3)) == 0)


def test_sphere_christoffel_closed_form(rng):
    m = 4
    chart = charts.sphere_polar_chart(m)
    p = np.array([np.pi / 2, 1.0, 1.3, 0.5])          # equator in the radial angle
    num = christoffel(chart, p)
    ref = charts.warped_christoffel(m, np.sin, np.cos, p)
    assert np.abs(num - ref).max() < 1e-6


def test_hyperbolic_radial_symbol_is_coth():
    m = 5
    chart = charts.hyperbolic_polar_chart(m)
    for r in (0.7, 1.5, 3.0):
        p = np.array([r, 1.0, 1.2, 1.4, 0.3])
        gam = christoffel(chart, p)
        assert abs(gam[1, 0, 1] - np.cosh(r) / np.sinh(r)) < 1e-6


@pytest.mark.parametrize("make", [lambda: charts.sphere_polar_chart(4),
                                  lambda: charts.hyperbolic_polar_chart(4),
                                  lambda: calabi_cartesian_chart(CalabiParams(2))])
def test_bundle_symmetries_at_random_points(make, rng):
    chart = make()
    for _ in range(100 if chart.dim == 4 and "calabi" not in chart.name else 20):
        if isinstance(chart.domain, Shell):
            p = chart.domain.sample(rng, 1)[0]
            p *= rng.uniform(0.5, 5.0) / np.linalg.norm(p)
        else:
            p = sphere_point(4, rng) if "S^" in chart.name else np.concatenate(
                ([rng.uniform(0.5, 4)], rng.uniform(0.6, np.pi - 0.6, 2), [rng.uniform(-2.5, 2.5)]))
        b = curvature(chart, p)
        assert b.symmetry_residual() < 1e-6
        ric = np.einsum("jl,ijkl->ik", b.inverse, b.riemann)
        assert np.abs(ric - b.ricci).max() <= 1e-12 * max(1.0, np.abs(ric).max())


def test_halving_step_quarters_error():
    chart = charts.sphere_polar_chart(4)
    p = np.array([1.1, 1.2, 1.3, 0.4])
    errs = [abs(curvature(chart, p, step=h, order=2).scalar - 12.0) for h in (4e-2, 2e-2)]
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_fourth_order_jet_is_more_accurate():
    f = lambda p: np.sin(p[0]) * np.exp(p[1])  # noqa: E731
    p = np.array([0.3, 0.2])
    exact = np.array([np.cos(0.3) * np.exp(0.2), np.sin(0.3) * np.exp(0.2)])
    e2 = np.abs(jet(f, p, 1e-2, 2)[1] - exact).max()
    e4 = np.abs(jet(f, p, 1e-2, 4)[1] - exact).max()
    assert e4 < e2 / 100


def test_ricci_is_scale_invariant(rng):
    base = charts.sphere_polar_chart(4)
    scaled = ChartMetric(4, base.domain, lambda p: 7.0 * base(p), 1.0, "scaled", stencil_order=4)
    p = sphere_point(4, rng)
    a, b = curvature(base, p), curvature(scaled, p)
    assert np.abs(a.ricci - b.ricci).max() < 1e-6
    assert abs(b.scalar * 7.0 - a.scalar) < 1e-4


# ---------------------------------------------------------------- errors

def test_point_outside_domain():
    with pytest.raises(PointOutsideDomain):
        curvature(charts.sphere_polar_chart(4), np.array([0.2, 1.0, 1.0, 0.0]))


def test_singular_metric():
    chart = ChartMetric(2, Box(-np.ones(2), np.ones(2)), lambda p: np.diag([1.0, 0.0]), 1.0)
    with pytest.raises(SingularMetric):
        christoffel(chart, np.zeros(2))


def test_shell_domain_and_sampling(rng):
    sh = Shell(4, 1.0, 3.0)
    pts = sh.sample(rng, 50)
    r = np.linalg.norm(pts, axis=1)
    assert np.all((r > 1.0) & (r < 3.0))
    assert not sh.contains(np.array([1.05, 0, 0, 0]), margin=0.1)


def test_default_step_rule_follows_chart():
    chart = calabi_cartesian_chart(CalabiParams(2))
    assert chart.step_at(np.array([3.0, 0, 0, 0])) == pytest.approx(6e-3)
    assert charts.euclidean_chart(2).step_at(np.zeros(2)) == pytest.approx(1e-3)


# ---------------------------------------------------------------- covariant derivative / inner

def test_covariant_derivative_trivial_cases():
    chart = charts.euclidean_chart(3)
    p = np.array([0.2, -0.4, 0.5])
    c = TensorField((0, 0), lambda x: np.array(2.5), chart)
    dx1 = TensorField((0, 1), lambda x: np.array([1.0, 0.0, 0.0]), chart)
    assert np.abs(covariant_derivative(c, p)).max() == 0
    assert np.abs(covariant_derivative(dx1, p)).max() == 0


def test_metric_is_parallel(rng):
    chart = charts.sphere_polar_chart(4)
    g = TensorField((0, 2), chart.components, chart)
    assert np.abs(covariant_derivative(g, sphere_point(4, rng))).max() < 1e-8


def test_covariant_derivative_of_dr_on_calabi():
    """``∇ dr̄`` against an independent difference of the frame coefficients."""
    from calabi_glue.calabi import cartesian_frame
    params = CalabiParams(2)
    chart = calabi_cartesian_chart(params)
    dr = TensorField((0, 1), lambda x: cartesian_frame(x, params)[1], chart)
    p = np.array([0.9, -0.3, 0.5, 0.6])
    nab = covariant_derivative(dr, p)
    h = 1e-5
    partial = np.array([(cartesian_frame(p + h * e, params)[1] - cartesian_frame(p - h * e, params)[1]) / (2 * h)
                        for e in np.eye(4)])
    gam = christoffel(chart, p)
    oracle = partial - np.einsum("kai,k->ai", gam, dr(p))
    assert np.abs(nab - oracle).max() < 1e-5


def test_inner_of_metric_is_dimension():
    chart = charts.euclidean_chart(6)
    g = TensorField((0, 2), chart.components, chart)
    assert inner(chart, np.zeros(6), g, g) == pytest.approx(6.0)


def test_inner_valence_mismatch():
    chart = charts.euclidean_chart(2)
    a = TensorField((0, 2), lambda x: np.eye(2), chart)
    b = TensorField((0, 1), lambda x: np.ones(2), chart)
    with pytest.raises(ValenceMismatch):
        inner(chart, np.zeros(2), a, b)


@given(st.lists(st.floats(-2, 2), min_size=9, max_size=9), st.lists(st.floats(-2, 2), min_size=9, max_size=9),
       st.floats(-3, 3))
def test_inner_bilinear_symmetric(a, b, s):
    chart = charts.sphere_polar_chart(3)
    p = np.array([1.0, 1.2, 0.3])
    a, b = np.reshape(a, (3, 3)), np.reshape(b, (3, 3))
    ab = inner(chart, p, a, b)
    assert ab == pytest.approx(inner(chart, p, b, a), abs=1e-9)
    assert inner(chart, p, s * a, b) == pytest.approx(s * ab, abs=1e-8)
    assert norm(chart, p, a) >= 0


def test_symmetric_field_reports_symmetry(rng):
    chart = charts.euclidean_chart(3)
    f = TensorField((0, 2), lambda x: np.outer(x, x), chart)
    assert f.symmetry_residual(np.array([0.1, 0.2, 0.3])) == 0
