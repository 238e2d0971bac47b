import numpy as np
import pytest

from calabi_glue import charts
from calabi_glue.calabi import (CalabiParams, calabi_cartesian_chart, cartesian_frame,
                                cartesian_metric, complex_structure,
                                frame_quantities)
from calabi_glue.deform_ops import (bianchi_B, codifferential_1form, conformal_killing_K, delta_star,
                                    divergence, hodge_P0, lichnerowicz_P, lichnerowicz_parts,
                                    metric_field, o_closed, o_euclidean, o_field, o_frame_form,
                                    o_from_omega, omega_closed, verify_omega_harmonic)
from calabi_glue.errors import ValenceMismatch
from calabi_glue.obstruction import conformal_killing_quadratic
from calabi_glue.suites import sample_ale_points
from calabi_glue.tensor_core import TensorField


def euclid(m=4):
    return charts.euclidean_chart(m)


def form(chart, f):
    return TensorField((0, 1), f, chart)


def sym2(chart, f):
    return TensorField((0, 2), f, chart)


# ---------------------------------------------------------------- hand examples, flat space

def test_divergence_sign_on_linear_tensor():
    ch = euclid()
    e = np.zeros((4, 4))
    e[0, 0] = 1.0
    h = sym2(ch, lambda x: x[0] * e)
    out = divergence(h, np.array([0.3, -0.2, 0.5, 0.1]))
    assert np.allclose(out, [-1, 0, 0, 0], atol=1e-9)


def test_delta_star_examples():
    ch = euclid()
    p = np.array([0.4, 0.1, -0.7, 0.2])
    assert np.abs(delta_star(form(ch, lambda x: np.eye(4)[0]), p)).max() == 0
    killing = form(ch, lambda x: np.array([x[1], -x[0], 0.0, 0.0]))
    assert np.abs(delta_star(killing, p)).max() < 1e-9
    lin = delta_star(form(ch, lambda x: np.array([x[0], 0, 0, 0])), p)
    ref = np.zeros((4, 4))
    ref[0, 0] = 1.0
    assert np.abs(lin - ref).max() < 1e-9


def test_delta_star_of_cubic_radial_form(rng):
    ch = euclid(6)
    x = rng.uniform(-1, 1, 6)
    w = form(ch, lambda y: (y @ y) * y)
    assert np.abs(delta_star(w, x, order=4) - ((x @ x) * np.eye(6) + 2 * np.outer(x, x))).max() < 1e-8


def test_valence_checks():
    ch = euclid()
    w = form(ch, lambda x: x)
    h = sym2(ch, lambda x: np.eye(4))
    with pytest.raises(ValenceMismatch):
        divergence(w, np.zeros(4))
    with pytest.raises(ValenceMismatch):
        delta_star(h, np.zeros(4))
    with pytest.raises(ValenceMismatch):
        bianchi_B(w, np.zeros(4))


def test_codifferential_of_position_form():
    ch = euclid(6)
    assert codifferential_1form(form(ch, lambda x: x), np.full(6, 0.3)) == pytest.approx(-6.0, abs=1e-9)


@pytest.mark.parametrize("m", [4, 6])
def test_K_is_trace_free(m, rng):
    ch = euclid(m)
    a, b = rng.standard_normal((m, m)), rng.standard_normal((m, m, m))
    w = form(ch, lambda x: a @ x + np.einsum("ijk,j,k->i", b, x, x) + np.sin(x))
    x = rng.uniform(-1, 1, m)
    k = conformal_killing_K(w, x)
    assert abs(np.trace(k)) <= 1e-10 * np.abs(k).max()


@pytest.mark.parametrize("m", [4, 6])
def test_K_of_inverse_power_form_matches_quadratic_closed_form(m, rng):
    """``K_euc(a_ij x^i dx^j / |x|^m) |x|^{m+2}`` against the explicit coefficient array."""
    ch = euclid(m)
    a = rng.standard_normal((m, m))
    w = form(ch, lambda x: (x @ a) / np.linalg.norm(x) ** m)
    quad = conformal_killing_quadratic(a)
    for _ in range(5):
        d = rng.standard_normal(m)
        x = rng.uniform(0.8, 1.5) * d / np.linalg.norm(d)
        num = conformal_killing_K(w, x, step=1e-3, order=4) * np.linalg.norm(x) ** (m + 2)
        ref = quad(x)
        assert np.abs(num - ref).max() < 1e-8 * max(1.0, np.abs(ref).max())


def test_K_of_zero_matrix_vanishes():
    assert np.all(conformal_killing_quadratic(np.zeros((4, 4))).coeffs == 0)


# ---------------------------------------------------------------- the metric as input

@pytest.mark.parametrize("chart_fn", [lambda: charts.sphere_polar_chart(4),
                                      lambda: calabi_cartesian_chart(CalabiParams(2))])
def test_metric_is_divergence_and_bianchi_free(chart_fn):
    ch = chart_fn()
    g = metric_field(ch)
    p = np.array([1.1, 1.2, 1.3, 0.4])
    assert np.abs(divergence(g, p)).max() < 1e-7
    assert np.abs(bianchi_B(g, p)).max() < 1e-7


def test_P_of_metric_is_minus_ricci_on_sphere():
    ch = charts.sphere_polar_chart(4)
    p = np.array([1.0, 1.2, 1.4, 0.3])
    g = ch(p)
    assert np.abs(lichnerowicz_P(metric_field(ch), p) + 3 * g).max() < 1e-5


def test_P_of_metric_vanishes_on_calabi():
    ch = calabi_cartesian_chart(CalabiParams(2))
    x = np.array([0.7, -0.3, 0.5, 0.9])
    lap, ring = lichnerowicz_parts(metric_field(ch), x)
    assert np.abs(lap).max() < 1e-9                       # metric is parallel
    assert np.abs(ring).max() < 1e-6 * np.abs(ch(x)).max()  # ring-R(g) = Ric = 0


@pytest.mark.parametrize("kind,lam", [("sphere", 3.0), ("hyperbolic", -3.0)])
def test_P_of_conformal_metric_reduces_to_P0(kind, lam, rng):
    m = 4
    ch = charts.sphere_polar_chart(m) if kind == "sphere" else charts.hyperbolic_polar_chart(m, 4.0)
    f = lambda p: np.exp(0.3 * p[0]) * np.cos(p[1]) + p[2] * p[3]  # noqa: E731
    fg = sym2(ch, lambda p: f(p) * ch(p))
    scalar = TensorField((0, 0), lambda p: np.float64(f(p)), ch)
    for _ in range(3):
        p = np.array([rng.uniform(0.8, 2.0), 1.0, 1.3, 0.4])
        lhs = lichnerowicz_P(fg, p)
        rhs = 0.5 * hodge_P0(scalar, p, lam) * ch(p)
        assert np.abs(lhs - rhs).max() < 1e-5 * max(1.0, np.abs(rhs).max())


def test_P_delta_star_equals_delta_star_B_delta_star(rng):
    """Nested stencils: the inner derivative uses a small step so the outer second derivative sees a smooth field."""
    n, m = 2, 4
    ch = calabi_cartesian_chart(CalabiParams(n))
    for _ in range(20):
        a, b, c = rng.standard_normal(m), rng.standard_normal((m, m)), 0.3 * rng.standard_normal((m, m, m))
        w = form(ch, lambda x, a=a, b=b, c=c: a + b @ x + np.einsum("ijk,j,k->i", c, x, x))
        ds = sym2(ch, lambda x, w=w: delta_star(w, x, step=2e-4, order=4))
        bds = form(ch, lambda x, ds=ds: bianchi_B(ds, x, step=2e-3, order=4))
        d = rng.standard_normal(m)
        x = rng.uniform(0.8, 2.0) * d / np.linalg.norm(d)
        lap, ring = lichnerowicz_parts(ds, x, step=1e-2, order=4)
        rhs = delta_star(bds, x, step=1e-2, order=4)
        scale = max(np.abs(lap).max(), np.abs(ring).max())
        assert np.abs(lap - ring - rhs).max() < 1e-4 * scale


# ---------------------------------------------------------------- o and Ω

@pytest.mark.parametrize("n", [2, 3, 4])
def test_o_displays_agree(n, rng):
    params = CalabiParams(n)
    for x in sample_ale_points(n, 10, seed=int(rng.integers(1 << 30))):
        a = o_closed(x, params)
        assert np.abs(a - o_frame_form(x, params)).max() < 1e-12
        assert np.abs(a - o_from_omega(x, params)).max() < 1e-8
        assert np.abs(a - a.T).max() < 1e-14


@pytest.mark.parametrize("n", [2, 3])
def test_o_on_fibre_direction(n):
    params = CalabiParams(n)
    for r in (0.5, 1.0, 2.5):
        x = np.zeros(2 * n)
        x[0] = r
        _, _, theta, _ = cartesian_frame(x, params)
        v = complex_structure(n) @ x
        v /= (theta @ v) * frame_quantities(params).C(r)   # dual to the unit coframe C θ
        assert v @ o_closed(x, params) @ v == pytest.approx((n - 1) / (1 + r ** (2 * n)), rel=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_o_trace_free_and_norm(n, rng):
    params = CalabiParams(n)
    for x in sample_ale_points(n, 20, seed=int(rng.integers(1 << 30))):
        gi = np.linalg.inv(cartesian_metric(x, params))
        o = o_closed(x, params)
        assert abs(np.einsum("ij,ij->", gi, o)) < 1e-12
        r = np.linalg.norm(x)
        # |o|² = 2n(n−1)/(1+r^{2n})² from the orthogonal frame: (n−1) ones on the FS block, (n−1)² twice
        ref = (2 * (n - 1) + 2 * (n - 1) ** 2) / (1 + r ** (2 * n)) ** 2
        assert np.einsum("ia,jb,ab,ij->", gi, gi, o, o) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_o_is_an_einstein_deformation(n, rng):
    params = CalabiParams(n)
    chart = calabi_cartesian_chart(params)
    of = o_field(params, chart)
    for x in sample_ale_points(n, 4, seed=int(rng.integers(1 << 30))):
        gi = np.linalg.inv(chart(x))
        dv = divergence(of, x)
        assert np.sqrt(abs(dv @ gi @ dv)) < 1e-5
        assert np.abs(bianchi_B(of, x)).max() < 1e-5
        lap, ring = lichnerowicz_parts(of, x)
        assert np.abs(lap - ring).max() < 1e-4 * max(np.abs(lap).max(), np.abs(ring).max())


@pytest.mark.parametrize("n", [2, 3])
def test_omega_is_harmonic_and_corruption_is_caught(n):
    params = CalabiParams(n)
    pts = sample_ale_points(n, 10, seed=3, r_range=(0.3, 5.0))
    good = verify_omega_harmonic(params, pts)
    assert good["max_d"] < 1e-6 and good["max_delta"] < 1e-6
    assert abs(good["decay_slope"] - good["expected_slope"]) < 0.2
    bad = verify_omega_harmonic(params, pts[:3], radial_coeff=n)
    assert bad["max_d"] > 1e-2
    assert bad["max_d"] > 1e4 * good["max_d"]


def test_omega_is_antisymmetric(rng):
    params = CalabiParams(3)
    x = rng.standard_normal(6)
    om = omega_closed(x, params)
    assert np.abs(om + om.T).max() < 1e-15


@pytest.mark.parametrize("n", [2, 3])
def test_o_approaches_euclidean_limit(n):
    """The difference obeys the r^{-2n-1} bound; its actual rate is r^{-4n}."""
    params = CalabiParams(n)
    d = np.random.default_rng(1).standard_normal(2 * n)
    d /= np.linalg.norm(d)
    rs = np.geomspace(2.0, 20.0, 8)
    diff = [np.abs(o_closed(r * d, params) - o_euclidean(r * d, n)).max() for r in rs]
    slope = np.polyfit(np.log(rs), np.log(diff), 1)[0]
    assert slope < -(2 * n + 1) + 0.3
    assert slope == pytest.approx(-4 * n, abs=0.3)
