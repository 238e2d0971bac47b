"""Natural operators on symmetric 2-tensors and forms, plus the Calabi deformation o and form Omega.

Conventions: ``(δh)_i = -g^{jk} ∇_j h_{ki}``, ``δ*ω = (∇ω + ∇ω^T)/2``,
``K(ω) = δ*ω + δ(ω) g / m``, ``B(h) = δh + d(tr h)/2`` and
``P(h) = ∇*∇h/2 - R̊(h)`` with ``∇*∇ = -g^{ab} ∇_a ∇_b``.
"""
import numpy as np

from . import calabi
from .calabi import CalabiParams
from .errors import ValenceMismatch
from .tensor_core import (TensorField, _resolve_order, _resolve_step, covariant_derivative, jet,
                          metric_jet, ring_r, second_covariant, stencil_reach)


def _require_sym2(h):
    if tuple(h.valence) != (0, 2):
        raise ValenceMismatch(f"expected a covariant 2-tensor field, got valence {h.valence}")


def _require_form1(w):
    if tuple(w.valence) != (0, 1):
        raise ValenceMismatch(f"expected a one-form field, got valence {w.valence}")


def _ginv(chart, p):
    return np.linalg.inv(chart(p))


def divergence(h, p, step=None, order=None):
    _require_sym2(h)
    nab = covariant_derivative(h, p, step, order)            # [j, k, i]
    return -np.einsum("jk,jki->i", _ginv(h.chart, p), nab)


def codifferential_1form(w, p, step=None, order=None):
    """``δω = -g^{ij} ∇_i ω_j``."""
    _require_form1(w)
    nab = covariant_derivative(w, p, step, order)
    return float(-np.einsum("ij,ij->", _ginv(w.chart, p), nab))


def delta_star(w, p, step=None, order=None):
    _require_form1(w)
    nab = covariant_derivative(w, p, step, order)
    return 0.5 * (nab + nab.T)


def conformal_killing_K(w, p, step=None, order=None):
    nab = covariant_derivative(w, p, step, order)
    g = w.chart(p)
    div = -np.einsum("ij,ij->", np.linalg.inv(g), nab)
    return 0.5 * (nab + nab.T) + div * g / g.shape[0]


def bianchi_B(h, p, step=None, order=None):
    _require_sym2(h)
    nab = covariant_derivative(h, p, step, order)
    gi = _ginv(h.chart, p)
    div = -np.einsum("jk,jki->i", gi, nab)
    dtr = np.einsum("ab,iab->i", gi, nab)
    return div + 0.5 * dtr


def rough_laplacian(h, p, step=None, order=None, mj=None):
    """``g^{ab} ∇_a ∇_b T`` for a covariant tensor field."""
    chart = h.chart
    st = _resolve_step(chart, step, p)
    order = _resolve_order(chart, order)
    chart.require(p, 4 * st * stencil_reach(order))
    mj = metric_jet(chart, p, st, order) if mj is None else mj
    t, dt, ddt = jet(h, p, st, order)
    nn = second_covariant(mj, t, dt, ddt)
    return np.tensordot(mj.ginv, nn, axes=([0, 1], [0, 1])), mj, t


def lichnerowicz_P(h, p, step=None, order=None):
    _require_sym2(h)
    lap, mj, t = rough_laplacian(h, p, step, order)
    return -0.5 * lap - ring_r(mj.riemann, mj.ginv, t)


def lichnerowicz_parts(h, p, step=None, order=None):
    """``(∇*∇h / 2, R̊(h))`` separately, for relative error scales."""
    lap, mj, t = rough_laplacian(h, p, step, order)
    return -0.5 * lap, ring_r(mj.riemann, mj.ginv, t)


def hodge_P0(f, p, lam, step=None, order=None):
    """``P_0 f = Δ_H f - 2Λ f`` with ``Δ_H = ∇*∇`` on functions."""
    lap, _, t = rough_laplacian(f, p, step, order)
    return float(-lap - 2 * lam * t)


def exterior_d2(form, p, step=None, order=None):
    """``(dΩ)_{abc} = ∂_a Ω_bc + ∂_b Ω_ca + ∂_c Ω_ab`` and the scale ``max|∂Ω|``."""
    st = _resolve_step(form.chart, step, p)
    order = _resolve_order(form.chart, order)
    form.chart.require(p, 2 * st * stencil_reach(order))
    _, dw, _ = jet(form, p, st, order, second=False)
    d = dw + np.transpose(dw, (2, 0, 1)) + np.transpose(dw, (1, 2, 0))
    return d, float(np.abs(dw).max())


def codifferential_2form(form, p, step=None, order=None):
    """``(δΩ)_b = -g^{ac} ∇_a Ω_cb`` and the scale ``max|∇Ω|``."""
    nab = covariant_derivative(form, p, step, order)
    return -np.einsum("ac,acb->b", _ginv(form.chart, p), nab), float(np.abs(nab).max())


# ---------------------------------------------------------------- closed-form Calabi fields

def _radial_factor(r, n):
    return 1.0 / (1.0 + r ** (2 * n))


def o_closed(x, params):
    """``o = (−g_cal + n dr̄⊗dr̄ + n θ̄⊗θ̄)/(1 + r^{2n})`` in Cartesian components."""
    n = params.n
    r, dr, theta, _ = calabi.cartesian_frame(x, params)
    fq = calabi.frame_quantities(params)
    g = calabi.cartesian_metric(x, params)
    return _radial_factor(r, n) * (-g + n * fq.A(r) ** 2 * np.outer(dr, dr)
                                   + n * fq.C(r) ** 2 * np.outer(theta, theta))


def o_frame_form(x, params):
    """``o = (−B g_FS + (n−1) dr̄⊗dr̄ + (n−1) θ̄⊗θ̄)/(1 + r^{2n})``."""
    n = params.n
    r, dr, theta, _ = calabi.cartesian_frame(x, params)
    fq = calabi.frame_quantities(params)
    gfs = (np.eye(x.size) - np.outer(dr, dr) - r * r * np.outer(theta, theta)) / r**2
    return _radial_factor(r, n) * (-fq.B(r) * gfs + (n - 1) * fq.A(r) ** 2 * np.outer(dr, dr)
                                   + (n - 1) * fq.C(r) ** 2 * np.outer(theta, theta))


def omega_closed(x, params, radial_coeff=None):
    """``Ω = (1−n)/(1+r^{2n}) dr̄∧θ̄ + B ω/(1+r^{2n})``.

    ``radial_coeff`` replaces the ``1−n`` numerator (used for negative controls).
    """
    n = params.n
    c = (1 - n) if radial_coeff is None else radial_coeff
    r, dr, theta, omega = calabi.cartesian_frame(x, params)
    fq = calabi.frame_quantities(params)
    wedge = np.outer(dr, theta) - np.outer(theta, dr)
    return _radial_factor(r, n) * (c * fq.A(r) * fq.C(r) * wedge + fq.B(r) * omega)


def o_from_omega(x, params, omega=None):
    """``o(X, Y) = Ω(I X, Y)``, i.e. ``o = Jᵀ Ω`` in components."""
    om = omega_closed(x, params) if omega is None else omega
    return calabi.complex_structure(params.n).T @ om


def o_euclidean(x, n):
    """Euclidean limit ``r^{-2n}(−g + n dr² + n r²θ²)``."""
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    jx = calabi.complex_structure(n) @ x
    return r2 ** (-n) * (-np.eye(x.size) + n * (np.outer(x, x) + np.outer(jx, jx)) / r2)


def o_field(params, chart=None):
    chart = chart or calabi.calabi_cartesian_chart(params)
    return TensorField((0, 2), lambda x: o_closed(x, params), chart)


def omega_field(params, chart=None, radial_coeff=None):
    chart = chart or calabi.calabi_cartesian_chart(params)
    return TensorField((0, 2), lambda x: omega_closed(x, params, radial_coeff), chart, kind="form")


def metric_field(chart):
    return TensorField((0, 2), chart.components, chart)


def verify_omega_harmonic(params, points, step=None, radial_coeff=None, decay_radii=None, order=4):
    """Closedness and coclosedness of Ω at ``points`` plus its decay exponent.

    Residuals are relative to the largest first derivative of Ω at each point.
    Only first derivatives enter, so the default step is 5e-4·|p| (a quarter of
    the chart's curvature step) with fourth-order stencils; the chart step leaves
    ~1e-6 truncation near r = 0.3.
    """
    field = omega_field(params, radial_coeff=radial_coeff)
    d_res, co_res = [], []
    for p in points:
        st = 5e-4 * float(np.linalg.norm(p)) if step is None else step
        d, sc = exterior_d2(field, p, st, order)
        d_res.append(np.abs(d).max() / sc)
        c, sc2 = codifferential_2form(field, p, st, order)
        co_res.append(np.abs(c).max() / sc2)
    radii = np.geomspace(2.0, 20.0, 10) if decay_radii is None else np.asarray(decay_radii)
    e1 = np.zeros(params.m)
    e1[0] = 1.0
    chart = field.chart
    norms = [np.sqrt(abs(_form_norm2(chart, r * e1, field))) for r in radii]
    slope = float(np.polyfit(np.log(radii), np.log(norms), 1)[0])
    return {"max_d": float(max(d_res)), "max_delta": float(max(co_res)),
            "decay_slope": slope, "expected_slope": -2.0 * params.n}


def _form_norm2(chart, p, field):
    from .tensor_core import inner
    return inner(chart, p, field, field)


__all__ = [
    "CalabiParams", "bianchi_B", "codifferential_1form", "codifferential_2form",
    "conformal_killing_K", "delta_star", "divergence", "exterior_d2", "hodge_P0",
    "lichnerowicz_P", "lichnerowicz_parts", "metric_field", "o_closed", "o_euclidean",
    "o_field", "o_frame_form", "o_from_omega", "omega_closed", "omega_field",
    "rough_laplacian", "verify_omega_harmonic",
]
