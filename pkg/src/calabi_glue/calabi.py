"""The Calabi Ricci-flat Kähler ALE metric on the total space of O(-n) -> CP^{n-1}.

Real coordinates on C^n are interleaved, ``x = (Re z_1, Im z_1, Re z_2, ...)``,
so the complex structure is ``J = blockdiag([[0, -1], [1, 0]])`` and
``J x`` generates the Hopf circle action ``z -> e^{i phi} z``.

Two charts are provided:

* the Cartesian (ALE) chart, ``g = F' I + F'' (x x^T + Jx Jx^T)`` with ``u = |x|^2``,
  obtained from the Hermitian components ``g_{i jbar}``;
* the radial chart in coordinates ``(r, phi, Re w, Im w)`` built from the
  frame quantities, ``g = A^2 dr^2 + B g_FS + C^2 theta^2``.
"""
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import InsufficientData, NonpositiveU, ZeroPoint
from .tensor_core import Box, ChartMetric, Shell


@dataclass(frozen=True)
class CalabiParams:
    n: int
    a: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"complex dimension n must be an integer >= 2, got {self.n}")
        if not self.a > 0:
            raise ValueError("integration constant a must be positive")

    @property
    def m(self):
        return 2 * self.n


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0)):
        raise NonpositiveU("u = |z|^2 must be positive")
    return u


def _log_an_plus_un(u, params):
    n, a = params.n, params.a
    return np.logaddexp(n * np.log(a), n * np.log(u))


def potential_derivs(u, params):
    """``(F'(u), F''(u))`` for the Calabi potential.

    ``F' = (a^n + u^n)^{1/n} / u`` and
    ``F'' = u^{n-1}(a^n+u^n)^{(1-n)/n}/u - (a^n+u^n)^{1/n}/u^2``.
    The second expression is evaluated in its cancelled form
    ``-a^n (a^n+u^n)^{(1-n)/n} / u^2`` to stay accurate for large ``u``.
    """
    u = _check_u(u)
    n, a = params.n, params.a
    big = _log_an_plus_un(u, params)
    lu = np.log(u)
    f1 = np.exp(big / n - lu)
    f2 = -np.exp(n * np.log(a) + (1 - n) / n * big - 2 * lu)
    return f1, f2


def potential_second_uncancelled(u, params):
    """``F''`` evaluated term by term exactly as the two-term closed form reads."""
    u = _check_u(u)
    n, a = params.n, params.a
    s = a**n + u**n
    return u ** (n - 1) * s ** ((1 - n) / n) / u - s ** (1 / n) / u**2


def fprime_minus_one(u, params):
    """``F'(u) - 1`` without cancellation at large ``u``."""
    u = _check_u(u)
    n, a = params.n, params.a
    return np.expm1(np.log1p((a / u) ** n) / n)


def monge_ampere_residual(u, params, dps=40):
    """``|F'^{n-1} (F' + u F'') - 1|``.

    ``F' + u F''`` is ``~u^{n-1}`` while each term is ``~1/u``, so in doubles
    the combination loses ``n log10(1/u)`` digits (all of them at ``n = 5``,
    ``u = 1e-3``). By default both derivatives are therefore evaluated from
    their two-term closed forms in ``dps``-digit arithmetic; ``dps=None`` uses
    :func:`potential_derivs` in doubles.
    """
    u = _check_u(u)
    if dps is None:
        f1, f2 = potential_derivs(u, params)
        return np.abs(f1 ** (params.n - 1) * (f1 + u * f2) - 1.0)
    with mpmath.workdps(dps):
        n, a = params.n, mpmath.mpf(params.a)

        def one(v):
            v = mpmath.mpf(float(v))
            s = a**n + v**n
            f1 = mpmath.root(s, n) / v
            f2 = v ** (n - 1) * s ** (mpmath.mpf(1 - n) / n) / v - mpmath.root(s, n) / v**2
            return float(abs(f1 ** (n - 1) * (f1 + v * f2) - 1))

        out = np.array([one(v) for v in np.ravel(u)])
    return out.reshape(u.shape) if u.ndim else float(out[0])


# ---------------------------------------------------------------- complex form

def calabi_complex_components(z, params):
    """Hermitian matrix ``g_{i jbar} = delta_ij F' + conj(z_i) z_j F''``."""
    z = np.asarray(z, dtype=complex)
    u = float(np.vdot(z, z).real)
    if u == 0.0:
        raise ZeroPoint("the Calabi metric is not defined at z = 0 in these coordinates")
    f1, f2 = potential_derivs(u, params)
    return f1 * np.eye(len(z)) + f2 * np.outer(z.conj(), z)


def calabi_simplified_components(z, params):
    """The factored display ``((1+u^n)^{1/n}/u)(delta_ij - conj(z_i) z_j / (u (1+u^n)))`` (``a = 1``)."""
    z = np.asarray(z, dtype=complex)
    n = params.n
    u = float(np.vdot(z, z).real)
    pref = (1 + u**n) ** (1 / n) / u
    return pref * (np.eye(len(z)) - np.outer(z.conj(), z) / (u * (1 + u**n)))


def hermitian_to_real(h):
    """Real ``2n x 2n`` matrix of ``(v, w) -> Re sum h_ij v_i conj(w_j)`` in interleaved coordinates."""
    n = h.shape[0]
    out = np.empty((2 * n, 2 * n))
    out[0::2, 0::2] = h.real
    out[1::2, 1::2] = h.real
    out[0::2, 1::2] = h.imag
    out[1::2, 0::2] = -h.imag
    return out


def real_to_complex(x):
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def complex_structure(n):
    """Standard ``J`` on interleaved coordinates: ``J e_{x_k} = e_{y_k}``."""
    return np.kron(np.eye(n), np.array([[0.0, -1.0], [1.0, 0.0]]))


# ---------------------------------------------------------------- Cartesian chart

def cartesian_metric(x, params):
    x = np.asarray(x, dtype=float)
    u = float(x @ x)
    f1, f2 = potential_derivs(u, params)
    jx = complex_structure(params.n) @ x
    return f1 * np.eye(x.size) + f2 * (np.outer(x, x) + np.outer(jx, jx))


def cartesian_deviation(x, params):
    """``g - g_euc`` in the Cartesian chart, accurate far out."""
    x = np.asarray(x, dtype=float)
    u = float(x @ x)
    _, f2 = potential_derivs(u, params)
    jx = complex_structure(params.n) @ x
    return fprime_minus_one(u, params) * np.eye(x.size) + f2 * (np.outer(x, x) + np.outer(jx, jx))


def calabi_cartesian_chart(params, r_in=0.05, r_out=200.0):
    """The Calabi metric in ALE coordinates on the shell ``r_in < |x| < r_out``.

    Feature size is ``~r`` both near the collapsed core and along the ALE end,
    so the default step is ``2e-3 r`` with fourth-order stencils: second order
    leaves ``|Ric|/|Rm| ~ 1e-3`` at ``r = 1/2``, and a fixed step drowns the
    ``r^{-2n-2}`` curvature in roundoff beyond ``r ~ 5``.
    """
    return ChartMetric(params.m, Shell(params.m, r_in, r_out),
                       lambda x: cartesian_metric(x, params), 1.0,
                       f"calabi n={params.n} (cartesian)",
                       step_rule=lambda x: 2e-3 * float(np.linalg.norm(x)), stencil_order=4)


# ---------------------------------------------------------------- frame quantities

@dataclass(frozen=True)
class FrameQuantities:
    params: CalabiParams

    def A(self, r):
        n = self.params.n
        return r ** (n - 1) / (1 + r ** (2 * n)) ** ((n - 1) / (2 * n))

    def B(self, r):
        n = self.params.n
        return (1 + r ** (2 * n)) ** (1 / n)

    def C(self, r):
        n = self.params.n
        return r**n * (1 + r ** (2 * n)) ** ((1 - n) / (2 * n))


def frame_quantities(params):
    if params.a != 1.0:
        raise ValueError("frame quantities are stated for a = 1")
    return FrameQuantities(params)


# ---------------------------------------------------------------- radial (Hopf) chart

def hopf_point(q, n):
    """Cartesian point for radial-chart coordinates ``q = (r, phi, Re w_1, Im w_1, ...)``."""
    q = np.asarray(q, dtype=float)
    r, phi = q[0], q[1]
    w = q[2::2] + 1j * q[3::2]
    s = np.concatenate(([1.0 + 0j], w)) / np.sqrt(1 + np.vdot(w, w).real)
    z = r * np.exp(1j * phi) * s
    x = np.empty(2 * n)
    x[0::2], x[1::2] = z.real, z.imag
    return x


def fubini_study_parts(wreal):
    """``(g_FS, beta)`` on the affine chart ``w in C^{n-1}`` (real interleaved coordinates).

    ``beta = Im(conj(w) . dw) / (1 + |w|^2)`` is the connection form, so
    ``theta = dphi + beta`` and ``g_FS = |ds|^2 - beta^2``.
    """
    wreal = np.asarray(wreal, dtype=float)
    k = wreal.size
    rho = 1.0 + wreal @ wreal
    v = wreal
    u = np.empty(k)
    u[0::2], u[1::2] = -wreal[1::2], wreal[0::2]
    gfs = (rho * np.eye(k) - np.outer(v, v) - np.outer(u, u)) / rho**2
    return gfs, u / rho


def radial_metric(q, params):
    n = params.n
    fq = frame_quantities(params)
    r = q[0]
    gfs, beta = fubini_study_parts(q[2:])
    m = 2 * n
    g = np.zeros((m, m))
    g[0, 0] = fq.A(r) ** 2
    theta = np.concatenate(([1.0], beta))           # over (phi, w)
    g[1:, 1:] = fq.C(r) ** 2 * np.outer(theta, theta)
    g[2:, 2:] += fq.B(r) * gfs
    return g


def calabi_radial_chart(params, r_range=(0.2, 10.0), w_box=2.0):
    """Radial chart ``A^2 dr^2 + B g_FS + C^2 theta^2`` over ``(r, phi, w)``."""
    if r_range[0] <= 0:
        from .errors import PointOutsideDomain
        raise PointOutsideDomain("radial chart must stay away from the zero section (r > 0)")
    m = params.m
    lo = np.array([r_range[0], -np.pi] + [-w_box] * (m - 2))
    hi = np.array([r_range[1], np.pi] + [w_box] * (m - 2))
    return ChartMetric(m, Box(lo, hi), lambda q: radial_metric(q, params), 1.0,
                       f"calabi n={params.n} (radial)")


def hopf_jacobian(q, n, step=1e-6):
    """``dx/dq`` of the Hopf parametrization by central differences."""
    q = np.asarray(q, dtype=float)
    m = 2 * n
    jac = np.empty((m, m))
    for a in range(m):
        e = np.zeros(m)
        e[a] = step
        jac[:, a] = (hopf_point(q + e, n) - hopf_point(q - e, n)) / (2 * step)
    return jac


def pullback_cartesian(q, params, step=1e-6):
    """The Cartesian Calabi metric pulled back to radial coordinates."""
    jac = hopf_jacobian(q, params.n, step)
    return jac.T @ cartesian_metric(hopf_point(q, params.n), params) @ jac


# ---------------------------------------------------------------- Cartesian one-forms

def cartesian_frame(x, params):
    """Covectors ``dr, theta`` and the 2-form ``omega = d theta / 2`` at ``x``."""
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    r = np.sqrt(r2)
    jmat = complex_structure(params.n)
    jx = jmat @ x
    dr = x / r
    theta = jx / r2
    omega = -jmat / r2 - (np.outer(x, jx) - np.outer(jx, x)) / r2**2
    return r, dr, theta, omega


# ---------------------------------------------------------------- ALE decay

@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    sup_deviation: np.ndarray
    radii: np.ndarray
    degenerate: bool


def ale_decay_fit(params, radii, deviation=None, directions=4, seed=0):
    """Log-log slope of ``sup |g - g_euc|`` against ``r``.

    ``deviation(x)`` defaults to the accurate Calabi deviation; pass another
    callable (e.g. a flat one) to probe other metrics. A vanishing deviation
    gives ``degenerate=True`` and a NaN slope.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size < 8 or radii.max() / radii.min() < 10 or radii.min() < 2:
        raise InsufficientData("need >= 8 radii >= 2 spanning at least a decade")
    if deviation is None:
        def deviation(x):
            return cartesian_deviation(x, params)
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((directions, params.m))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    sup = np.array([max(np.abs(deviation(r * d)).max() for d in dirs) for r in radii])
    if np.all(sup == 0):
        return DecayFit(float("nan"), float("nan"), sup, radii, True)
    slope, intercept = np.polyfit(np.log(radii), np.log(sup), 1)
    return DecayFit(float(slope), float(intercept), sup, radii, False)
