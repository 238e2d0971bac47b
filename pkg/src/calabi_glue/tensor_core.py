"""Chart-based tensor calculus.

Curvature convention
--------------------
``R(X, Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z`` and the lowered tensor is
``R_ijkl = <R(e_i, e_j) e_l, e_k>``, so that

* ``R_ijij`` is the sectional curvature of the ``(e_i, e_j)`` plane,
* ``Ric_ik = g^jl R_ijkl``,
* the unit round sphere has ``R_ijkl = g_ik g_jl - g_il g_jk`` and scalar
  curvature ``m(m-1)``.

Derivatives are central finite differences. The default step is
``chart.step_at(p)`` (``regularity_scale * 1e-3`` unless the chart carries a
pointwise rule) and the default order is ``chart.stencil_order``; passing
``order=4`` switches to fourth-order stencils explicitly.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import PointOutsideDomain, SingularMetric, StepTooLarge, ValenceMismatch


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``lo <= p <= hi``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))

    def contains(self, p, margin=0.0):
        p = np.asarray(p, dtype=float)
        return bool(np.all(p - margin > self.lo) and np.all(p + margin < self.hi))

    def sample(self, rng, count, shrink=0.1):
        span = self.hi - self.lo
        lo = self.lo + shrink * span
        return lo + rng.random((count, len(lo))) * (1 - 2 * shrink) * span


@dataclass(frozen=True)
class Shell:
    """Spherical shell ``r_in < |p| < r_out`` in Cartesian coordinates."""

    dim: int
    r_in: float
    r_out: float

    def contains(self, p, margin=0.0):
        r = float(np.linalg.norm(p))
        return self.r_in < r - margin and r + margin < self.r_out

    def sample(self, rng, count, shrink=0.1):
        width = self.r_out - self.r_in
        r = self.r_in + width * (shrink + (1 - 2 * shrink) * rng.random(count))
        x = rng.standard_normal((count, self.dim))
        return x / np.linalg.norm(x, axis=1, keepdims=True) * r[:, None]


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class ChartMetric:
    """A single coordinate chart carrying a Riemannian metric.

    ``components(p)`` returns the symmetric ``dim x dim`` coefficient matrix
    ``g_ij(p)``. ``regularity_scale`` is the smallest feature size of the
    coefficients and sets the default finite-difference step; ``step_rule(p)``
    overrides it pointwise for charts whose feature size varies (cones, ALE
    ends). ``stencil_order`` is the default difference order for this chart.
    """

    dim: int
    domain: object
    components: Callable
    regularity_scale: float = 1.0
    name: str = ""
    step_rule: Callable = None
    stencil_order: int = 2

    def __call__(self, p):
        return np.asarray(self.components(np.asarray(p, dtype=float)), dtype=float)

    @property
    def default_step(self):
        return self.regularity_scale * 1e-3

    def step_at(self, p):
        return self.default_step if self.step_rule is None else float(self.step_rule(np.asarray(p, dtype=float)))

    def require(self, p, margin=0.0):
        if not self.domain.contains(p, margin):
            raise PointOutsideDomain(
                f"point {np.asarray(p).tolist()} not inside {self.name or 'chart'} domain with margin {margin:g}"
            )

    def is_positive_definite(self, p):
        g = self(p)
        return bool(np.allclose(g, g.T, rtol=0, atol=1e-12 * np.abs(g).max())
                    and np.linalg.eigvalsh(g).min() > 0)


@dataclass(frozen=True)
class CurvatureBundle:
    gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    metric: np.ndarray
    inverse: np.ndarray

    def symmetry_residual(self):
        """Largest violation of the Riemann symmetries and first Bianchi, relative to max|R|."""
        r = self.riemann
        scale = max(np.abs(r).max(), np.finfo(float).tiny)
        res = [
            r + r.transpose(1, 0, 2, 3),
            r + r.transpose(0, 1, 3, 2),
            r - r.transpose(2, 3, 0, 1),
            r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3),
        ]
        return max(np.abs(x).max() for x in res) / scale

    def norm_riemann(self):
        gi = self.inverse
        up = np.einsum("ia,jb,kc,ld,abcd->ijkl", gi, gi, gi, gi, self.riemann)
        return float(np.sqrt(abs(np.einsum("ijkl,ijkl->", up, self.riemann))))

    def norm_ricci(self):
        gi = self.inverse
        return float(np.sqrt(abs(np.einsum("ia,jb,ab,ij->", gi, gi, self.ricci, self.ricci))))


@dataclass(frozen=True)
class TensorField:
    """A closed-form tensor field on a chart.

    ``valence=(r, s)`` means ``r`` contravariant indices followed by ``s``
    covariant ones. ``kind`` is ``"form"`` for antisymmetric covariant
    fields (their inner product carries the ``1/s!`` factor) and
    ``"tensor"`` otherwise.
    """

    valence: tuple
    components: Callable
    chart: ChartMetric
    kind: str = "tensor"

    def __call__(self, p):
        return np.asarray(self.components(np.asarray(p, dtype=float)), dtype=float)

    def symmetry_residual(self, p):
        t = self(p)
        if t.ndim != 2:
            raise ValenceMismatch("symmetry check needs a 2-index field")
        return float(np.abs(t - t.T).max() / max(np.abs(t).max(), 1e-300))


# ---------------------------------------------------------------- stencils

_C4 = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}


def stencil_reach(order):
    return 1 if order == 2 else 2


def jet(func, p, step, order=2, second=True):
    """Value, first and (optionally) second partial derivatives of ``func`` at ``p``.

    Returns ``(f, df, ddf)`` with ``df[a] = d_a f`` and ``ddf[a, b] = d_a d_b f``
    stacked in front of the value's own axes.
    """
    p = np.asarray(p, dtype=float)
    m = p.size
    h = float(step)
    eye = np.eye(m) * h
    f0 = np.asarray(func(p), dtype=float)

    def at(*shifts):
        q = p.copy()
        for axis, s in shifts:
            q = q + s * eye[axis]
        return np.asarray(func(q), dtype=float)

    df = np.empty((m,) + f0.shape)
    ddf = np.empty((m, m) + f0.shape) if second else None
    if order == 2:
        for a in range(m):
            fp, fm = at((a, 1)), at((a, -1))
            df[a] = (fp - fm) / (2 * h)
            if second:
                ddf[a, a] = (fp - 2 * f0 + fm) / h**2
        if second:
            for a in range(m):
                for b in range(a + 1, m):
                    v = (at((a, 1), (b, 1)) - at((a, 1), (b, -1))
                         - at((a, -1), (b, 1)) + at((a, -1), (b, -1))) / (4 * h * h)
                    ddf[a, b] = ddf[b, a] = v
    elif order == 4:
        for a in range(m):
            f2, f1, fm1, fm2 = at((a, 2)), at((a, 1)), at((a, -1)), at((a, -2))
            df[a] = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h)
            if second:
                ddf[a, a] = (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
        if second:
            for a in range(m):
                for b in range(a + 1, m):
                    v = sum(ca * cb * at((a, sa), (b, sb))
                            for sa, ca in _C4.items() for sb, cb in _C4.items()) / (h * h)
                    ddf[a, b] = ddf[b, a] = v
    else:
        raise ValueError("order must be 2 or 4")
    return f0, df, ddf


# ---------------------------------------------------------------- metric jets

@dataclass(frozen=True)
class MetricJet:
    g: np.ndarray
    ginv: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray

    @property
    def dgamma(self):
        """``dgamma[a, k, i, j] = d_a Gamma^k_ij``."""
        gl = 0.5 * (np.einsum("ijl->lij", self.dg) + np.einsum("jil->lij", self.dg) - self.dg)
        dgl = 0.5 * (np.einsum("aijl->alij", self.ddg) + np.einsum("ajil->alij", self.ddg) - self.ddg)
        dginv = -np.einsum("kp,apq,ql->akl", self.ginv, self.dg, self.ginv)
        return np.einsum("akl,lij->akij", dginv, gl) + np.einsum("kl,alij->akij", self.ginv, dgl)


def _resolve_step(chart, step, p=None):
    if step is not None:
        return float(step)
    return chart.default_step if p is None else chart.step_at(p)


def _resolve_order(chart, order):
    return getattr(chart, "stencil_order", 2) if order is None else int(order)


def _invert(g, p):
    try:
        w = np.linalg.eigvalsh(0.5 * (g + g.T))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SingularMetric(str(exc)) from exc
    if w.min() <= 1e-14 * max(abs(w).max(), 1e-300):
        raise SingularMetric(f"metric not positive definite at {np.asarray(p).tolist()} (eigenvalues {w.min():.3g}..{w.max():.3g})")
    return np.linalg.inv(g)


def metric_jet(chart, p, step=None, order=None):
    """Metric, inverse, first/second derivatives, Christoffel symbols and Riemann tensor at ``p``."""
    h = _resolve_step(chart, step, p)
    order = _resolve_order(chart, order)
    chart.require(p, 2 * stencil_reach(order) * h)
    g, dg, ddg = jet(chart, p, h, order)
    ginv = _invert(g, p)
    gamma, riem = kernels.riemann_from_jet(ginv, dg, ddg)
    return MetricJet(g, ginv, dg, ddg, gamma, riem)


def christoffel(chart, p, step=None, order=None):
    """``Gamma^k_ij`` at ``p`` as an array indexed ``[k, i, j]``."""
    h = _resolve_step(chart, step, p)
    order = _resolve_order(chart, order)
    chart.require(p, 2 * h * stencil_reach(order))
    g, dg, _ = jet(chart, p, h, order, second=False)
    ginv = _invert(g, p)
    gl = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", ginv, gl)


def bundle_from_jet(mj):
    ric = np.einsum("jl,ijkl->ik", mj.ginv, mj.riemann)
    ric = 0.5 * (ric + ric.T)
    scalar = float(np.einsum("ik,ik->", mj.ginv, ric))
    return CurvatureBundle(mj.gamma, mj.riemann, ric, scalar, mj.g, mj.ginv)


def curvature(chart, p, step=None, order=None):
    """Full curvature bundle at ``p``; margin ``4*step`` is required."""
    h = _resolve_step(chart, step, p)
    order = _resolve_order(chart, order)
    chart.require(p, 4 * h * stencil_reach(order))
    return bundle_from_jet(metric_jet(chart, p, h, order))


def ring_r(riemann, ginv, h):
    """``R̊(h)_ij = g^kp g^lq R_ikjl h_pq``."""
    return np.einsum("kp,lq,ikjl,pq->ij", ginv, ginv, riemann, h)


# ---------------------------------------------------------------- covariant derivatives

def _slot_terms(gamma_a, t, r):
    """Connection correction for one derivative direction.

    ``gamma_a[k, i]`` is ``Gamma^k_{a i}``; returns the sum over slots of
    ``+Gamma t`` on upper slots and ``-Gamma t`` on lower slots.
    """
    out = np.zeros_like(t)
    for slot in range(t.ndim):
        moved = np.moveaxis(t, slot, 0)
        if slot < r:
            corr = np.tensordot(gamma_a, moved, axes=([1], [0]))
            out += np.moveaxis(corr, 0, slot)
        else:
            corr = np.tensordot(gamma_a.T, moved, axes=([1], [0]))
            out -= np.moveaxis(corr, 0, slot)
    return out


def covariant_from_jets(gamma, t, dt, r):
    """``(∇T)[a, ...] = ∇_a T`` from Christoffel symbols and the partials of ``T``."""
    m = gamma.shape[0]
    out = np.array(dt, copy=True)
    for a in range(m):
        out[a] += _slot_terms(gamma[:, a, :], t, r)
    return out


def covariant_derivative(field, p, step=None, order=None, mj=None):
    """``∇T`` at ``p``; the new covariant index is axis 0 of the result.

    The result has valence ``(r, s+1)`` with the derivative slot first.
    """
    chart = field.chart
    h = _resolve_step(chart, step, p)
    order = _resolve_order(chart, order)
    chart.require(p, 2 * h * stencil_reach(order))
    t, dt, _ = jet(field, p, h, order, second=False)
    gamma = christoffel(chart, p, h, order) if mj is None else mj.gamma
    return covariant_from_jets(gamma, t, dt, field.valence[0])


def second_covariant(mj, t, dt, ddt):
    """``[b, a, ...] = ∇_b ∇_a T`` for a fully covariant ``T`` given its jets."""
    gamma, dgamma = mj.gamma, mj.dgamma
    m = gamma.shape[0]
    s = t.ndim
    nabla = covariant_from_jets(gamma, t, dt, 0)          # [a, I]
    # partial_b of nabla: d_b d_a T - sum_slots (d_b Gamma^p_{a i} T_p + Gamma^p_{a i} d_b T_p)
    d_nabla = np.array(ddt, copy=True)                      # [b, a, I]
    for b in range(m):
        for a in range(m):
            d_nabla[b, a] += _slot_terms(dgamma[b, :, a, :], t, 0)
            d_nabla[b, a] += _slot_terms(gamma[:, a, :], dt[b], 0)
    out = np.array(d_nabla)
    for b in range(m):
        # correction on every slot of nabla (the a slot and the tensor slots)
        out[b] += _slot_terms(gamma[:, b, :], nabla, 0)
    del s
    return out


# ---------------------------------------------------------------- inner products

def _as_array(x, p):
    if isinstance(x, TensorField):
        return x(p), x.valence, x.kind
    return np.asarray(x, dtype=float), None, None


def inner(chart, p, t1, t2, valence=None, form=None):
    """Metric inner product of two tensors at ``p``.

    Accepts :class:`TensorField` instances or plain arrays (then ``valence``
    defaults to fully covariant). Upper indices are lowered with ``g`` and
    lower ones raised with ``g^-1``. For ``form=True`` the full contraction
    is divided by ``s!``.
    """
    a, va, ka = _as_array(t1, p)
    b, vb, kb = _as_array(t2, p)
    if va is not None and vb is not None and tuple(va) != tuple(vb):
        raise ValenceMismatch(f"valences {va} and {vb} differ")
    if a.shape != b.shape:
        raise ValenceMismatch(f"shapes {a.shape} and {b.shape} differ")
    v = va or vb or valence or (0, a.ndim)
    if sum(v) != a.ndim:
        raise ValenceMismatch(f"valence {v} does not match rank {a.ndim}")
    if form is None:
        form = "form" in (ka, kb)
    g = chart(p)
    ginv = _invert(g, p)
    x = b
    for slot in range(a.ndim):
        mat = g if slot < v[0] else ginv
        x = np.moveaxis(np.tensordot(mat, np.moveaxis(x, slot, 0), axes=([1], [0])), 0, slot)
    val = float(np.sum(a * x))
    if form:
        val /= float(np.prod(np.arange(1, a.ndim + 1)))
    return val


def norm(chart, p, t, **kw):
    return float(np.sqrt(max(inner(chart, p, t, t, **kw), 0.0)))
