"""Gauge tensor H, the contraction ledger, the obstruction λ and the wall classifier."""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .. import kernels
from ..calabi import CalabiParams, cartesian_metric
from ..errors import InsufficientData
from .data import CurvatureData
from .quadratic import QuadraticTensor
from .sphere import sphere_nodes, sphere_volume


def gauge_tensor_H_raw(data):
    """``H_ijkl = −R_ikjl/3 − Λ/(3(n+1)) (δ_ij δ_kl + 2 δ_ik δ_jl)`` before symmetrization."""
    n, m = data.n, data.m
    d = np.eye(m)
    h = -np.einsum("ikjl->ijkl", data.riemann) / 3.0
    h -= data.lam / (3 * (n + 1)) * (np.einsum("ij,kl->ijkl", d, d) + 2 * np.einsum("ik,jl->ijkl", d, d))
    return h


def gauge_tensor_H(data):
    """Quadratic jet of the orbifold metric in Bianchi gauge: ``g_0 = g_euc + H + O(|z|^3)``.

    Satisfies ``B_euc(H) = 0`` and ``−Δ_euc H / 2 = Λ g_euc`` (``H_iikl = −Λ δ_kl``).
    """
    return QuadraticTensor(gauge_tensor_H_raw(data))


# ---------------------------------------------------------------- ledger

LEDGER_NAMES = ("tm1", "tm2", "tm3", "tm4", "tm5", "tm6")


def contraction_ledger(data):
    """The six contractions of the unsymmetrized H, measured and in closed form.

    Returns ``{name: (measured, closed_form)}``.
    """
    n = data.n
    lam = data.lam
    rw = data.kahler_pairing()
    h = gauge_tensor_H_raw(data)
    j = data.J
    measured = {
        "tm1": np.einsum("kkll->", h),
        "tm2": np.einsum("ikik->", h),
        "tm3": np.einsum("ikki->", h),
        "tm4": np.einsum("pk,pl,iikl->", j, j, h),
        "tm5": np.einsum("pk,ql,pqkl->", j, j, h),
        "tm6": np.einsum("pk,ql,qpkl->", j, j, h),
    }
    closed = {}
    for name, (cl, cr) in ledger_coefficients(n).items():
        closed[name] = float(cl) * lam + float(cr) * rw
    return {k: (float(measured[k]), closed[k]) for k in LEDGER_NAMES}


def ledger_coefficients(n):
    """Closed forms of the ledger as exact ``(Λ-coefficient, ⟨Rω,ω⟩-coefficient)`` pairs."""
    f = Fraction
    return {
        "tm1": (f(-2 * n), f(0)),
        "tm2": (f(-(2 * n + 8 * n * n), 3 * (n + 1)), f(0)),
        "tm3": (f(2 * n, 3) - f(2 * n, n + 1), f(0)),
        "tm4": (f(-2 * n), f(0)),
        "tm5": (f(-2 * n, 3 * (n + 1)), f(-1, 3)),
        "tm6": (f(2 * n, 3 * (n + 1)), f(-1, 6)),
    }


def assemble_sphere_integral(tm, n):
    """Full-sphere integral of ``(n+1)⟨H, o_euc⟩`` divided by ``ω_{2n−1}``, from the ledger.

    Works on floats or on exact coefficient pairs (anything supporting ``+`` and
    scalar ``*``); ``tm`` maps ledger names to values.
    """
    def scale(x, c):
        return tuple(c * v for v in x) if isinstance(x, tuple) else c * x

    def add(*xs):
        if isinstance(xs[0], tuple):
            return tuple(sum(v) for v in zip(*xs))
        return sum(xs)

    q = Fraction(1, 4)
    return add(scale(tm["tm1"], Fraction(-(n + 1), 2 * n)),
               scale(add(tm["tm1"], tm["tm2"], tm["tm3"]), q),
               scale(add(tm["tm4"], tm["tm5"], tm["tm6"]), q))


def com8_coefficients(n):
    """``((2−n)/2, −1/8)``: the assembled integral over ``ω_{2n−1}``."""
    return Fraction(2 - n, 2), Fraction(-1, 8)


def bianchi_cyclic_J_identity(data):
    """``|J^p_k J^q_l R_qkpl − ⟨Rω,ω⟩/2|``."""
    j = data.J
    val = np.einsum("pk,ql,qkpl->", j, j, data.riemann)
    return float(abs(val - 0.5 * data.kahler_pairing()))


# ---------------------------------------------------------------- obstruction value

def obstruction_lambda_closed(data):
    """``(ω_{2n−1}/n) ((2−n)Λ/2 − ⟨Rω,ω⟩/8)``: the surface integral in closed form."""
    n = data.n
    return sphere_volume(2 * n) / n * ((2 - n) / 2 * data.lam - data.kahler_pairing() / 8)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    stderr: float
    nodes: int
    radius: float
    rms: float = float("nan")

    def relative_error(self, exact):
        """``|value − exact|`` over the integrand's RMS magnitude, the natural scale of a quadrature rule."""
        err = abs(self.value - exact)
        if self.rms == 0:
            return 0.0 if err == 0 else float("inf")
        return err / self.rms


def obstruction_lambda_bruteforce(data, radius=1.0, nodes=1_000_000, seed=0, min_nodes=10_000):
    """``(1/n) ∫_{S_r} (n+1)/r ⟨H, o_euc⟩ dS`` by Monte Carlo over the full sphere.

    The quotient by the cyclic group is the factor ``1/n``. With the exact
    Euclidean tensors the integrand is radius independent; ``radius`` is kept
    to make that explicit.
    """
    if radius < 1.0:
        raise ValueError("radius must be >= 1")
    if nodes < min_nodes:
        raise InsufficientData(f"quadrature budget {nodes} below minimum {min_nodes}")
    n, m = data.n, data.m
    h = gauge_tensor_H(data).coeffs
    total = total_sq = 0.0
    for block in sphere_nodes(m, nodes, seed):
        s, s2 = kernels.sphere_pairing_sums(h, data.J, n, block)
        total += s
        total_sq += s2
    # on S_r: H scales as r^2, o_euc as r^{-2n}, dS as r^{m-1}, with the 1/r prefactor
    factor = radius**2 * radius ** (-2 * n) * radius ** (m - 1) / radius
    vol = sphere_volume(m)
    mean = total / nodes
    var = max(total_sq / nodes - mean * mean, 0.0)
    scale = factor * vol / n
    return QuadratureResult(scale * mean, scale * np.sqrt(var / nodes), nodes, radius,
                            scale * np.sqrt(total_sq / nodes))


def quadrature_scale(data):
    """Magnitude scale for comparing λ values: the two closed-form terms in absolute value."""
    n = data.n
    return sphere_volume(2 * n) / n * (abs((2 - n) / 2 * data.lam) + abs(data.kahler_pairing()) / 8)


@lru_cache(maxsize=None)
def o_norm2(n, r_max=np.inf):
    """``‖o‖²_{L²}`` over the Calabi space modulo the cyclic group, by radial quadrature.

    The integrand is evaluated from the Cartesian chart (metric, volume density
    and the closed form of o) along one ray; U(n)-invariance does the rest.
    """
    from ..deform_ops import o_closed
    params = CalabiParams(n)
    m = 2 * n

    def integrand(r):
        x = np.zeros(m)
        x[0] = r
        g = cartesian_metric(x, params)
        gi = np.linalg.inv(g)
        o = o_closed(x, params)
        density = np.sqrt(np.linalg.det(g))
        return np.einsum("ia,jb,ab,ij->", gi, gi, o, o) * density * r ** (m - 1)

    val, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
    val2, _ = integrate.quad(integrand, 1.0, r_max, limit=200)
    return sphere_volume(m) / n * (val + val2)


def lambda_normalized(data):
    """``λ = −I / ‖o‖²`` with ``I`` the closed-form surface integral."""
    return -obstruction_lambda_closed(data) / o_norm2(data.n)


# ---------------------------------------------------------------- wall

@dataclass(frozen=True)
class WallVerdict:
    value: float
    classification: str
    tolerance: float
    lambda_closed: float
    ratio: float

    @property
    def obstructed(self):
        return self.classification == "obstructed"


FLOOR = 1e-300


def wall_value(data):
    return data.n * data.kahler_pairing() + 2 * (data.n - 2) * data.scalar


def wall_ratio(n):
    """Fixed constant ``c`` with ``obstruction_lambda_closed = c · wall``: ``−ω_{2n−1}/(8n²)``."""
    return -sphere_volume(2 * n) / (8 * n * n)


def classify_wall(data):
    n = data.n
    a = n * data.kahler_pairing()
    b = 2 * (n - 2) * data.scalar
    value = a + b
    tol = 1e-9 * (abs(a) + abs(b) + FLOOR)
    lam = obstruction_lambda_closed(data)
    ratio = lam / value if value != 0 else float("nan")
    cls = "unobstructed" if abs(value) <= tol else "obstructed"
    return WallVerdict(float(value), cls, float(tol), float(lam), float(ratio))
