"""Quadratic symmetric tensors ``T_ijkl x^i x^j dx^k dx^l`` on flat ``R^m``."""
from dataclasses import dataclass

import numpy as np

from ..calabi import complex_structure


@dataclass(frozen=True)
class QuadraticTensor:
    """Coefficients symmetrized in ``(i, j)`` and in ``(k, l)`` on construction."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 4 or len(set(c.shape)) != 1:
            raise ValueError("coefficients must be an m x m x m x m array")
        # pairwise sums commute bitwise, so both symmetries hold exactly
        c = c + c.transpose(1, 0, 2, 3)
        c = 0.25 * (c + c.transpose(0, 1, 3, 2))
        object.__setattr__(self, "coeffs", c)

    @property
    def m(self):
        return self.coeffs.shape[0]

    def __call__(self, x):
        """Component matrix ``T_kl(x) = T_ijkl x^i x^j``."""
        x = np.asarray(x, dtype=float)
        return np.einsum("ijkl,i,j->kl", self.coeffs, x, x)

    def __add__(self, other):
        return QuadraticTensor(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return QuadraticTensor(self.coeffs - other.coeffs)

    def __mul__(self, s):
        return QuadraticTensor(self.coeffs * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return QuadraticTensor(-self.coeffs)

    def inner(self, other):
        """Full coefficient contraction ``sum T_ijkl S_ijkl``."""
        other = other.coeffs if isinstance(other, QuadraticTensor) else np.asarray(other)
        return float(np.einsum("ijkl,ijkl->", self.coeffs, other))

    def trace_form(self):
        """``T_ijkk``: coefficients of the Euclidean trace ``tr T(x)``."""
        return np.einsum("ijkk->ij", self.coeffs)

    def trace_position(self):
        """``T_iikl``: ``Δ_euc T = 2 T_iikl dx^k dx^l``."""
        return np.einsum("iikl->kl", self.coeffs)

    def bianchi_euc(self):
        """``b_jl`` with ``B_euc(T) = b_jl x^j dx^l = (−2 T_kjkl + T_jlkk) x^j dx^l``."""
        c = self.coeffs
        return -2.0 * np.einsum("kjkl->jl", c) + np.einsum("jlkk->jl", c)


def ledger_tensors(m, jmat=None):
    """``(P, Q, A)``: ``r²g_euc``, ``r²dr⊗dr`` and ``r⁴θ⊗θ`` as quadratic tensors."""
    d = np.eye(m)
    j = complex_structure(m // 2) if jmat is None else np.asarray(jmat, dtype=float)
    p = np.einsum("ij,kl->ijkl", d, d)
    q = 0.5 * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d))
    a = 0.5 * (np.einsum("ik,jl->ijkl", j, j) + np.einsum("il,jk->ijkl", j, j))
    return QuadraticTensor(p), QuadraticTensor(q), QuadraticTensor(a)


def sigma2_tensor(n):
    """``σ₂ = r²(−dr⊗dr − (2n−1) r²θ⊗θ + g_euc)``."""
    p, q, a = ledger_tensors(2 * n)
    return p - q - (2 * n - 1) * a


def conformal_killing_array(a):
    """``K_ijkl`` in the layout where ``(i, j)`` are the form slots and ``(k, l)`` the position slots."""
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    d = np.eye(m)
    sym = a + a.T
    k = 0.5 * (np.einsum("ij,kl->ijkl", sym, d)
               - m / 2 * (np.einsum("ik,lj->ijkl", d, a) + np.einsum("il,kj->ijkl", d, a))
               - m / 2 * (np.einsum("kj,li->ijkl", d, a) + np.einsum("lj,ki->ijkl", d, a)))
    k -= np.trace(a) * np.einsum("kl,ij->ijkl", d, d) / m
    k += 0.5 * np.einsum("ij,lk->ijkl", d, sym)
    return k


def conformal_killing_quadratic(a):
    """Quadratic tensor ``T`` with ``T(x) = |x|^{m+2} K_euc(α)``, ``α = a_ij x^i dx^j / |x|^m``."""
    return QuadraticTensor(conformal_killing_array(a).transpose(2, 3, 0, 1))
