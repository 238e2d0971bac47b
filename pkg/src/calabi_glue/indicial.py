"""Indicial roots of P0, P1, P2 and P on asymptotically hyperbolic space.

Every branch reduces, for ``f = e^{-δ r}``, to the quadratic
``-δ² + (m-1) δ + c = 0`` whose constant ``c`` is listed in ``CONSTANTS``.
Branch pairing for P1 and P2 follows the boundary-frame computation:
the normal direction ``e^0`` of a one-form sees ``𝒟 − Ric = 2(m−1)`` and
the tangential directions see ``m``; for two-forms the tangential
``e^i ∧ e^j`` see ``4`` and the mixed ``e^i ∧ e^0`` see ``m``.
For P the ODE carries a factor 1/2, so ``c = 2μ`` with ``μ`` the eigenvalue
of the zeroth-order operator.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBranch

BRANCHES = {
    "P0": ("scalar",),
    "P1": ("tangential", "normal"),
    "P2": ("tangential", "mixed"),
    "P": ("V0", "V1", "V2"),
}


def _constant(kind, branch, m):
    table = {
        ("P0", "scalar"): 2 * (m - 1),
        ("P1", "normal"): 2 * (m - 1),
        ("P1", "tangential"): m,
        ("P2", "tangential"): 4,
        ("P2", "mixed"): m,
        ("P", "V0"): 0,
        ("P", "V1"): m,
        ("P", "V2"): 2 * (m - 1),
    }
    if kind == "P0" and branch is None:
        branch = "scalar"
    key = (kind, branch)
    if key not in table:
        raise InvalidBranch(f"branch {branch!r} is not valid for {kind}; choose from {BRANCHES.get(kind)}")
    return table[key]


@dataclass(frozen=True)
class RootPair:
    delta_plus: float
    delta_minus: float
    constant: int

    @property
    def total(self):
        return self.delta_plus + self.delta_minus


def quadratic_constant(kind, branch, m):
    """Constant ``c`` of ``-δ² + (m−1)δ + c``."""
    if kind not in BRANCHES:
        raise InvalidBranch(f"unknown operator kind {kind!r}")
    return _constant(kind, branch, m)


def indicial_roots(kind, branch, m):
    if m < 3:
        raise ValueError(f"dimension m must be >= 3, got {m}")
    c = quadratic_constant(kind, branch, m)
    disc = (m - 1) ** 2 + 4 * c
    s = math.sqrt(disc)
    return RootPair(((m - 1) + s) / 2, ((m - 1) - s) / 2, c)


def all_branches():
    for kind, branches in BRANCHES.items():
        for b in branches:
            yield kind, b


def eigenbundle_constants(kind, m):
    """``[(branch, eigenvalue, quadratic_constant)]`` for the zeroth-order operator of ``kind``."""
    if kind not in BRANCHES:
        raise InvalidBranch(f"unknown operator kind {kind!r}")
    out = []
    for b in BRANCHES[kind]:
        c = _constant(kind, b, m)
        eig = c / 2 if kind == "P" else c
        out.append((b, eig, c))
    return out


def hyperbolic_radial_laplacian(f, r, m, step=1e-4):
    """``f'' + (m−1) coth(r) f'`` for a radial function ``f`` (central differences)."""
    if r <= 0:
        raise ValueError("r must be positive")
    fp = (f(r + step) - f(r - step)) / (2 * step)
    fpp = (f(r + step) - 2 * f(r) + f(r - step)) / step**2
    return fpp + (m - 1) * math.cosh(r) / math.sinh(r) * fp


def model_ode_residual(kind, branch, delta, r, m, mode="limiting"):
    """Residual of ``e^{-δ r}`` in the radial model ODE, divided by ``e^{-δ r}``.

    ``limiting`` uses ``-f'' - (m−1) f' + c f``; ``exact`` keeps ``coth r``.
    For ``kind == "P"`` both are halved, matching ``P = ∇*∇/2 − ...``.
    """
    c = quadratic_constant(kind, branch, m)
    damp = 1.0 if mode == "limiting" else math.cosh(r) / math.sinh(r)
    if mode not in ("limiting", "exact"):
        raise ValueError("mode must be 'limiting' or 'exact'")
    val = -delta**2 + (m - 1) * damp * delta + c
    return 0.5 * val if kind == "P" else val


def coincidences(m):
    """Groups of branches sharing a quadratic, as exact constants."""
    groups = {}
    for kind, b in all_branches():
        groups.setdefault(quadratic_constant(kind, b, m), []).append(f"{kind}-{b}")
    return groups


def root_table(m, kinds=None):
    rows = []
    for kind, b in all_branches():
        if kinds and kind not in kinds:
            continue
        rp = indicial_roots(kind, b, m)
        rows.append({"operator": kind, "branch": b, "constant": rp.constant,
                     "delta_plus": rp.delta_plus, "delta_minus": rp.delta_minus})
    return rows


__all__ = ["BRANCHES", "RootPair", "all_branches", "coincidences", "eigenbundle_constants",
           "hyperbolic_radial_laplacian", "indicial_roots", "model_ode_residual",
           "quadratic_constant", "root_table"]
