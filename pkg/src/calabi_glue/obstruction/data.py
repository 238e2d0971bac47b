"""Pointwise orbifold curvature data: validation, built-in models, sampling and file ingestion.

File format (JSON, or YAML when PyYAML is available)::

    {"n": 3, "lambda": 5.0,
     "riemann": [[1, 2, 1, 2, 1.0], ...],   # 1-based [i, j, k, l, value]
     "J": [[...], ...]}                       # optional, defaults to the standard block form

Listed components are spread to all their images under the Riemann symmetries;
everything unlisted is zero.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..calabi import complex_structure
from ..errors import InvalidCurvatureData


@dataclass(frozen=True)
class CurvatureData:
    n: int
    lam: float
    riemann: np.ndarray
    J: np.ndarray = field(default=None)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "riemann", np.asarray(self.riemann, dtype=float))
        j = complex_structure(self.n) if self.J is None else np.asarray(self.J, dtype=float)
        object.__setattr__(self, "J", j)
        validate(self)

    @property
    def m(self):
        return 2 * self.n

    @property
    def kahler_form(self):
        """``ω_ij = g(J e_i, e_j)``."""
        return self.J.T

    @property
    def ricci(self):
        return np.einsum("ijkj->ik", self.riemann)

    @property
    def scalar(self):
        return float(np.einsum("ijij->", self.riemann))

    def kahler_pairing(self):
        """``⟨R(ω), ω⟩ = R_ijkl ω_ij ω_kl``."""
        w = self.kahler_form
        return float(np.einsum("ijkl,ij,kl->", self.riemann, w, w))


def symmetry_violations(r, tol):
    """Name of the first violated algebraic identity, or ``None``."""
    checks = [
        ("antisymmetry in the first index pair (R_ijkl = -R_jikl)", r + r.transpose(1, 0, 2, 3)),
        ("antisymmetry in the second index pair (R_ijkl = -R_ijlk)", r + r.transpose(0, 1, 3, 2)),
        ("pair symmetry (R_ijkl = R_klij)", r - r.transpose(2, 3, 0, 1)),
        ("first Bianchi identity (R_ijkl + R_jkil + R_kijl = 0)",
         r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)),
    ]
    for name, res in checks:
        bad = np.argwhere(np.abs(res) > tol)
        if bad.size:
            idx = tuple(int(i) + 1 for i in bad[0])
            return f"{name} violated at {idx} (residual {np.abs(res).max():.3g})"
    return None


def validate(data, tol=1e-10):
    n = data.n
    if int(n) != n or n < 2:
        raise InvalidCurvatureData(f"n must be an integer >= 2, got {n}")
    m = 2 * n
    r = data.riemann
    if r.shape != (m, m, m, m):
        raise InvalidCurvatureData(f"riemann must have shape {(m,) * 4}, got {r.shape}")
    if not np.all(np.isfinite(r)):
        raise InvalidCurvatureData("riemann contains non-finite entries")
    scale = max(1.0, float(np.abs(r).max()))
    msg = symmetry_violations(r, tol * scale)
    if msg:
        raise InvalidCurvatureData(msg)
    ric = np.einsum("ijkj->ik", r)
    err = np.abs(ric - data.lam * np.eye(m)).max()
    if err > tol * max(1.0, abs(data.lam), scale):
        raise InvalidCurvatureData(f"Einstein condition Ric = lambda g violated (residual {err:.3g})")
    j = data.J
    if j.shape != (m, m):
        raise InvalidCurvatureData(f"J must be {m}x{m}")
    if np.abs(j @ j + np.eye(m)).max() > 1e-10:
        raise InvalidCurvatureData("J does not satisfy J^2 = -I")
    if np.abs(j.T @ j - np.eye(m)).max() > 1e-10:
        raise InvalidCurvatureData("J is not orthogonal")
    j0 = complex_structure(n)
    if np.abs(j @ j0 - j0 @ j).max() > 1e-10:
        raise InvalidCurvatureData("J does not commute with the cyclic group action (not of u(n) block form)")


# ---------------------------------------------------------------- algebra helpers

def kulkarni_nomizu(h, k):
    """``(h ∧ k)_ijkl = h_ik k_jl + h_jl k_ik − h_il k_jk − h_jk k_il``."""
    return (np.einsum("ik,jl->ijkl", h, k) + np.einsum("jl,ik->ijkl", h, k)
            - np.einsum("il,jk->ijkl", h, k) - np.einsum("jk,il->ijkl", h, k))


def project_curvature(x):
    """Project an arbitrary 4-array to the algebraic curvature tensors."""
    r = 0.25 * (x - x.transpose(1, 0, 2, 3) - x.transpose(0, 1, 3, 2) + x.transpose(1, 0, 3, 2))
    r = 0.5 * (r + r.transpose(2, 3, 0, 1))
    b = (r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)) / 3.0
    return r - b


def weyl_part(r):
    m = r.shape[0]
    ric = np.einsum("ijkj->ik", r)
    s = np.trace(ric)
    h = (ric - s / (2 * m - 2) * np.eye(m)) / (m - 2)
    return r - kulkarni_nomizu(h, np.eye(m))


def cyclic_average(r, n):
    """Average over the action of ``z -> e^{2πi/n} z``."""
    jm = complex_structure(n)
    out = np.zeros_like(r)
    for k in range(n):
        t = 2 * np.pi * k / n
        g = np.cos(t) * np.eye(2 * n) + np.sin(t) * jm
        out += np.einsum("ai,bj,ck,dl,abcd->ijkl", g, g, g, g, r)
    return out / n


def einstein_from_weyl(w, lam):
    m = w.shape[0]
    return w + lam / (2 * (m - 1)) * kulkarni_nomizu(np.eye(m), np.eye(m))


# ---------------------------------------------------------------- built-in models

def flat(n):
    m = 2 * n
    return CurvatureData(n, 0.0, np.zeros((m,) * 4), label="flat")


def constant_curvature(c, n):
    """Space form with sectional curvature ``c``; ``Λ = (m−1) c``."""
    m = 2 * n
    r = 0.5 * c * kulkarni_nomizu(np.eye(m), np.eye(m))
    return CurvatureData(n, (m - 1) * c, r, label=f"constant-curvature({c:g})")


def kahler_einstein(scalar, n):
    """Kähler–Einstein model (Fubini–Study type) with the given scalar curvature."""
    m = 2 * n
    d = np.eye(m)
    j = complex_structure(n)
    w = j.T
    base = 0.25 * (0.5 * kulkarni_nomizu(d, d)
                   + np.einsum("ik,jl->ijkl", w, w) - np.einsum("il,jk->ijkl", w, w)
                   + 2 * np.einsum("ij,kl->ijkl", w, w))
    s0 = float(np.einsum("ijij->", base))
    r = base * (scalar / s0) if s0 else base
    return CurvatureData(n, scalar / m, r, label=f"kahler-einstein({scalar:g})")


def random_einstein(n, rng, lam=None, weyl_scale=1.0, cyclic=True):
    """Random Einstein-admissible data: random Weyl part plus ``Λ`` times the unit space form."""
    m = 2 * n
    x = rng.standard_normal((m,) * 4)
    w = weyl_part(project_curvature(x))
    if cyclic:
        w = cyclic_average(w, n)
    w *= weyl_scale / max(np.abs(w).max(), 1e-300)
    lam = float(rng.uniform(-3.0, 3.0)) if lam is None else float(lam)
    return CurvatureData(n, lam, einstein_from_weyl(w, lam), label="random")


BUILTINS = ("flat", "constant-curvature", "kahler-einstein", "football", "hyperbolic")


def builtin(name, n, value=None):
    """Built-in model by name; ``value`` is ``c`` or the scalar curvature where relevant."""
    if name == "flat":
        return flat(n)
    if name == "constant-curvature":
        return constant_curvature(1.0 if value is None else value, n)
    if name == "football":
        return constant_curvature(1.0, n)
    if name == "hyperbolic":
        return constant_curvature(-1.0, n)
    if name == "kahler-einstein":
        return kahler_einstein(1.0 if value is None else value, n)
    raise InvalidCurvatureData(f"unknown builtin model {name!r}; choose from {', '.join(BUILTINS)}")


# ---------------------------------------------------------------- ingestion

_IMAGES = [((0, 1, 2, 3), 1), ((1, 0, 2, 3), -1), ((0, 1, 3, 2), -1), ((1, 0, 3, 2), 1),
           ((2, 3, 0, 1), 1), ((3, 2, 0, 1), -1), ((2, 3, 1, 0), -1), ((3, 2, 1, 0), 1)]


def from_mapping(doc):
    try:
        n = int(doc["n"])
        lam = float(doc["lambda"])
        entries = doc["riemann"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidCurvatureData(f"missing or malformed field: {exc}") from exc
    if n < 2:
        raise InvalidCurvatureData(f"n must be >= 2, got {n}")
    m = 2 * n
    r = np.zeros((m,) * 4)
    seen = np.zeros((m,) * 4, dtype=bool)
    for row in entries:
        if len(row) != 5:
            raise InvalidCurvatureData(f"riemann entry {row!r} is not [i, j, k, l, value]")
        idx = tuple(int(v) - 1 for v in row[:4])
        if any(i < 0 or i >= m for i in idx):
            raise InvalidCurvatureData(f"index out of range in entry {row!r}")
        val = float(row[4])
        for perm, sign in _IMAGES:
            tgt = tuple(idx[p] for p in perm)
            if seen[tgt] and not np.isclose(r[tgt], sign * val, rtol=0, atol=1e-12 * max(1, abs(val))):
                raise InvalidCurvatureData(
                    f"entries conflict under the Riemann symmetries at {tuple(i + 1 for i in tgt)}")
            r[tgt] = sign * val
            seen[tgt] = True
    j = doc.get("J")
    return CurvatureData(n, lam, r, None if j is None else np.asarray(j, dtype=float),
                         label=str(doc.get("label", "file")))


def load_curvature_data(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidCurvatureData(f"cannot read {path}: {exc}") from exc
    if path.suffix in (".yaml", ".yml"):
        import yaml
        doc = yaml.safe_load(text)
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidCurvatureData(f"{path}: not valid JSON ({exc})") from exc
    return from_mapping(doc)


def to_mapping(data):
    """Inverse of :func:`from_mapping`, listing independent nonzero components."""
    m = data.m
    rows = []
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(m):
                for l in range(k + 1, m):
                    if (i, j) <= (k, l) and data.riemann[i, j, k, l] != 0:
                        rows.append([i + 1, j + 1, k + 1, l + 1, float(data.riemann[i, j, k, l])])
    return {"n": data.n, "lambda": data.lam, "riemann": rows, "J": data.J.tolist()}
