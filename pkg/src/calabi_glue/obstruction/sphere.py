"""Unit-sphere volumes, moment identities and Monte Carlo quadrature."""
import math

import numpy as np

from ..errors import InsufficientData, OddDimension


def sphere_volume(m):
    """Total volume ``omega_{m-1}`` of the unit sphere in ``R^m``."""
    return 2.0 * math.pi ** (m / 2) / math.gamma(m / 2)


def _even(m):
    if m % 2 or m < 2:
        raise OddDimension(f"ambient dimension must be even, got {m}")


def sphere_moment2(m):
    """Coefficient ``c`` in ``∫ x^i x^j dS = c δ_ij`` over the unit sphere in ``R^m``."""
    _even(m)
    return sphere_volume(m) / m


def sphere_moment4(m, i, j, k, l):
    """``∫ x^i x^j x^k x^l dS`` (0-based indices)."""
    _even(m)
    d = lambda a, b: 1.0 if a == b else 0.0  # noqa: E731
    pairs = d(k, l) * d(i, j) + d(k, i) * d(l, j) + d(k, j) * d(i, l)
    return sphere_volume(m) / (m * (m + 2)) * pairs


def sphere_nodes(m, count, seed=0, chunk=1 << 18):
    """Yield blocks of uniformly distributed unit vectors.

    Blocks come from independent substreams of ``SeedSequence(seed)``, so the
    result depends only on ``(seed, count)``.
    """
    nchunks = max(1, -(-count // chunk))
    for c, ss in enumerate(np.random.SeedSequence(seed).spawn(nchunks)):
        size = min(chunk, count - c * chunk)
        x = np.random.default_rng(ss).standard_normal((size, m))
        yield x / np.linalg.norm(x, axis=1, keepdims=True)


def monte_carlo(m, integrand, count, seed=0, min_count=1000):
    """Monte Carlo estimate and standard error of ``∫_{S^{m-1}} f dS``.

    ``integrand`` maps an ``(N, m)`` block of unit vectors to an array whose
    leading axis is ``N``; the estimate has the remaining shape.
    """
    if count < min_count:
        raise InsufficientData(f"quadrature budget {count} below minimum {min_count}")
    total = total_sq = 0.0
    for block in sphere_nodes(m, count, seed):
        f = np.asarray(integrand(block), dtype=float)
        total = total + f.sum(axis=0)
        total_sq = total_sq + (f * f).sum(axis=0)
    vol = sphere_volume(m)
    mean = total / count
    var = np.maximum(total_sq / count - mean**2, 0.0)
    return vol * mean, vol * np.sqrt(var / count)
