"""Hot loops with a numba implementation and a numpy fallback.

Each public function dispatches on :func:`calabi_glue._backend.using_numba`.
Both paths compute the same thing; ``benchmarks/bench_kernels.py`` compares them.
"""
import numpy as np

from . import _backend

if _backend.numba_available():
    import numba as nb

    _njit = nb.njit(cache=True)
    _njit_par = nb.njit(cache=True, parallel=True)
    _prange = nb.prange
else:  # pragma: no cover
    def _njit(f):
        return f

    _njit_par = _njit
    _prange = range


# --------------------------------------------------------------------------
# Christoffel symbols and Riemann tensor from a second-order metric jet
# --------------------------------------------------------------------------

def _riemann_numpy(ginv, dg, ddg):
    # lowered Christoffel: Gl[l,i,j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    gl = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, gl)
    # d_a Gl[l,i,j]
    dgl = 0.5 * (np.einsum("aijl->alij", ddg) + np.einsum("ajil->alij", ddg) - ddg)
    # g_km d_a Gamma^m_jl = d_a Gl[k,j,l] - d_a g_km Gamma^m_jl
    dgam_low = dgl - np.einsum("akm,mjl->akjl", dg, gamma)
    # R_ijkl = <R(d_i, d_j) d_l, d_k>
    #        = g_km (d_i G^m_jl - d_j G^m_il + G^m_ip G^p_jl - G^m_jp G^p_il)
    r = np.einsum("ikjl->ijkl", dgam_low) - np.einsum("jkil->ijkl", dgam_low)
    r += np.einsum("kip,pjl->ijkl", gl, gamma) - np.einsum("kjp,pil->ijkl", gl, gamma)
    return gamma, r


@_njit
def _riemann_numba(ginv, dg, ddg):
    m = ginv.shape[0]
    gl = np.empty((m, m, m))
    for l in range(m):
        for i in range(m):
            for j in range(m):
                gl[l, i, j] = 0.5 * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
    gamma = np.zeros((m, m, m))
    for k in range(m):
        for i in range(m):
            for j in range(m):
                s = 0.0
                for l in range(m):
                    s += ginv[k, l] * gl[l, i, j]
                gamma[k, i, j] = s
    dgam_low = np.empty((m, m, m, m))
    for a in range(m):
        for k in range(m):
            for j in range(m):
                for l in range(m):
                    s = 0.5 * (ddg[a, j, l, k] + ddg[a, l, j, k] - ddg[a, k, j, l])
                    for p in range(m):
                        s -= dg[a, k, p] * gamma[p, j, l]
                    dgam_low[a, k, j, l] = s
    r = np.empty((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    s = dgam_low[i, k, j, l] - dgam_low[j, k, i, l]
                    for p in range(m):
                        s += gl[k, i, p] * gamma[p, j, l] - gl[k, j, p] * gamma[p, i, l]
                    r[i, j, k, l] = s
    return gamma, r


def riemann_from_jet(ginv, dg, ddg):
    """Christoffel symbols and fully lowered Riemann tensor from ``(g^-1, dg, ddg)``.

    ``dg[a, i, j] = d_a g_ij`` and ``ddg[a, b, i, j] = d_a d_b g_ij``.
    Returns ``(gamma[k, i, j], riemann[i, j, k, l])`` with ``R_ijij`` the
    sectional curvature of the coordinate plane (times its area squared).
    """
    ginv = np.ascontiguousarray(ginv, dtype=np.float64)
    dg = np.ascontiguousarray(dg, dtype=np.float64)
    ddg = np.ascontiguousarray(ddg, dtype=np.float64)
    if _backend.using_numba():
        return _riemann_numba(ginv, dg, ddg)
    return _riemann_numpy(ginv, dg, ddg)


# --------------------------------------------------------------------------
# Sphere quadrature of (n+1) <H(x), o_euc(x)> over unit vectors x
# --------------------------------------------------------------------------

def _pairing_numpy(h, jmat, n, nodes, chunk=1 << 16):
    m = h.shape[0]
    hmat = h.reshape(m * m, m * m)
    total = 0.0
    total_sq = 0.0
    eye = np.eye(m).reshape(1, m * m)
    for start in range(0, nodes.shape[0], chunk):
        x = nodes[start:start + chunk]
        jx = x @ jmat.T
        xx = np.einsum("ni,nj->nij", x, x).reshape(-1, m * m)
        hx = xx @ hmat
        o = -eye + n * xx + n * np.einsum("ni,nj->nij", jx, jx).reshape(-1, m * m)
        f = (n + 1) * np.einsum("nk,nk->n", hx, o)
        total += f.sum()
        total_sq += (f * f).sum()
    return total, total_sq


@_njit_par
def _pairing_numba(h, jmat, n, nodes):
    npts = nodes.shape[0]
    m = h.shape[0]
    vals = np.empty(npts)
    for q in _prange(npts):
        x = nodes[q]
        jx = np.empty(m)
        for a in range(m):
            s = 0.0
            for b in range(m):
                s += jmat[a, b] * x[b]
            jx[a] = s
        o = np.empty((m, m))
        for k in range(m):
            for l in range(m):
                o[k, l] = n * (x[k] * x[l] + jx[k] * jx[l])
            o[k, k] -= 1.0
        # H is symmetric in (i, j): visit i <= j once with weight 2 off the diagonal
        f = 0.0
        for i in range(m):
            for j in range(i, m):
                s = 0.0
                for k in range(m):
                    for l in range(m):
                        s += h[i, j, k, l] * o[k, l]
                w = x[i] * x[j]
                f += s * w if i == j else 2.0 * s * w
        vals[q] = (n + 1) * f
    total = 0.0
    total_sq = 0.0
    for q in range(npts):
        total += vals[q]
        total_sq += vals[q] * vals[q]
    return total, total_sq


def sphere_pairing_sums(h, jmat, n, nodes):
    """Sum and sum of squares of ``(n+1) <H(x), o_euc(x)>`` over unit ``nodes``.

    ``H(x)_kl = h_ijkl x^i x^j`` and ``o_euc = -g + n x x + n (Jx)(Jx)`` on the
    unit sphere.
    """
    h = np.ascontiguousarray(h, dtype=np.float64)
    jmat = np.ascontiguousarray(jmat, dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    if _backend.using_numba():
        return _pairing_numba(h, jmat, float(n), nodes)
    return _pairing_numpy(h, jmat, float(n), nodes)
