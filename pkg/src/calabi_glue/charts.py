"""Reference charts with closed-form curvature, used for calibration."""
import numpy as np

from .tensor_core import Box, ChartMetric


def euclidean_chart(m, half_width=10.0):
    eye = np.eye(m)
    return ChartMetric(m, Box(-half_width * np.ones(m), half_width * np.ones(m)),
                       lambda p: eye, 1.0, "euclidean")


def round_sphere_metric(angles):
    """Diagonal of the round metric on ``S^k`` in hyperspherical angles ``(psi_1, ..., psi_k)``."""
    k = len(angles)
    diag = np.ones(k)
    s = 1.0
    for i in range(1, k):
        s *= np.sin(angles[i - 1]) ** 2
        diag[i] = s
    return diag


def warped_polar_chart(m, warp, r_range, name, angle_margin=0.2):
    """``dr^2 + warp(r)^2 g_{S^{m-1}}`` in coordinates ``(r, psi_1, ..., psi_{m-1})``."""
    lo = [r_range[0]] + [angle_margin] * (m - 2) + [-np.pi + angle_margin]
    hi = [r_range[1]] + [np.pi - angle_margin] * (m - 2) + [np.pi - angle_margin]

    def components(p):
        d = np.empty(m)
        d[0] = 1.0
        d[1:] = warp(p[0]) ** 2 * round_sphere_metric(p[1:])
        return np.diag(d)

    # fourth order keeps coth-type symbols within 1e-6 at the default step
    return ChartMetric(m, Box(lo, hi), components, 1.0, name, stencil_order=4)


def sphere_polar_chart(m):
    """Unit round ``S^m``: ``dr^2 + sin(r)^2 g_{S^{m-1}}``, away from the poles."""
    return warped_polar_chart(m, np.sin, (0.2, np.pi - 0.2), f"round S^{m}")


def hyperbolic_polar_chart(m, r_max=8.0):
    """Hyperbolic space ``dr^2 + sinh(r)^2 g_{S^{m-1}}``."""
    return warped_polar_chart(m, np.sinh, (0.1, r_max), f"hyperbolic H^{m}")


def warped_christoffel(m, warp, dwarp, p):
    """Closed-form Christoffel symbols of a warped polar chart at ``p``."""
    r, ang = p[0], p[1:]
    k = m - 1
    diag_s = round_sphere_metric(ang)
    gam = np.zeros((m, m, m))
    f, fp = warp(r), dwarp(r)
    for i in range(k):
        a = i + 1
        gam[0, a, a] = -f * fp * diag_s[i]
        gam[a, 0, a] = gam[a, a, 0] = fp / f
    # sphere part: metric diag(s_1..s_k), s_i = prod_{j<i} sin^2 psi_j
    for i in range(k):
        for j in range(i + 1, k):
            # d s_j / d psi_i = s_j * 2 cot(psi_i) for i < j
            a, b = i + 1, j + 1
            cot = np.cos(ang[i]) / np.sin(ang[i])
            gam[a, b, b] = -0.5 * (2 * cot * diag_s[j]) / diag_s[i]
            gam[b, a, b] = gam[b, b, a] = cot
    return gam
