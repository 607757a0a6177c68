"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``."""
import math

import numpy as np


def rk4_hill(a_nodes, a_mid, h):
    """Classical RK4 for z'' = -a(t) z from (1, 0) and (0, 1).

    Returns an ``(n + 1, 4)`` array with columns ``phi, phi', psi, psi'``.
    """
    a_nodes = [float(v) for v in a_nodes]
    a_mid = [float(v) for v in a_mid]
    n = len(a_mid)
    out = np.empty((n + 1, 4))
    out[0] = (1.0, 0.0, 0.0, 1.0)
    for col in (0, 2):
        z = out[0, col]
        w = out[0, col + 1]
        zs = [z]
        ws = [w]
        for i in range(n):
            a0 = a_nodes[i]
            am = a_mid[i]
            a1 = a_nodes[i + 1]
            k1z = w
            k1w = -a0 * z
            k2z = w + 0.5 * h * k1w
            k2w = -am * (z + 0.5 * h * k1z)
            k3z = w + 0.5 * h * k2w
            k3w = -am * (z + 0.5 * h * k2z)
            k4z = w + h * k3w
            k4w = -a1 * (z + h * k3z)
            z = z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            w = w + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            zs.append(z)
            ws.append(w)
        out[:, col] = zs
        out[:, col + 1] = ws
    return out


def winding_sum(fx, fy):
    """Total wrapped angle of the closed polyline ``(fx, fy)`` and its largest step."""
    ang = np.arctan2(np.asarray(fy, dtype=float), np.asarray(fx, dtype=float))
    d = ang - np.roll(ang, 1)
    d = np.where(d > math.pi, d - 2.0 * math.pi, d)
    d = np.where(d <= -math.pi, d + 2.0 * math.pi, d)
    return float(d.sum()), float(np.abs(d).max())
