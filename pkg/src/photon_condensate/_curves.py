"""Log-log derivative helpers shared by the threshold/knee locators."""
from __future__ import annotations

import numpy as np

# below this peak curvature the log-log curve is treated as straight
MIN_CURVATURE = 1e-6


def log_derivatives(x, y):
    """First and second derivatives of ``log y`` with respect to ``log x``.

    Uses second-order finite differences on the (possibly nonuniform) grid.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 3:
        raise ValueError("need at least 3 grid points")
    slope = np.gradient(ly, lx)
    curvature = np.gradient(slope, lx)
    return slope, curvature


def curvature_knee(x, y):
    """Grid value of ``x`` where ``d^2 log y / d(log x)^2`` is largest.

    Returns ``nan`` for a curve without a bend (a power law, e.g. ``P = rho``).
    """
    _, curvature = log_derivatives(x, y)
    k = int(np.argmax(curvature))
    if not curvature[k] > MIN_CURVATURE:
        return float("nan")
    return float(np.asarray(x)[k])


def max_log_slope(x, y):
    slope, _ = log_derivatives(x, y)
    return float(slope.max())


def crossing(x, y, level):
    """First ``x`` at which ``y`` reaches ``level``, log-log interpolated.

    Returns ``nan`` if ``y`` never reaches it on the grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    above = np.nonzero(y >= level)[0]
    if above.size == 0:
        return float("nan")
    k = int(above[0])
    if k == 0:
        return float(x[0])
    lx0, lx1 = np.log(x[k - 1]), np.log(x[k])
    ly0, ly1 = np.log(y[k - 1]), np.log(y[k])
    frac = (np.log(level) - ly0) / (ly1 - ly0)
    return float(np.exp(lx0 + frac * (lx1 - lx0)))
