"""Hot inner loops, each with a numba path and a pure-numpy path.

The public names at the bottom of the module point at one implementation or
the other depending on :data:`photon_condensate._accel.USE_NUMBA`. Both
implementations stay importable (``*_numba`` / ``*_numpy``) so tests can
check them against each other and the benchmark can time them.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, njit

# integrate_rate_equations status codes
STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


# --------------------------------------------------------------------------
# Bose-Einstein level sums
# --------------------------------------------------------------------------

def bose_sums_numpy(x, mu, i_max):
    """Return ``(sum_i (i+1) f_i, sum_i (i+1) f_i (1 + f_i))`` for levels ``0..i_max``.

    ``f_i = 1 / (exp(i*x - mu) - 1)``; the second sum is the derivative of
    the first with respect to ``mu``.
    """
    i = np.arange(i_max + 1, dtype=np.float64)
    with np.errstate(over="ignore"):
        f = 1.0 / np.expm1(i * x - mu)
    deg = i + 1.0
    return float(np.sum(deg * f)), float(np.sum(deg * f * (1.0 + f)))


@njit
def bose_sums_numba(x, mu, i_max):
    total = 0.0
    deriv = 0.0
    # high levels first so the small terms are not lost against the ground state
    for i in range(i_max, -1, -1):
        arg = i * x - mu
        if arg > 700.0:
            continue
        f = 1.0 / math.expm1(arg)
        total += (i + 1.0) * f
        deriv += (i + 1.0) * f * (1.0 + f)
    return total, deriv


# --------------------------------------------------------------------------
# Microlaser rate equations, Dormand-Prince 5(4)
# --------------------------------------------------------------------------

def _rate_rhs(p, n, gamma, beta, kappa, pump):
    dp = gamma * beta * n * (p + 1.0) - kappa * p
    dn = pump - gamma * n - gamma * beta * n * p
    return dp, dn


def _make_rate_integrator(_rate_rhs):
    def integrate_rate_equations(gamma, beta, kappa, pump, p0, n0, t_samples,
                                 dt_max, rtol, atol, max_steps):
        """Adaptive Dormand-Prince integration of the single-mode rate equations.

        Steps are clipped so that every time in ``t_samples`` (ascending, first
        entry > 0) is hit exactly. Returns ``(P, N, status, t_fail)`` where ``P``
        and ``N`` hold the state at each sample time.
        """
        a21 = 1.0 / 5.0
        a31, a32 = 3.0 / 40.0, 9.0 / 40.0
        a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
        a51, a52, a53, a54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
        a61, a62, a63, a64, a65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                   49.0 / 176.0, -5103.0 / 18656.0)
        b1, b3, b4, b5, b6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
        e1, e3, e4, e5, e6, e7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                  -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

        n_out = t_samples.shape[0]
        p_out = np.empty(n_out)
        n_arr = np.empty(n_out)

        t = 0.0
        p = p0
        n = n0
        k1p, k1n = _rate_rhs(p, n, gamma, beta, kappa, pump)
        scale = max(gamma, kappa, gamma * beta * (p + n + 1.0), 1e-300)
        h = min(dt_max, 0.01 / scale)
        steps = 0
        idx = 0
        while idx < n_out:
            target = t_samples[idx]
            if steps >= max_steps:
                return p_out, n_arr, STATUS_MAX_STEPS, t
            h_try = min(h, dt_max, target - t)
            if h_try <= 1e-14 * max(1.0, abs(t)):
                if target - t <= 1e-14 * max(1.0, abs(t)):
                    p_out[idx] = p
                    n_arr[idx] = n
                    idx += 1
                    continue
                return p_out, n_arr, STATUS_STEP_UNDERFLOW, t

            hh = h_try
            k2p, k2n = _rate_rhs(p + hh * a21 * k1p, n + hh * a21 * k1n, gamma, beta, kappa, pump)
            k3p, k3n = _rate_rhs(p + hh * (a31 * k1p + a32 * k2p),
                                 n + hh * (a31 * k1n + a32 * k2n), gamma, beta, kappa, pump)
            k4p, k4n = _rate_rhs(p + hh * (a41 * k1p + a42 * k2p + a43 * k3p),
                                 n + hh * (a41 * k1n + a42 * k2n + a43 * k3n),
                                 gamma, beta, kappa, pump)
            k5p, k5n = _rate_rhs(p + hh * (a51 * k1p + a52 * k2p + a53 * k3p + a54 * k4p),
                                 n + hh * (a51 * k1n + a52 * k2n + a53 * k3n + a54 * k4n),
                                 gamma, beta, kappa, pump)
            k6p, k6n = _rate_rhs(p + hh * (a61 * k1p + a62 * k2p + a63 * k3p + a64 * k4p + a65 * k5p),
                                 n + hh * (a61 * k1n + a62 * k2n + a63 * k3n + a64 * k4n + a65 * k5n),
                                 gamma, beta, kappa, pump)
            p_new = p + hh * (b1 * k1p + b3 * k3p + b4 * k4p + b5 * k5p + b6 * k6p)
            n_new = n + hh * (b1 * k1n + b3 * k3n + b4 * k4n + b5 * k5n + b6 * k6n)
            k7p, k7n = _rate_rhs(p_new, n_new, gamma, beta, kappa, pump)

            err_p = hh * (e1 * k1p + e3 * k3p + e4 * k4p + e5 * k5p + e6 * k6p + e7 * k7p)
            err_n = hh * (e1 * k1n + e3 * k3n + e4 * k4n + e5 * k5n + e6 * k6n + e7 * k7n)
            sc_p = atol + rtol * max(abs(p), abs(p_new))
            sc_n = atol + rtol * max(abs(n), abs(n_new))
            err = math.sqrt(0.5 * ((err_p / sc_p) ** 2 + (err_n / sc_n) ** 2))
            steps += 1

            if err <= 1.0:
                t = t + hh
                p = max(p_new, 0.0)
                n = max(n_new, 0.0)
                k1p, k1n = k7p, k7n
                if p != p_new or n != n_new:
                    k1p, k1n = _rate_rhs(p, n, gamma, beta, kappa, pump)
                if abs(t - target) <= 1e-14 * max(1.0, abs(target)):
                    t = target
                    p_out[idx] = p
                    n_arr[idx] = n
                    idx += 1
                factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                # a step clipped by a sample time says nothing about the natural step size
                if hh >= h or factor < 1.0:
                    h = hh * factor
            else:
                h = hh * max(0.2, 0.9 * err ** -0.2)
        return p_out, n_arr, STATUS_OK, t
    return integrate_rate_equations


integrate_rate_equations_py = _make_rate_integrator(_rate_rhs)
# closures over a dispatcher cannot be cached on disk
integrate_rate_equations_numba = njit(cache=False)(_make_rate_integrator(njit(_rate_rhs)))


# --------------------------------------------------------------------------
# GPE position-space substep
# --------------------------------------------------------------------------

def gpe_local_step_numpy(psi, potential, damping, g, gamma_net, gamma_sat, dt, hbar):
    """Exact local update for potential, contact interaction, gain and saturation.

    Solves ``i hbar dpsi/dt = (V + g|psi|^2) psi + i hbar (gamma - Gamma |psi|^2) psi``
    pointwise over ``dt``, with ``gamma`` reduced by ``damping`` (absorbing
    boundary rate) where that array is nonzero. Returns a new array.
    """
    dens0 = psi.real ** 2 + psi.imag ** 2
    rate = gamma_net - damping
    grow = rate * dt
    small = np.abs(grow) < 1e-8
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        # s = (exp(2 rate dt) - 1) / rate, series for tiny rates
        s = np.where(small, 2.0 * dt * (1.0 + grow), np.expm1(2.0 * grow) / np.where(small, 1.0, rate))
    if gamma_sat != 0.0:
        q = gamma_sat * dens0 * s
        integral = np.log1p(q) / (2.0 * gamma_sat)
        amp = np.exp(grow) / np.sqrt(1.0 + q)
    else:
        integral = 0.5 * dens0 * s
        amp = np.exp(grow)
    phase = -(potential * dt + g * integral) / hbar
    return psi * (amp * np.exp(1j * phase))


@njit
def gpe_local_step_numba(psi, potential, damping, g, gamma_net, gamma_sat, dt, hbar):
    out = np.empty_like(psi)
    ny, nx = psi.shape
    for j in range(ny):
        for i in range(nx):
            z = psi[j, i]
            dens0 = z.real * z.real + z.imag * z.imag
            rate = gamma_net - damping[j, i]
            grow = rate * dt
            if abs(grow) < 1e-8:
                s = 2.0 * dt * (1.0 + grow)
            else:
                s = math.expm1(2.0 * grow) / rate
            if gamma_sat != 0.0:
                q = gamma_sat * dens0 * s
                integral = math.log1p(q) / (2.0 * gamma_sat)
                amp = math.exp(grow) / math.sqrt(1.0 + q)
            else:
                integral = 0.5 * dens0 * s
                amp = math.exp(grow)
            phase = -(potential[j, i] * dt + g * integral) / hbar
            out[j, i] = z * amp * complex(math.cos(phase), math.sin(phase))
    return out


if USE_NUMBA:
    bose_sums = bose_sums_numba
    integrate_rate_equations = integrate_rate_equations_numba
    gpe_local_step = gpe_local_step_numba
else:
    bose_sums = bose_sums_numpy
    integrate_rate_equations = integrate_rate_equations_py
    gpe_local_step = gpe_local_step_numpy
