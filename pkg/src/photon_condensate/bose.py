"""Bose-Einstein populations of a 2D isotropic harmonic trap.

Everything is in reduced units: energies and the chemical potential are
measured in ``k_B T`` and the trap spacing is ``x = hbar*omega / (k_B T)``.
Level ``i`` has energy ``i*x`` and degeneracy ``i + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from ._curves import curvature_knee, max_log_slope
from .errors import ConvergenceError, DomainError

#: Closest approach of the chemical potential to the ground-state energy.
MU_CEILING = -1e-14
#: Relative tolerance on the particle number returned by :func:`solve_mu`.
NUMBER_RTOL = 1e-10


def default_i_max(x: float) -> int:
    # levels beyond 50 k_B T carry less than exp(-50) each
    return max(64, math.ceil(50.0 / x))


@dataclass(frozen=True)
class TrapSpectrum:
    """Discrete level structure of the trap.

    Parameters
    ----------
    x : float
        Level spacing in units of ``k_B T``.
    i_max : int, optional
        Highest level index kept in the sums. Defaults to
        ``max(64, ceil(50 / x))``.
    """

    x: float
    i_max: int = None

    def __post_init__(self):
        if not (math.isfinite(self.x) and self.x > 0):
            raise DomainError(f"level spacing x must be finite and > 0, got {self.x!r}")
        if self.i_max is None:
            object.__setattr__(self, "i_max", default_i_max(self.x))
        elif int(self.i_max) != self.i_max or self.i_max < 1:
            raise DomainError(f"i_max must be a positive integer, got {self.i_max!r}")
        object.__setattr__(self, "i_max", int(self.i_max))

    @property
    def energies(self) -> np.ndarray:
        return self.x * np.arange(self.i_max + 1, dtype=float)

    @property
    def degeneracies(self) -> np.ndarray:
        return np.arange(1, self.i_max + 2, dtype=float)


@dataclass(frozen=True)
class EquilibriumState:
    mu: float
    n_total: float
    n_ground: float
    level_populations: np.ndarray = field(repr=False)

    @property
    def condensate_fraction(self) -> float:
        return self.n_ground / self.n_total


class CondensateCurve(NamedTuple):
    n_total: np.ndarray
    n_ground: np.ndarray
    mu: np.ndarray


def _as_spectrum(spec) -> TrapSpectrum:
    return spec if isinstance(spec, TrapSpectrum) else TrapSpectrum(float(spec))


def be_occupancy(eps_reduced, mu):
    """Mean occupancy ``1 / (exp(eps - mu) - 1)`` of a single state.

    Accepts scalars or arrays. Raises :class:`DomainError` wherever
    ``mu >= eps_reduced``.
    """
    eps = np.asarray(eps_reduced, dtype=float)
    mu_arr = np.asarray(mu, dtype=float)
    arg = eps - mu_arr
    if np.any(~(arg > 0)):
        raise DomainError("chemical potential must lie strictly below the state energy")
    with np.errstate(over="ignore"):
        f = 1.0 / np.expm1(arg)
    return float(f) if f.ndim == 0 else f


def total_number(spec, mu: float) -> float:
    """Expected particle number summed over all trap levels."""
    spec = _as_spectrum(spec)
    if not mu < 0:
        raise DomainError(f"chemical potential must be < 0, got {mu!r}")
    return kernels.bose_sums(spec.x, float(mu), spec.i_max)[0]


def level_populations(spec, mu: float) -> np.ndarray:
    """Expected number in each level (degeneracy included)."""
    spec = _as_spectrum(spec)
    if not mu < 0:
        raise DomainError(f"chemical potential must be < 0, got {mu!r}")
    with np.errstate(over="ignore"):
        return spec.degeneracies / np.expm1(spec.energies - mu)


def critical_number(spec) -> float:
    """Total number at threshold, ``(pi^2 / 6) / x^2``."""
    x = _as_spectrum(spec).x
    return (math.pi ** 2 / 6.0) / (x * x)


def _state(spec: TrapSpectrum, mu: float) -> EquilibriumState:
    pops = level_populations(spec, mu)
    n_total = kernels.bose_sums(spec.x, mu, spec.i_max)[0]
    return EquilibriumState(mu=mu, n_total=n_total, n_ground=float(pops[0]),
                            level_populations=pops)


def solve_mu(spec, n_target: float, *, rtol: float = NUMBER_RTOL,
             max_iter: int = 200) -> EquilibriumState:
    """Chemical potential giving ``n_target`` particles in the trap.

    The root is found in ``t = log(-mu)`` with Newton steps safeguarded by a
    bisection bracket; ``log N`` is close to linear in ``t`` on both the
    dilute and the condensed side.

    Raises
    ------
    DomainError
        If ``n_target`` is not positive and finite.
    ConvergenceError
        If ``n_target`` exceeds the number representable with
        ``mu >= MU_CEILING`` or the iteration does not converge.
    """
    spec = _as_spectrum(spec)
    if not (math.isfinite(n_target) and n_target > 0):
        raise DomainError(f"n_target must be positive and finite, got {n_target!r}")
    x, i_max = spec.x, spec.i_max
    log_target = math.log(n_target)

    def residual(t):
        mu = -math.exp(t)
        total, deriv = kernels.bose_sums(x, mu, i_max)
        if total <= 0.0:
            return -math.inf, 0.0, total
        return math.log(total) - log_target, deriv * mu / total, total

    t_lo = math.log(-MU_CEILING)
    f_lo, _, n_max = residual(t_lo)
    if f_lo < 0:
        raise ConvergenceError(
            f"n_target={n_target:g} exceeds the largest representable population "
            f"{n_max:g} at x={x:g}")

    # dilute limit: N ~ exp(mu) / (1 - exp(-x))^2
    mu_guess = log_target + 2.0 * math.log(-math.expm1(-x))
    t_hi = max(t_lo + 1.0, math.log(max(-mu_guess, 1e-14)) + 1.0)
    f_hi = residual(t_hi)[0]
    expand = 0
    while f_hi > 0:
        t_hi += 1.0 + expand
        expand += 1
        f_hi = residual(t_hi)[0]
        if expand > 60:
            raise ConvergenceError(f"could not bracket n_target={n_target:g} at x={x:g}")

    t = min(max(math.log(max(-mu_guess, 1e-14)), t_lo), t_hi)
    tol = math.log1p(rtol) * 0.5
    for _ in range(max_iter):
        f, df, _ = residual(t)
        if abs(f) <= tol:
            return _state(spec, -math.exp(t))
        if f > 0:
            t_lo = t
        else:
            t_hi = t
        step_ok = df < 0 and math.isfinite(f)
        t_new = t - f / df if step_ok else 0.5 * (t_lo + t_hi)
        if not (t_lo < t_new < t_hi):
            t_new = 0.5 * (t_lo + t_hi)
        t = t_new
    raise ConvergenceError(
        f"solve_mu did not converge for n_target={n_target:g}, x={x:g} "
        f"after {max_iter} iterations")


def condensate_curve(spec, n_grid) -> CondensateCurve:
    """Ground-state population along an ascending grid of total numbers."""
    spec = _as_spectrum(spec)
    n_grid = np.asarray(n_grid, dtype=float)
    if n_grid.ndim != 1 or n_grid.size == 0:
        raise DomainError("n_grid must be a non-empty 1D sequence")
    if np.any(~(n_grid > 0)) or np.any(np.diff(n_grid) <= 0):
        raise DomainError("n_grid must be strictly positive and strictly ascending")
    n_ground = np.empty_like(n_grid)
    mu = np.empty_like(n_grid)
    for k, n in enumerate(n_grid):
        try:
            state = solve_mu(spec, float(n))
        except ConvergenceError as exc:
            err = ConvergenceError(f"grid point {k} (n_total={n:g}): {exc}")
            err.index = k
            raise err from exc
        n_ground[k] = state.n_ground
        mu[k] = state.mu
    return CondensateCurve(n_grid.copy(), n_ground, mu)


def knee(curve: CondensateCurve) -> float:
    """Total number at the sharpest bend of ``log n_ground`` vs ``log n_total``."""
    return curvature_knee(curve.n_total, curve.n_ground)


def sharpness(curve: CondensateCurve) -> float:
    """Largest log-log slope ``d log n_ground / d log n_total`` on the grid."""
    return max_log_slope(curve.n_total, curve.n_ground)
