"""Single-mode microlaser rate equations.

    dP/dt = gamma*beta*N*(P + 1) - kappa*P
    dN/dt = R_p - gamma*N - gamma*beta*N*P

with ``P`` the mode population, ``N`` the number of molecular excitations,
``gamma`` the total spontaneous emission rate, ``beta`` the fraction of it
going into the mode, ``kappa`` the cavity loss rate and ``R_p`` the pump
rate. Re-absorption, saturation and fluctuations are not modelled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import kernels
from ._curves import crossing, curvature_knee
from .errors import DomainError, IntegrationError

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


def purcell_beta(f_p: float) -> float:
    """Spontaneous-emission fraction ``F_P / (1 + F_P)`` for Purcell factor ``F_P``."""
    if not f_p >= 0:
        raise DomainError(f"Purcell factor must be >= 0, got {f_p!r}")
    if math.isinf(f_p):
        return 1.0
    return f_p / (1.0 + f_p)


@dataclass(frozen=True)
class MicrolaserParams:
    beta: float
    gamma: float = 1.0
    kappa: float = 1.0
    pump_rate: float = 0.0

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta!r}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be > 0, got {self.gamma!r}")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise DomainError(f"kappa must be > 0, got {self.kappa!r}")
        if not (self.pump_rate >= 0 and math.isfinite(self.pump_rate)):
            raise DomainError(f"pump_rate must be >= 0, got {self.pump_rate!r}")

    @property
    def rho(self) -> float:
        """Pump rate in units of the cavity loss rate."""
        return self.pump_rate / self.kappa

    @classmethod
    def from_rho(cls, beta, rho, gamma=1.0, kappa=1.0):
        return cls(beta=beta, gamma=gamma, kappa=kappa, pump_rate=rho * kappa)


@dataclass(frozen=True)
class MicrolaserState:
    photons: float
    excitations: float
    time: float = 0.0

    def __post_init__(self):
        if not (self.photons >= 0 and self.excitations >= 0):
            raise DomainError("photon and excitation numbers must be >= 0")


class Trajectory(NamedTuple):
    time: np.ndarray
    photons: np.ndarray
    excitations: np.ndarray

    def states(self) -> Iterator[MicrolaserState]:
        for t, p, n in zip(self.time, self.photons, self.excitations):
            yield MicrolaserState(float(p), float(n), float(t))

    @property
    def final(self) -> MicrolaserState:
        return MicrolaserState(float(self.photons[-1]), float(self.excitations[-1]),
                               float(self.time[-1]))


def photons_from_rho(beta, rho):
    """Positive root of ``beta P^2 + (1 - beta rho) P - beta rho = 0``.

    Vectorised over ``beta`` and ``rho``. Below threshold (``beta rho < 1``)
    the root is evaluated as ``2 beta rho / (b + D)`` to avoid cancellation.
    """
    beta = np.asarray(beta, dtype=float)
    rho = np.asarray(rho, dtype=float)
    b = 1.0 - beta * rho
    disc = np.hypot(b, 2.0 * beta * np.sqrt(rho))
    with np.errstate(invalid="ignore", divide="ignore"):
        below = 2.0 * beta * rho / (b + disc)
        above = (disc - b) / (2.0 * beta)
    p = np.where(b > 0, below, above)
    return float(p) if p.ndim == 0 else p


def steady_state_photons(params: MicrolaserParams) -> float:
    return photons_from_rho(params.beta, params.rho)


def steady_state_excitations(params: MicrolaserParams) -> float:
    p = steady_state_photons(params)
    return params.pump_rate / (params.gamma * (1.0 + params.beta * p))


def steady_state(params: MicrolaserParams) -> MicrolaserState:
    return MicrolaserState(steady_state_photons(params), steady_state_excitations(params))


def rates(params: MicrolaserParams, photons, excitations):
    """Time derivatives ``(dP/dt, dN/dt)`` at the given populations."""
    g, b = params.gamma, params.beta
    dp = g * b * excitations * (photons + 1.0) - params.kappa * photons
    dn = params.pump_rate - g * excitations - g * b * excitations * photons
    return dp, dn


def integrate(params: MicrolaserParams, initial: MicrolaserState, t_end: float,
              dt_max: float, *, n_samples: int = 201, rtol: float = DEFAULT_RTOL,
              atol: float = DEFAULT_ATOL, max_steps: int = 10_000_000) -> Trajectory:
    """Integrate the rate equations from ``initial`` to ``initial.time + t_end``.

    Uses an embedded Dormand-Prince 5(4) pair with steps no longer than
    ``dt_max``. The trajectory is reported at ``n_samples`` equally spaced
    times including both ends.

    Raises
    ------
    IntegrationError
        On step-size underflow or when ``max_steps`` is exhausted; the
        exception's ``time`` attribute is the absolute failure time.
    """
    if not t_end > 0:
        raise DomainError(f"t_end must be > 0, got {t_end!r}")
    if not dt_max > 0:
        raise DomainError(f"dt_max must be > 0, got {dt_max!r}")
    if n_samples < 2:
        raise DomainError("n_samples must be >= 2")
    offsets = np.linspace(0.0, t_end, n_samples)
    p, n, status, t_stop = kernels.integrate_rate_equations(
        float(params.gamma), float(params.beta), float(params.kappa),
        float(params.pump_rate), float(initial.photons), float(initial.excitations),
        offsets[1:], float(dt_max), float(rtol), float(atol), int(max_steps))
    if status == kernels.STATUS_STEP_UNDERFLOW:
        t_fail = initial.time + t_stop
        raise IntegrationError(f"step size underflow at t={t_fail:.6g} (stiff system?)",
                               time=t_fail)
    if status == kernels.STATUS_MAX_STEPS:
        t_fail = initial.time + t_stop
        raise IntegrationError(f"step budget of {max_steps} exhausted at t={t_fail:.6g}",
                               time=t_fail)
    photons = np.concatenate(([initial.photons], p))
    excitations = np.concatenate(([initial.excitations], n))
    return Trajectory(initial.time + offsets, photons, excitations)


def threshold_curve(beta: float, rho_grid):
    """Steady-state mode population on an ascending grid of pump rates.

    Returns ``(rho, P)`` arrays.
    """
    if not 0 < beta <= 1:
        raise DomainError(f"beta must lie in (0, 1], got {beta!r}")
    rho = np.asarray(rho_grid, dtype=float)
    if rho.ndim != 1 or np.any(~(rho > 0)) or np.any(np.diff(rho) <= 0):
        raise DomainError("rho_grid must be strictly positive and strictly ascending")
    return rho.copy(), photons_from_rho(beta, rho)


def locate_threshold(rho, photons, convention: str = "curvature") -> float:
    """Pump rate at threshold under one of two conventions.

    ``"curvature"`` picks the grid point of largest ``d^2 log P / d(log rho)^2``;
    ``"unity"`` interpolates where ``P`` first reaches 1 (``nan`` if never).
    """
    if convention == "curvature":
        return curvature_knee(rho, photons)
    if convention == "unity":
        return crossing(rho, photons, 1.0)
    raise ValueError(f"unknown threshold convention {convention!r}")
