"""Matching the trapped-gas and microlaser models at low population.

In the dilute limit the fraction of trapped particles in the ground state is
``p0(x) = 1 / Z(x)`` with ``Z(x) = sum_i (i+1) exp(-i x) = (1 - exp(-x))^-2``,
while the mode population of the microlaser grows as ``P ~ beta * rho``.
Setting ``p0(x) = beta`` gives ``x = -log(1 - sqrt(beta))``. Both models are
then compared on a shared control axis, total number ``n_total`` on one side
and pump rate ``rho`` on the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import bose
from .errors import DomainError
from .microlaser import photons_from_rho


def low_density_fraction(x):
    """Ground-state fraction ``(1 - exp(-x))^2`` of a dilute trapped gas."""
    x = np.asarray(x, dtype=float)
    p0 = (-np.expm1(-x)) ** 2
    return float(p0) if p0.ndim == 0 else p0


@dataclass(frozen=True)
class MatchedPair:
    beta: float
    x_matched: float
    low_population_slope: float

    @property
    def single_mode(self) -> bool:
        return math.isinf(self.x_matched)


def match_x_to_beta(beta: float) -> MatchedPair:
    """Trap spacing whose dilute ground-state fraction equals ``beta``.

    ``beta = 1`` (or so close that ``sqrt(beta)`` rounds to 1) maps to the
    single-mode limit ``x = inf``.
    """
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta!r}")
    if beta > 1:
        raise DomainError(f"beta must be <= 1, got {beta!r}")
    root = math.sqrt(beta)
    x = math.inf if root >= 1.0 else -math.log1p(-root)
    return MatchedPair(beta=beta, x_matched=x, low_population_slope=low_density_fraction(x))


class Comparison(NamedTuple):
    control: np.ndarray
    laser: np.ndarray
    bec: np.ndarray
    deviation: np.ndarray


def relative_deviation(a, b):
    """``|a - b| / max(a, b, 1)``, well behaved near zero population."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.abs(a - b) / np.maximum(np.maximum(a, b), 1.0)


def comparison_curves(beta: float, control_grid) -> Comparison:
    """Microlaser ``P(rho)`` and matched-trap ``n_ground(n_total)`` on one axis."""
    pair = match_x_to_beta(beta)
    control = np.asarray(control_grid, dtype=float)
    if control.ndim != 1 or np.any(~(control > 0)) or np.any(np.diff(control) <= 0):
        raise DomainError("control_grid must be strictly positive and strictly ascending")
    laser = photons_from_rho(beta, control)
    if pair.single_mode:
        bec = control.copy()
    else:
        bec = bose.condensate_curve(pair.x_matched, control).n_ground
    return Comparison(control.copy(), laser, bec, relative_deviation(laser, bec))


class SmallnessReport(NamedTuple):
    beta: float
    x_matched: float
    mode_count: float
    inverse_beta: float
    ratio: float
    inverse_x: float


def smallness_report(beta: float) -> SmallnessReport:
    """Size parameters of both models for a given ``beta``.

    ``mode_count`` is ``(1/x)^2``, the number of thermally available trap
    modes; ``inverse_x`` is offered as the alternative counterpart of
    ``1/beta``. ``ratio`` is ``mode_count * beta``.
    """
    pair = match_x_to_beta(beta)
    inv_x = 0.0 if pair.single_mode else 1.0 / pair.x_matched
    modes = inv_x ** 2
    return SmallnessReport(beta=beta, x_matched=pair.x_matched, mode_count=modes,
                           inverse_beta=1.0 / beta, ratio=modes * beta, inverse_x=inv_x)
