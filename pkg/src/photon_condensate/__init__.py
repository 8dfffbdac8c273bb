"""Photon condensation in dye-filled microcavities.

Equilibrium Bose-Einstein populations of a 2D harmonic trap, the microlaser
rate equations, the mapping between the two, cavity-photon kinematics, a
driven-dissipative Gross-Pitaevskii solver and Kennard-Stepanov thermometry.
"""
from ._accel import backend_name
from .bose import (CondensateCurve, EquilibriumState, TrapSpectrum, condensate_curve,
                   critical_number, knee, sharpness, solve_mu, total_number)
from .cavity import CavityGeometry, ParaxialWarning, trap_frequency
from .comparison import comparison_curves, match_x_to_beta, smallness_report
from .errors import (ConvergenceError, DomainError, InstabilityError, IntegrationError,
                     PhotonCondensateError, SpectrumError)
from .gpe import ComplexField2D, GpeParams, evolve, ground_state
from .microlaser import (MicrolaserParams, MicrolaserState, integrate, steady_state,
                         steady_state_photons, threshold_curve)
from .spectro import SpectrumPair, fit_ks, load_spectra

__version__ = "0.1.0"

__all__ = [
    "backend_name", "CondensateCurve", "EquilibriumState", "TrapSpectrum",
    "condensate_curve", "critical_number", "knee", "sharpness", "solve_mu",
    "total_number", "CavityGeometry", "ParaxialWarning", "trap_frequency",
    "comparison_curves", "match_x_to_beta", "smallness_report", "ConvergenceError",
    "DomainError", "InstabilityError", "IntegrationError", "PhotonCondensateError",
    "SpectrumError", "ComplexField2D", "GpeParams", "evolve", "ground_state",
    "MicrolaserParams", "MicrolaserState", "integrate", "steady_state",
    "steady_state_photons", "threshold_curve", "SpectrumPair", "fit_ks", "load_spectra",
]
