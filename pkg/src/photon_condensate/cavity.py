"""Cavity photons as massive particles in a trap.

A photon in longitudinal mode ``q`` of a short cavity filled with a medium of
index ``n`` behaves, for small transverse momentum ``p``, like a particle with

    E(r, p) = m c*^2 + p^2 / (2 m) + V(r),     c* = c / n,
    m = h n^2 / (c lambda0),                   lambda0 = 2 n L0 / q,
    V(r) / (m c*^2) = -dL(r) / L0,

where ``dL(r) <= 0`` is the local cavity length measured from the longest
point. For a spherical mirror of radius ``R`` facing a plane mirror the
sagitta gives ``dL(r) = -(R - sqrt(R^2 - r^2)) ~ -r^2 / (2R)``, so
``V = m c*^2 r^2 / (2 R L0) = m omega^2 r^2 / 2`` and

    omega = c* / sqrt(R L0).

The rest energy ``m c*^2`` reduces to ``h c / lambda0``, independent of ``n``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bose import critical_number
from .constants import BOLTZMANN, HBAR, PLANCK, SPEED_OF_LIGHT
from .errors import DomainError

DEFAULT_REFRACTIVE_INDEX = 1.44
# R / L0 below this is not treated as a shallow harmonic trap
PARAXIAL_RATIO = 100.0


class ParaxialWarning(UserWarning):
    """A mapping outside its perturbative/paraxial range of validity."""


@dataclass(frozen=True)
class CavityGeometry:
    """Mirror spacing, medium and mirror curvature.

    Give exactly one of ``length_l0`` (on-axis length, m) or
    ``cutoff_lambda0`` (cutoff wavelength, m). ``mirror_radius`` is the
    radius of curvature of the curved mirror (m); ``None`` means planar.
    """

    q: int
    n_refractive: float = DEFAULT_REFRACTIVE_INDEX
    length_l0: float = None
    cutoff_lambda0: float = None
    mirror_radius: float = None
    temperature: float = 300.0

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"q must be a positive integer, got {self.q!r}")
        if not self.n_refractive > 0:
            raise DomainError(f"refractive index must be > 0, got {self.n_refractive!r}")
        if (self.length_l0 is None) == (self.cutoff_lambda0 is None):
            raise DomainError("give exactly one of length_l0 and cutoff_lambda0")
        if self.length_l0 is None:
            if not self.cutoff_lambda0 > 0:
                raise DomainError("cutoff_lambda0 must be > 0")
            object.__setattr__(self, "length_l0",
                               self.q * self.cutoff_lambda0 / (2.0 * self.n_refractive))
        else:
            if not self.length_l0 > 0:
                raise DomainError("length_l0 must be > 0")
            object.__setattr__(self, "cutoff_lambda0",
                               2.0 * self.n_refractive * self.length_l0 / self.q)
        if self.mirror_radius is not None and not self.mirror_radius > 0:
            raise DomainError("mirror_radius must be > 0 (trapping geometry)")
        if not self.temperature > 0:
            raise DomainError("temperature must be > 0")

    @property
    def paraxial(self) -> bool:
        """Whether the mirror is shallow enough for the harmonic mapping."""
        return self.mirror_radius is None or self.mirror_radius > PARAXIAL_RATIO * self.length_l0


@dataclass(frozen=True)
class PhotonParticle:
    mass: float
    cstar: float
    trap_omega: float
    rest_energy: float


def effective_mass(geom: CavityGeometry) -> float:
    """``h n^2 / (c lambda0)`` in kg."""
    return PLANCK * geom.n_refractive ** 2 / (SPEED_OF_LIGHT * geom.cutoff_lambda0)


def intracavity_speed(geom: CavityGeometry) -> float:
    return SPEED_OF_LIGHT / geom.n_refractive


def rest_energy(geom: CavityGeometry) -> float:
    return effective_mass(geom) * intracavity_speed(geom) ** 2


def trap_frequency(geom: CavityGeometry) -> float:
    """Angular trap frequency ``c* / sqrt(R L0)`` in rad/s."""
    if geom.mirror_radius is None:
        raise DomainError("a planar cavity has no trap frequency")
    if not geom.paraxial:
        warnings.warn(f"R/L0 = {geom.mirror_radius / geom.length_l0:.3g} is not >> 1; "
                      "harmonic trap mapping is unreliable", ParaxialWarning, stacklevel=2)
    return intracavity_speed(geom) / math.sqrt(geom.mirror_radius * geom.length_l0)


def reduced_spacing(geom: CavityGeometry) -> float:
    """``hbar omega / (k_B T)``, the trap spacing in thermal units."""
    return HBAR * trap_frequency(geom) / (BOLTZMANN * geom.temperature)


def photon_particle(geom: CavityGeometry) -> PhotonParticle:
    mass = effective_mass(geom)
    cstar = intracavity_speed(geom)
    omega = trap_frequency(geom) if geom.mirror_radius is not None else 0.0
    return PhotonParticle(mass=mass, cstar=cstar, trap_omega=omega, rest_energy=mass * cstar ** 2)


def spherical_length_profile(mirror_radius: float, exact: bool = True):
    """Length deviation ``dL(r)`` of a spherical mirror relative to its centre.

    With ``exact=False`` the quadratic sagitta ``-r^2 / (2R)`` is returned.
    """
    R = float(mirror_radius)
    if exact:
        def delta_l(r):
            r = np.asarray(r, dtype=float)
            # R - sqrt(R^2 - r^2) without cancellation
            return -(r * r) / (R + np.sqrt((R - r) * (R + r)))
    else:
        def delta_l(r):
            r = np.asarray(r, dtype=float)
            return -(r * r) / (2.0 * R)
    return delta_l


def potential_from_length_profile(geom: CavityGeometry, delta_l):
    """Potential energy (J) generated by the length profile ``delta_l(r)``.

    ``delta_l`` returns the signed deviation of the local cavity length from
    the longest point, so it is ``<= 0`` and the potential ``>= 0``.
    A :class:`ParaxialWarning` is issued when ``|dL| / L0`` exceeds 0.1.
    """
    scale = rest_energy(geom) / geom.length_l0

    def potential(r):
        dl = np.asarray(delta_l(r), dtype=float)
        if np.any(np.abs(dl) > 0.1 * geom.length_l0):
            warnings.warn("|dL|/L0 > 0.1: perturbative length-to-energy mapping is invalid",
                          ParaxialWarning, stacklevel=2)
        v = -scale * dl
        return float(v) if v.ndim == 0 else v

    return potential


def dispersion_energy(particle: PhotonParticle, p, r=0.0, potential=None):
    """Rest energy plus kinetic ``p^2 / 2m`` plus ``V(r)``, in joules."""
    p = np.asarray(p, dtype=float)
    if np.any(np.abs(p) > 0.3 * particle.mass * particle.cstar):
        warnings.warn("p / (m c*) > 0.3: paraxial dispersion is degraded",
                      ParaxialWarning, stacklevel=2)
    v = 0.0 if potential is None else np.asarray(potential(r), dtype=float)
    e = particle.rest_energy + p * p / (2.0 * particle.mass) + v
    return float(e) if np.ndim(e) == 0 else e


def summary(geom: CavityGeometry) -> dict:
    """Derived quantities of a geometry, keyed by name, in SI units."""
    out = {
        "q": geom.q,
        "n_refractive": geom.n_refractive,
        "L0_m": geom.length_l0,
        "lambda0_m": geom.cutoff_lambda0,
        "mass_kg": effective_mass(geom),
        "cstar_m_per_s": intracavity_speed(geom),
        "rest_energy_J": rest_energy(geom),
        "temperature_K": geom.temperature,
    }
    if geom.mirror_radius is not None:
        omega = trap_frequency(geom)
        x = reduced_spacing(geom)
        out.update({
            "R_m": geom.mirror_radius,
            "omega_rad_per_s": omega,
            "nu_Hz": omega / (2.0 * math.pi),
            "x_reduced": x,
            "N_critical": critical_number(x),
            "paraxial": geom.paraxial,
        })
    return out
