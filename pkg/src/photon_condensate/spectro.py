"""Kennard-Stepanov (McCumber) analysis of absorption/fluorescence spectra.

For a medium in thermal equilibrium with its vibrational bath, peak-normalised
absorption ``A`` and fluorescence ``F`` satisfy

    A(e) / F(e) = exp((e - e_zpl) / (k_B T)),

so ``log(A/F)`` is a straight line in photon energy ``e`` with slope
``1/(k_B T)`` that crosses zero at the zero-phonon line. The fit here is a
weighted least-squares line with weights ``min(A, F)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import BOLTZMANN_EV, HC_EV_NM
from .errors import SpectrumError
from .io import write_columns, write_key_values

HEADER = ["wavelength_nm", "absorption", "fluorescence"]
DEFAULT_FLOOR = 1e-3
NORMALIZATION_TOL = 1e-6
MIN_POINTS = 10
MIN_R_SQUARED = 0.9


@dataclass(frozen=True)
class SpectrumPair:
    """Peak-normalised spectra on a common ascending wavelength grid (nm)."""

    wavelengths: np.ndarray
    absorption: np.ndarray
    fluorescence: np.ndarray
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        wl = np.asarray(self.wavelengths, dtype=float)
        a = np.asarray(self.absorption, dtype=float)
        f = np.asarray(self.fluorescence, dtype=float)
        object.__setattr__(self, "wavelengths", wl)
        object.__setattr__(self, "absorption", a)
        object.__setattr__(self, "fluorescence", f)
        if not (wl.ndim == a.ndim == f.ndim == 1 and wl.size == a.size == f.size):
            raise SpectrumError("wavelength, absorption and fluorescence must be 1D and equal length")
        if wl.size == 0:
            raise SpectrumError("empty spectrum")
        bad = np.nonzero(np.diff(wl) <= 0)[0]
        if bad.size:
            raise SpectrumError(f"wavelengths must be strictly ascending (row {bad[0] + 2})")
        if not np.all(wl > 0):
            raise SpectrumError("wavelengths must be positive")
        if not self.included.any():
            raise SpectrumError("no fittable points: absorption and fluorescence never "
                                "both exceed the floor")
        for name, arr in (("absorption", a), ("fluorescence", f)):
            if np.any(arr < -NORMALIZATION_TOL):
                raise SpectrumError(f"{name} has negative values")
            if abs(arr.max() - 1.0) > NORMALIZATION_TOL:
                raise SpectrumError(f"{name} is not normalised to its peak (max = {arr.max():.9g})")

    @classmethod
    def from_raw(cls, wavelengths, absorption, fluorescence, floor=DEFAULT_FLOOR):
        """Build a pair after dividing each spectrum by its own peak."""
        a = np.asarray(absorption, dtype=float)
        f = np.asarray(fluorescence, dtype=float)
        if a.max() <= 0 or f.max() <= 0:
            raise SpectrumError("no fittable points: a spectrum has no positive values")
        return cls(wavelengths, a / a.max(), f / f.max(), floor)

    @property
    def included(self) -> np.ndarray:
        """Mask of points where both spectra exceed the floor."""
        return (self.absorption > self.floor) & (self.fluorescence > self.floor)

    @property
    def energies(self) -> np.ndarray:
        """Photon energy in eV for each wavelength."""
        return HC_EV_NM / self.wavelengths


class LogRatio(NamedTuple):
    energy: np.ndarray
    log_ratio: np.ndarray
    weight: np.ndarray


@dataclass(frozen=True)
class KsFit:
    temperature_fit: float
    zpl_energy: float
    zpl_wavelength: float
    r_squared: float
    valid_range: tuple
    slope: float
    intercept: float
    n_points: int


def load_spectra(path, floor: float = DEFAULT_FLOOR) -> SpectrumPair:
    """Read ``wavelength_nm,absorption,fluorescence`` CSV into a validated pair."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SpectrumError("empty file", line=1) from None
        if [h.strip() for h in header] != HEADER:
            raise SpectrumError(f"expected header {','.join(HEADER)!r}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise SpectrumError(f"expected 3 columns, got {len(row)}", line=lineno)
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise SpectrumError(f"cannot parse {row!r} as numbers", line=lineno) from None
            if not all(math.isfinite(v) for v in vals):
                raise SpectrumError("non-finite value", line=lineno)
            if rows and vals[0] <= rows[-1][1][0]:
                raise SpectrumError(
                    f"wavelength {vals[0]:g} does not increase (first offending row)",
                    line=lineno)
            rows.append((lineno, vals))
    if not rows:
        raise SpectrumError("no data rows")
    data = np.array([v for _, v in rows])
    return SpectrumPair(data[:, 0], data[:, 1], data[:, 2], floor)


def ks_log_ratio(pair: SpectrumPair, dos_correction: bool = False) -> LogRatio:
    """``log(A/F)`` against photon energy over the included points.

    Points are returned in ascending energy. With ``dos_correction`` the
    ``e^3`` density-of-states factor of the full McCumber relation is divided
    out, ``log(A e^3 / F)`` referenced to the mean energy; the plain relation
    omits it.
    """
    mask = pair.included
    energy = pair.energies[mask]
    a = pair.absorption[mask]
    f = pair.fluorescence[mask]
    ratio = np.log(a) - np.log(f)
    if dos_correction:
        ratio = ratio + 3.0 * np.log(energy / energy.mean())
    order = np.argsort(energy)
    return LogRatio(energy[order], ratio[order], np.minimum(a, f)[order])


def fit_ks(pair: SpectrumPair, dos_correction: bool = False,
           min_r_squared: float = MIN_R_SQUARED) -> KsFit:
    """Temperature and zero-phonon line from a weighted straight-line fit.

    Raises
    ------
    SpectrumError
        Fewer than ``MIN_POINTS`` included points, a non-positive slope
        (absorption and fluorescence swapped?), or ``r^2 < min_r_squared``.
    """
    lr = ks_log_ratio(pair, dos_correction)
    n = lr.energy.size
    if n < MIN_POINTS:
        raise SpectrumError(f"insufficient points for a fit: {n} < {MIN_POINTS}")
    w = lr.weight
    e0 = np.average(lr.energy, weights=w)
    # centred abscissa keeps the normal equations well conditioned
    slope, intercept_c = np.polyfit(lr.energy - e0, lr.log_ratio, 1, w=np.sqrt(w))
    if not slope > 0:
        raise SpectrumError(f"non-physical slope {slope:.4g} /eV: spectra look swapped")
    intercept = intercept_c - slope * e0
    model = intercept + slope * lr.energy
    ybar = np.average(lr.log_ratio, weights=w)
    ss_res = np.sum(w * (lr.log_ratio - model) ** 2)
    ss_tot = np.sum(w * (lr.log_ratio - ybar) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < min_r_squared:
        raise SpectrumError(f"poor Kennard-Stepanov fit: r^2 = {r2:.4f} < {min_r_squared}")
    zpl = e0 - intercept_c / slope
    wl = HC_EV_NM / lr.energy
    return KsFit(
        temperature_fit=float(1.0 / (BOLTZMANN_EV * slope)),
        zpl_energy=float(zpl),
        zpl_wavelength=float(HC_EV_NM / zpl),
        r_squared=float(r2),
        valid_range=(float(wl.min()), float(wl.max())),
        slope=float(slope),
        intercept=float(intercept),
        n_points=int(n),
    )


def crossing_wavelength(pair: SpectrumPair) -> float:
    """Wavelength where the normalised spectra cross (linear interpolation).

    Takes the sign change of ``A - F`` nearest the fluorescence peak.
    """
    diff = pair.absorption - pair.fluorescence
    idx = np.nonzero(np.sign(diff[:-1]) * np.sign(diff[1:]) <= 0)[0]
    if idx.size == 0:
        raise SpectrumError("spectra do not cross")
    peak = int(np.argmax(pair.fluorescence))
    k = int(idx[np.argmin(np.abs(idx - peak))])
    d0, d1 = diff[k], diff[k + 1]
    frac = 0.0 if d0 == d1 else d0 / (d0 - d1)
    return float(pair.wavelengths[k] + frac * (pair.wavelengths[k + 1] - pair.wavelengths[k]))


def synthetic_pair(temperature=300.0, zpl_nm=545.0, width_ev=0.05, wavelengths=None,
                   noise=0.0, seed=None, floor=DEFAULT_FLOOR) -> SpectrumPair:
    """Mirror-image Gaussian spectra obeying the Kennard-Stepanov relation exactly.

    Absorption and fluorescence are Gaussians in energy of equal width
    ``width_ev`` placed symmetrically about the zero-phonon line, separated by
    the Stokes shift ``width_ev^2 / (k_B T)``. Their peak-normalised ratio is
    then exactly ``exp((e - e_zpl) / (k_B T))``. Optional multiplicative
    Gaussian noise of relative size ``noise`` is applied before normalisation.
    """
    if wavelengths is None:
        wavelengths = np.linspace(480.0, 640.0, 321)
    wl = np.asarray(wavelengths, dtype=float)
    e = HC_EV_NM / wl
    e_zpl = HC_EV_NM / zpl_nm
    half_shift = 0.5 * width_ev ** 2 / (BOLTZMANN_EV * temperature)
    fluo = np.exp(-0.5 * ((e - e_zpl + half_shift) / width_ev) ** 2)
    absn = np.exp(-0.5 * ((e - e_zpl - half_shift) / width_ev) ** 2)
    if noise:
        rng = np.random.default_rng(seed)
        fluo = np.clip(fluo * (1.0 + noise * rng.standard_normal(fluo.shape)), 0.0, None)
        absn = np.clip(absn * (1.0 + noise * rng.standard_normal(absn.shape)), 0.0, None)
    return SpectrumPair.from_raw(wl, absn, fluo, floor)


def write_spectra(pair: SpectrumPair, path) -> None:
    write_columns(path, {"wavelength_nm": pair.wavelengths,
                         "absorption": pair.absorption,
                         "fluorescence": pair.fluorescence})


def write_fit(fit: KsFit, pair: SpectrumPair, report_path, points_path,
              dos_correction: bool = False) -> None:
    """Key-value report plus ``energy_eV, log_ratio, fit_line`` points CSV."""
    write_key_values(report_path, [
        ("temperature_K", fit.temperature_fit),
        ("zpl_energy_eV", fit.zpl_energy),
        ("zpl_wavelength_nm", fit.zpl_wavelength),
        ("r_squared", fit.r_squared),
        ("slope_per_eV", fit.slope),
        ("intercept", fit.intercept),
        ("n_points", fit.n_points),
        ("range_min_nm", fit.valid_range[0]),
        ("range_max_nm", fit.valid_range[1]),
        ("dos_correction", dos_correction),
    ])
    lr = ks_log_ratio(pair, dos_correction)
    write_columns(points_path, {"energy_eV": lr.energy, "log_ratio": lr.log_ratio,
                                "fit_line": fit.intercept + fit.slope * lr.energy})
