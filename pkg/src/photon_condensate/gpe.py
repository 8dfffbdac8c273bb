"""Driven-dissipative Gross-Pitaevskii equation on a periodic 2D grid.

The order parameter obeys

    i hbar dpsi/dt = [V - hbar^2/(2m) lap + g|psi|^2] psi + i hbar (gamma_net - Gamma|psi|^2) psi

with ``gamma_net`` the net gain rate (pump minus loss, 1/s) and ``Gamma`` the
saturation coefficient (m^2/s), so a uniform field relaxes to
``|psi|^2 = gamma_net / Gamma``. The rest energy ``m c*^2`` only adds a global
phase and is left out.

Time stepping is Strang splitting: half a kinetic step in Fourier space, a
full local step in position space, another kinetic half step. The local step
is solved exactly (logistic growth of the density, phase from the integrated
density) by :func:`photon_condensate.kernels.gpe_local_step`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from . import kernels
from .constants import HBAR
from .errors import ConvergenceError, DomainError, InstabilityError
from .io import write_csv, write_pgm

# norm growth that counts as a blow-up in a conservative run
RUNAWAY_FACTOR = 1e6
# fraction of hbar / E_max used as the default time step
DT_FRACTION = 0.01
# residual checks over which imaginary-time relaxation must keep improving
STALL_WINDOW = 10

PotentialLike = Union[None, float, np.ndarray, Callable]


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass
class ComplexField2D:
    """Complex amplitudes on a uniform, periodic, origin-centred grid.

    ``values`` has shape ``(ny, nx)``; point ``(j, i)`` sits at
    ``x = (i - nx/2) dx``, ``y = (j - ny/2) dy``.
    """

    values: np.ndarray
    dx: float
    dy: float

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.ndim != 2:
            raise DomainError("field values must be a 2D array")
        ny, nx = self.values.shape
        if not (_is_pow2(nx) and _is_pow2(ny)):
            raise DomainError(f"grid sizes must be powers of two, got {nx}x{ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise DomainError("grid spacings must be > 0")

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx // 2) * self.dx

    @property
    def y(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.dy

    def mesh(self):
        return np.meshgrid(self.x, self.y)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def density(self) -> np.ndarray:
        return self.values.real ** 2 + self.values.imag ** 2

    @property
    def norm(self) -> float:
        return float(self.density.sum() * self.cell_area)

    def copy(self) -> "ComplexField2D":
        return ComplexField2D(self.values.copy(), self.dx, self.dy)

    @classmethod
    def zeros(cls, nx, ny=None, dx=1.0, dy=None):
        ny = nx if ny is None else ny
        return cls(np.zeros((ny, nx), dtype=np.complex128), dx, dx if dy is None else dy)

    @classmethod
    def from_function(cls, func, nx, ny=None, dx=1.0, dy=None):
        f = cls.zeros(nx, ny, dx, dy)
        X, Y = f.mesh()
        f.values = np.ascontiguousarray(np.broadcast_to(func(X, Y), X.shape), dtype=np.complex128)
        return f

    @classmethod
    def gaussian(cls, nx, width, norm=1.0, ny=None, dx=1.0, dy=None, center=(0.0, 0.0)):
        """Real Gaussian ``exp(-r^2 / (2 width^2))`` scaled to the given norm."""
        def g(X, Y):
            return np.exp(-((X - center[0]) ** 2 + (Y - center[1]) ** 2) / (2.0 * width ** 2))
        f = cls.from_function(g, nx, ny, dx, dy)
        f.values *= math.sqrt(norm / f.norm)
        return f


def harmonic_potential(mass: float, omega: float, offset: float = 0.0):
    """Isotropic ``m omega^2 r^2 / 2 + offset`` as a function of ``(x, y)``."""
    def potential(x, y):
        return 0.5 * mass * omega ** 2 * (x * x + y * y) + offset
    return potential


def radial(func):
    """Adapt a function of ``r`` to the ``(x, y)`` signature used here."""
    def potential(x, y):
        return func(np.hypot(x, y))
    return potential


@dataclass(frozen=True)
class GpeParams:
    """Physical and numerical parameters of a run.

    ``potential`` may be ``None`` (free), a constant, an array matching the
    grid, or a callable ``V(x, y)``. ``hbar`` defaults to the SI value; pass
    ``hbar=1`` together with dimensionless inputs for scaled units.
    ``absorb_width`` cells at each edge get an extra loss rate ramping up to
    ``absorb_rate`` (absorbing boundary); zero disables it.
    """

    mass: float
    potential: PotentialLike = None
    g_interaction: float = 0.0
    gamma_net: float = 0.0
    gamma_sat: float = 0.0
    dt: Optional[float] = None
    t_end: Optional[float] = None
    hbar: float = HBAR
    absorb_width: int = 0
    absorb_rate: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError("mass must be > 0")
        if self.gamma_sat < 0:
            raise DomainError("saturation coefficient must be >= 0")
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt must be > 0")
        if self.t_end is not None and not self.t_end > 0:
            raise DomainError("t_end must be > 0")
        if self.absorb_width < 0 or self.absorb_rate < 0:
            raise DomainError("absorbing boundary width and rate must be >= 0")

    @property
    def conservative(self) -> bool:
        return self.gamma_net == 0.0 and self.gamma_sat == 0.0 and not self.absorbing

    @property
    def absorbing(self) -> bool:
        return self.absorb_width > 0 and self.absorb_rate > 0


class Observables(NamedTuple):
    norm: float
    kinetic: float
    potential: float
    interaction: float
    total: float
    peak_density: float


class Evolution(NamedTuple):
    field: ComplexField2D
    time: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    peak_density: np.ndarray


class _Grid:
    """Potential, wavenumbers and damping sampled once per (field, params)."""

    def __init__(self, fld: ComplexField2D, params: GpeParams):
        self.potential = sample_potential(params.potential, fld)
        kx = 2.0 * np.pi * np.fft.fftfreq(fld.nx, d=fld.dx)
        ky = 2.0 * np.pi * np.fft.fftfreq(fld.ny, d=fld.dy)
        self.k2 = kx[None, :] ** 2 + ky[:, None] ** 2
        self.kinetic = params.hbar ** 2 * self.k2 / (2.0 * params.mass)
        self.damping = absorbing_profile(fld, params)


def sample_potential(potential: PotentialLike, fld: ComplexField2D) -> np.ndarray:
    shape = (fld.ny, fld.nx)
    if potential is None:
        return np.zeros(shape)
    if callable(potential):
        X, Y = fld.mesh()
        v = np.asarray(potential(X, Y), dtype=float)
    else:
        v = np.asarray(potential, dtype=float)
    v = np.ascontiguousarray(np.broadcast_to(v, shape), dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("potential must be finite on the grid")
    return v


def absorbing_profile(fld: ComplexField2D, params: GpeParams) -> np.ndarray:
    """Edge loss rate, quadratic ramp over ``absorb_width`` cells."""
    damp = np.zeros((fld.ny, fld.nx))
    if not params.absorbing:
        return damp
    w = params.absorb_width

    def ramp(n):
        idx = np.arange(n)
        dist = np.minimum(idx, n - 1 - idx)
        return np.where(dist < w, ((w - dist) / w) ** 2, 0.0)

    damp += params.absorb_rate * np.maximum(ramp(fld.ny)[:, None], ramp(fld.nx)[None, :])
    return damp


def default_dt(fld: ComplexField2D, params: GpeParams) -> float:
    """``0.01 hbar / E_max`` with ``E_max`` the largest grid energy scale."""
    grid = _Grid(fld, params)
    e_max = max(grid.kinetic.max(), np.abs(grid.potential).max(),
                abs(params.g_interaction) * fld.density.max(),
                params.hbar * abs(params.gamma_net), 1e-300)
    return DT_FRACTION * params.hbar / e_max


def observables(fld: ComplexField2D, params: GpeParams) -> Observables:
    """Norm, energy contributions and peak density of a field."""
    grid = _Grid(fld, params)
    return _observables(fld, params, grid)


def _observables(fld, params, grid) -> Observables:
    dens = fld.density
    dA = fld.cell_area
    norm = float(dens.sum() * dA)
    psik = np.fft.fft2(fld.values)
    kinetic = float((grid.kinetic * (psik.real ** 2 + psik.imag ** 2)).sum() * dA / dens.size)
    pot = float((grid.potential * dens).sum() * dA)
    inter = float(0.5 * params.g_interaction * (dens * dens).sum() * dA)
    return Observables(norm, kinetic, pot, inter, kinetic + pot + inter,
                       float(dens.max()) if dens.size else 0.0)


def boundary_density_ratio(fld: ComplexField2D) -> float:
    """Largest density on the outermost grid rows/columns over the peak density."""
    dens = fld.density
    peak = dens.max()
    if peak == 0:
        return 0.0
    edge = max(dens[0].max(), dens[-1].max(), dens[:, 0].max(), dens[:, -1].max())
    return float(edge / peak)


def evolve(fld: ComplexField2D, params: GpeParams, *, steps: Optional[int] = None,
           sample_every: int = 10, callback=None) -> Evolution:
    """Advance ``fld`` in real time by split-step integration.

    The number of steps is ``steps`` if given, otherwise ``round(t_end/dt)``.
    ``dt`` defaults to :func:`default_dt`. Observables are recorded every
    ``sample_every`` steps and at the end; ``callback(step, t, field)`` is
    called at the same points. The input field is not modified.

    Raises
    ------
    InstabilityError
        If the field becomes non-finite, or the norm of a conservative run
        grows by more than ``RUNAWAY_FACTOR``.
    """
    grid = _Grid(fld, params)
    dt = params.dt if params.dt is not None else default_dt(fld, params)
    if steps is None:
        if params.t_end is None:
            raise DomainError("give steps or params.t_end")
        steps = max(1, int(round(params.t_end / dt)))
    if sample_every < 1:
        raise DomainError("sample_every must be >= 1")

    hbar = params.hbar
    half_kick = np.exp(-0.5j * grid.kinetic * dt / hbar)
    psi = fld.values.copy()
    work = ComplexField2D(psi, fld.dx, fld.dy)
    conservative = params.conservative
    if params.potential is not None and boundary_density_ratio(fld) > 1e-10 \
            and not params.absorbing:
        warnings.warn("initial density at the grid edge exceeds 1e-10 of the peak; "
                      "periodic images may interact", RuntimeWarning, stacklevel=2)

    times, norms, energies, peaks = [], [], [], []

    def record(step):
        obs = _observables(work, params, grid)
        times.append(step * dt)
        norms.append(obs.norm)
        energies.append(obs.total)
        peaks.append(obs.peak_density)
        if callback is not None:
            callback(step, step * dt, work)
        return obs.norm

    norm0 = record(0)
    for step in range(1, steps + 1):
        psi = np.fft.ifft2(half_kick * np.fft.fft2(psi))
        psi = kernels.gpe_local_step(psi, grid.potential, grid.damping,
                                     params.g_interaction, params.gamma_net,
                                     params.gamma_sat, dt, hbar)
        psi = np.fft.ifft2(half_kick * np.fft.fft2(psi))
        work.values = psi
        if step % sample_every == 0 or step == steps:
            norm = record(step)
            if not math.isfinite(norm):
                raise InstabilityError(f"field became non-finite at step {step}", time=step * dt)
            if conservative and norm0 > 0 and norm > RUNAWAY_FACTOR * norm0:
                raise InstabilityError(
                    f"norm grew by {norm / norm0:.3g}x at step {step}", time=step * dt)
    return Evolution(ComplexField2D(psi, fld.dx, fld.dy), np.array(times),
                     np.array(norms), np.array(energies), np.array(peaks))


def eigen_residual(fld: ComplexField2D, params: GpeParams, grid: Optional[_Grid] = None):
    """Chemical potential ``mu = <H> / N`` and ``||H psi - mu psi|| / (|mu| ||psi||)``.

    ``H`` includes the mean-field term ``g|psi|^2``. The residual vanishes
    for a stationary state.
    """
    grid = _Grid(fld, params) if grid is None else grid
    psi = fld.values
    h_psi = np.fft.ifft2(grid.kinetic * np.fft.fft2(psi)) \
        + (grid.potential + params.g_interaction * fld.density) * psi
    nrm = np.vdot(psi, psi).real
    if nrm == 0:
        return 0.0, 0.0
    mu = np.vdot(psi, h_psi).real / nrm
    res = np.linalg.norm(h_psi - mu * psi) / math.sqrt(nrm)
    return float(mu), float(res / max(abs(mu), 1e-300))


def ground_state(params: GpeParams, norm_target: float, grid: ComplexField2D, *,
                 tol: float = 1e-12, res_tol: float = 1e-8, dtau: Optional[float] = None,
                 max_iter: int = 200_000, check_every: int = 10) -> ComplexField2D:
    """Lowest-energy stationary state at fixed norm, by imaginary-time relaxation.

    ``grid`` fixes the discretisation; its values (moduli) are the starting
    guess unless they vanish, in which case a Gaussian a quarter of the box
    wide is used. Relaxation runs with imaginary time step ``10*dtau`` and
    then ``dtau`` (default ``hbar / E_max``, see :func:`default_dt`). A stage
    ends when the relative energy change per iteration is below ``tol`` and
    the eigen-residual (:func:`eigen_residual`) is below ``res_tol`` or has
    stopped improving (the splitting error of the finite step sets a floor).
    Whenever the energy rises the step is halved for the rest of the run.
    """
    if not params.conservative:
        raise DomainError("ground_state needs conservative parameters (no gain/loss)")
    if not norm_target > 0:
        raise DomainError("norm_target must be > 0")
    if grid.norm > 0:
        start = ComplexField2D(np.abs(grid.values), grid.dx, grid.dy)
    else:
        width = 0.125 * min(grid.nx * grid.dx, grid.ny * grid.dy)
        start = ComplexField2D.gaussian(grid.nx, width, 1.0, grid.ny, grid.dx, grid.dy)
    start.values *= math.sqrt(norm_target / start.norm)

    sampled = _Grid(start, params)
    if dtau is None:
        dtau = default_dt(start, params) / DT_FRACTION
    hbar = params.hbar
    g = params.g_interaction
    dA = start.cell_area

    psi = start.values.real.copy()
    work = ComplexField2D(psi, start.dx, start.dy)
    iters = 0
    cap = math.inf
    for stage_tau in (10.0 * dtau, dtau):
        tau = min(stage_tau, cap)
        half = np.exp(-0.5 * sampled.kinetic * tau / hbar)
        e_prev = _observables(work, params, sampled).total
        history = []
        while True:
            for _ in range(check_every):
                # the mean field is frozen at the start of the step, which
                # makes the fixed point stationary to O(tau^2); evaluating it
                # after the first kinetic half step leaves an O(tau) error
                dens = psi * psi
                psi = np.fft.ifft2(half * np.fft.fft2(psi)).real
                psi = psi * np.exp(-(sampled.potential + g * dens) * tau / hbar)
                psi = np.fft.ifft2(half * np.fft.fft2(psi)).real
                psi *= math.sqrt(norm_target / ((psi * psi).sum() * dA))
            iters += check_every
            work.values = psi
            e_now = _observables(work, params, sampled).total
            _, res = eigen_residual(work, params, sampled)
            scale = max(abs(e_now), 1e-300)
            if iters >= max_iter:
                raise ConvergenceError(
                    f"ground state not converged after {iters} iterations "
                    f"(relative energy change {abs(e_now - e_prev) / scale:.3g}, "
                    f"residual {res:.3g})")
            if e_now > e_prev + 1e-10 * scale:
                # relaxation must lower the energy; a rise means the
                # nonlinear step is too long for the current peak density
                tau *= 0.5
                cap = tau
                half = np.exp(-0.5 * sampled.kinetic * tau / hbar)
                e_prev, history = e_now, []
                continue
            history.append(res)
            # stalled: less than 10% progress over the last STALL_WINDOW checks
            stalled = len(history) > STALL_WINDOW and res > 0.9 * history[-1 - STALL_WINDOW]
            flat = abs(e_now - e_prev) / check_every <= tol * scale
            if flat and (res <= res_tol or stalled):
                break
            e_prev = e_now
    return ComplexField2D(psi.astype(np.complex128), start.dx, start.dy)


def write_field_csv(fld: ComplexField2D, path) -> None:
    """Snapshot as rows ``x, y, re_psi, im_psi``."""
    X, Y = fld.mesh()
    write_csv(path, ["x", "y", "re_psi", "im_psi"],
              zip(X.ravel(), Y.ravel(), fld.values.real.ravel(), fld.values.imag.ravel()))


def write_density_pgm(fld: ComplexField2D, path) -> None:
    write_pgm(path, fld.density)
