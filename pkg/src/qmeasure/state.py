"""Wavefunctions, readings (rho, J) and reconstruction of a wavefunction from a reading."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DivergenceError, DomainError, GridMismatchError, NormalizationError, ParameterError
from .grid import NATURAL_UNITS, Grid, UnitSystem, make_grid

NORM_TOL = 1e-6
# Relative density below which J/rho is treated as zero during phase reconstruction.
TAIL_THRESHOLD = 1e-12
INTRINSIC, RECORDED = "I", "R"


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise GridMismatchError("wavefunction length does not match grid")
        if not np.all(np.isfinite(values)):
            raise ValueError("wavefunction has non-finite samples")
        object.__setattr__(self, "values", values)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(self.grid.integrate(self.density))


@dataclass(frozen=True, eq=False)
class Reading:
    """Probability density and current on one grid, labelled I or R."""

    grid: Grid
    rho: np.ndarray
    current: np.ndarray
    label: str = INTRINSIC

    def __post_init__(self):
        rho = np.asarray(self.grid.check(self.rho), dtype=float)
        current = np.asarray(self.grid.check(self.current), dtype=float)
        if self.label not in (INTRINSIC, RECORDED):
            raise ValueError(f"label must be 'I' or 'R', got {self.label!r}")
        if np.any(rho < 0):
            raise NormalizationError(f"negative density (min {rho.min():.3e})")
        mass = self.grid.integrate(rho)
        if abs(mass - 1.0) > NORM_TOL:
            raise NormalizationError(f"density integrates to {mass:.9f}, expected 1")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "current", current)

    def relabel(self, label: str) -> "Reading":
        return Reading(self.grid, self.rho, self.current, label)


@dataclass(frozen=True)
class GaussianPacketParams:
    x0: float = 0.0
    alpha: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"packet width alpha must be positive, got {self.alpha}")


def gaussian_packet(params: GaussianPacketParams, grid: Grid, units: UnitSystem = NATURAL_UNITS) -> WaveFunction:
    """Gaussian packet centred at ``x0`` with width ``alpha`` and plane phase ``k*x``."""
    x0, a, k = params.x0, params.alpha, params.k
    if grid.x_min > x0 - 6 * a or grid.x_max < x0 + 6 * a:
        raise DomainError(f"grid [{grid.x_min}, {grid.x_max}] does not cover x0 +/- 6*alpha")
    x = grid.x
    amplitude = (a * np.sqrt(2 * np.pi)) ** -0.5 * np.exp(-((x - x0) ** 2) / (4 * a * a))
    if k == 0:
        values = amplitude.astype(complex)
    else:
        values = amplitude * np.exp(1j * k * x)
    psi = WaveFunction(grid, values)
    norm = psi.norm()
    if abs(norm - 1) > NORM_TOL:
        raise DomainError(f"packet normalization on grid is {norm:.9f}")
    return psi


def oscillator_width(omega: float, units: UnitSystem = NATURAL_UNITS) -> float:
    if not omega > 0:
        raise ParameterError(f"oscillator frequency must be positive, got {omega}")
    return float(np.sqrt(units.hbar / (2 * units.mass * omega)))


def oscillator_ground_state(omega: float, grid: Grid, units: UnitSystem = NATURAL_UNITS) -> WaveFunction:
    alpha = oscillator_width(omega, units)
    return gaussian_packet(GaussianPacketParams(0.0, alpha, 0.0), grid, units)


def phase_gradient(psi: WaveFunction) -> np.ndarray:
    """Gradient of arg(psi) built from local phase increments.

    Each increment ``angle(psi[i+1] * conj(psi[i]))`` lies in (-pi, pi], so the
    result is exact for linear phases up to the grid's Nyquist wavenumber and
    never sees a branch cut.
    """
    v = psi.values
    steps = np.angle(v[1:] * np.conj(v[:-1]))
    phase = np.concatenate(([0.0], np.cumsum(steps)))
    return psi.grid.derivative(phase)


def reading_of(psi: WaveFunction, units: UnitSystem = NATURAL_UNITS, label: str = INTRINSIC) -> Reading:
    """Density ``|psi|**2`` and current ``(hbar/m) |psi|**2 grad(arg psi)``."""
    rho = psi.density
    current = (units.hbar / units.mass) * rho * phase_gradient(psi)
    return Reading(psi.grid, rho, current, label)


def reconstruct_wavefunction(reading: Reading, units: UnitSystem = NATURAL_UNITS,
                             max_phase_gradient: float | None = None) -> WaveFunction:
    """Wavefunction ``sqrt(rho) exp(i Phi)`` whose current reproduces the reading.

    ``Phi`` is the running integral of ``m J / (hbar rho)`` from ``x_min``
    (fixed to zero there). Where rho is below ``TAIL_THRESHOLD * max(rho)`` the
    phase is held constant. ``max_phase_gradient`` defaults to the grid
    Nyquist wavenumber ``pi/dx``; exceeding it above the tail threshold raises
    :class:`DivergenceError`.
    """
    grid = reading.grid
    rho, current = reading.rho, reading.current
    bound = np.pi / grid.dx if max_phase_gradient is None else max_phase_gradient
    live = rho > TAIL_THRESHOLD * rho.max()
    gradient = np.zeros_like(rho)
    gradient[live] = units.mass * current[live] / (units.hbar * rho[live])
    worst = np.abs(gradient).max()
    if worst > bound:
        raise DivergenceError(f"phase gradient {worst:.4g} exceeds bound {bound:.4g} (divergent-phase check)")
    phase = grid.cumulative(gradient)
    return WaveFunction(grid, np.sqrt(rho) * np.exp(1j * phase))


# -- CSV exchange -------------------------------------------------------------

def write_reading_csv(reading: Reading, path, units: UnitSystem = NATURAL_UNITS):
    """Three columns ``x, rho, J``; the header names the unit system."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x [length; hbar={units.hbar!r} mass={units.mass!r}]",
                         f"rho_{reading.label} [1/length]", f"J_{reading.label} [1/time]"])
        for row in zip(reading.grid.x, reading.rho, reading.current):
            writer.writerow([repr(float(v)) for v in row])


def read_reading_csv(path, label: str | None = None) -> Reading:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    if label is None:
        label = RECORDED if header[1].startswith("rho_R") else INTRINSIC
    x = body[:, 0]
    grid = make_grid(x[0], x[-1], len(x))
    if not np.allclose(grid.x, x, rtol=0, atol=1e-9 * grid.length):
        raise DomainError("CSV abscissae are not uniformly spaced")
    return Reading(grid, body[:, 1], body[:, 2], label)
