"""Observable statistics of a reading: means, spreads, x-p correlation, energy.

Position and momentum statistics come straight from (rho, J) through the
local substitutions

    psi* x^n psi        = x^n rho
    psi* grad psi       = grad(rho)/2 + (i m / hbar) J
    psi* lap psi        = sqrt(rho) lap sqrt(rho) + (i m / hbar) grad J - (m/hbar)^2 J^2 / rho

so a recorded reading needs no wavefunction for them. Operators that need
higher derivatives (the Hamiltonian) act on the reconstructed wavefunction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ParameterError, ResolutionError, TailDecayError
from .grid import NATURAL_UNITS, UnitSystem
from .state import Reading, WaveFunction, reconstruct_wavefunction

# Densities below the smallest normal double are treated as exact zeros.
DENSITY_FLOOR = np.finfo(float).tiny
# The J^2/rho integrand must fall below this fraction of its peak on the last
# EDGE_POINTS points at each end of the grid.
FLUX_DECAY_TOL = 1e-10
EDGE_POINTS = 10
CORR_IMAG_RTOL = 5e-3

UNITS = {
    "mean_x": "length", "mean_p": "momentum", "var_x": "length^2", "var_p": "momentum^2",
    "std_x": "length", "std_p": "momentum", "corr_xp_re": "length*momentum",
    "corr_xp_im": "length*momentum", "mean_H": "energy", "var_H": "energy^2", "std_H": "energy",
}


@dataclass(frozen=True)
class ParameterSet:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    corr_xp: complex
    label: str
    mean_H: float | None = None
    var_H: float | None = None

    def __post_init__(self):
        for name in ("var_x", "var_p", "var_H"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")

    @property
    def std_x(self) -> float:
        return math.sqrt(self.var_x)

    @property
    def std_p(self) -> float:
        return math.sqrt(self.var_p)

    @property
    def std_H(self) -> float | None:
        return None if self.var_H is None else math.sqrt(self.var_H)

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping; each field has a ``<name>_unit`` companion."""
        values = {
            "mean_x": self.mean_x, "mean_p": self.mean_p, "var_x": self.var_x, "var_p": self.var_p,
            "std_x": self.std_x, "std_p": self.std_p,
            "corr_xp_re": self.corr_xp.real, "corr_xp_im": self.corr_xp.imag,
            "mean_H": self.mean_H, "var_H": self.var_H, "std_H": self.std_H,
        }
        out = {"label": self.label}
        for key, value in values.items():
            out[key] = None if value is None else float(value)
            out[key + "_unit"] = UNITS[key]
        return out


@dataclass(frozen=True)
class OperatorSpec:
    """``-(hbar^2/2m) d^2/dx^2`` (if ``kinetic``) plus ``sum_n c_n x^n``."""

    potential: tuple = ()
    kinetic: bool = True

    def __post_init__(self):
        if len(self.potential) > 5:
            raise ParameterError("potential polynomial degree is capped at 4")

    @classmethod
    def oscillator(cls, omega: float, units: UnitSystem = NATURAL_UNITS) -> "OperatorSpec":
        return cls((0.0, 0.0, 0.5 * units.mass * omega ** 2), kinetic=True)


# -- position ---------------------------------------------------------------

def position_moment(reading: Reading, order: int = 1) -> float:
    if order not in (1, 2, 3, 4):
        raise ValueError("order must be 1..4")
    return float(reading.grid.integrate(reading.grid.x ** order * reading.rho))


def mean_position(reading: Reading) -> float:
    return position_moment(reading, 1)


def position_variance(reading: Reading) -> float:
    x = reading.grid.x - mean_position(reading)
    return float(reading.grid.integrate(x * x * reading.rho))


# -- momentum ---------------------------------------------------------------

def mean_momentum(reading: Reading, units: UnitSystem = NATURAL_UNITS) -> float:
    """``m * integral(J)``; the grad(rho) term integrates to zero."""
    return float(units.mass * reading.grid.integrate(reading.current))


def flux_integrand(reading: Reading) -> np.ndarray:
    """``J^2 / rho`` with decay and underflow checks.

    Raises :class:`TailDecayError` if the integrand is still above
    ``FLUX_DECAY_TOL`` of its peak on the outermost ``EDGE_POINTS`` points
    where rho has not underflowed, and :class:`DivergenceError` if in
    addition J is nonzero where rho has underflowed, so that widening the
    grid cannot help.
    """
    rho, current = reading.rho, reading.current
    dead = rho <= DENSITY_FLOOR
    q = np.zeros_like(rho)
    q[~dead] = (current[~dead] / np.sqrt(rho[~dead])) ** 2
    peak = q.max()
    live = np.flatnonzero(~dead)
    tail = max(q[live[:EDGE_POINTS]].max(), q[live[-EDGE_POINTS:]].max()) if live.size else 0.0
    decayed = tail <= FLUX_DECAY_TOL * peak
    # J beyond the underflow of rho is harmless only once the integrand has died out
    if np.any(dead & (current != 0)) and not decayed:
        raise DivergenceError("flux decay check: current is nonzero where the density vanishes "
                              "and J^2/rho has not decayed; the integral diverges")
    if peak > 0 and not decayed:
        raise TailDecayError(f"flux decay check: J^2/rho at the grid edge is {tail / peak:.3e} of its peak")
    return q


def upper_laplacian(f: np.ndarray, grid) -> np.ndarray:
    """Second-order Laplacian ``(3 D2(h) - D2(2h)) / 2`` with a one-signed error.

    ``D2(s)`` is the three-point stencil with step ``s``. The blend has
    truncation error ``-(h^2/24) f^(4)``, so ``-int f lap f`` exceeds
    ``int (f')^2`` by ``(h^2/24) int (f'')^2 >= 0``. The kinetic term is
    therefore never underestimated and minimum-uncertainty states show no
    spurious violation of the uncertainty bound. ``D2(h)`` alone has an
    error twice as large and of the opposite sign. The two points at each
    edge use the grid stencil.
    """
    narrow = grid.second_derivative(f)
    wide = narrow.copy()
    wide[2:-2] = (f[4:] - 2 * f[2:-2] + f[:-4]) / (4 * grid.dx ** 2)
    return 1.5 * narrow - 0.5 * wide


def momentum_second_moment(reading: Reading, units: UnitSystem = NATURAL_UNITS) -> float:
    """``<p^2> = -hbar^2 int sqrt(rho) lap sqrt(rho) + m^2 int J^2/rho``.

    The Laplacian is :func:`upper_laplacian`, second order in ``dx``.
    """
    grid = reading.grid
    amplitude = np.sqrt(reading.rho)
    shape_term = -units.hbar ** 2 * grid.integrate(amplitude * upper_laplacian(amplitude, grid))
    flux_term = units.mass ** 2 * grid.integrate(flux_integrand(reading))
    return float(shape_term + flux_term)


def momentum_variance(reading: Reading, units: UnitSystem = NATURAL_UNITS) -> float:
    var = momentum_second_moment(reading, units) - mean_momentum(reading, units) ** 2
    if var < 0:
        raise ResolutionError(f"negative momentum variance {var:.3e}")
    return var


def correlation_xp(reading: Reading, units: UnitSystem = NATURAL_UNITS) -> complex:
    """``<(x - <x>) psi | (p - <p>) psi>`` for ``psi = sqrt(rho) exp(i Phi)``.

    Evaluated through ``psi* grad psi = grad(rho)/2 + (i m/hbar) J``, which is
    the same integrand as on the reconstructed wavefunction but needs no phase.
    """
    grid = reading.grid
    dx_ = grid.x - mean_position(reading)
    p_mean = mean_momentum(reading, units)
    real = units.mass * grid.integrate(dx_ * reading.current) - p_mean * grid.integrate(dx_ * reading.rho)
    imag = -0.5 * units.hbar * grid.integrate(dx_ * grid.derivative(reading.rho))
    return complex(real, imag)


def correlation_xp_from_wavefunction(psi: WaveFunction, units: UnitSystem = NATURAL_UNITS) -> complex:
    """Same quantity evaluated with a plain stencil derivative of ``psi``."""
    grid = psi.grid
    rho = psi.density
    x_mean = grid.integrate(grid.x * rho).real
    p_psi = -1j * units.hbar * grid.derivative(psi.values)
    p_mean = grid.integrate(np.conj(psi.values) * p_psi).real
    left = (grid.x - x_mean) * psi.values
    right = p_psi - p_mean * psi.values
    return complex(grid.integrate(np.conj(left) * right))


# -- generic operators --------------------------------------------------------

def apply_operator(psi: WaveFunction, op: OperatorSpec, units: UnitSystem = NATURAL_UNITS,
                   order: int = 4) -> np.ndarray:
    grid = psi.grid
    out = np.zeros_like(psi.values)
    if op.kinetic:
        out += -units.hbar ** 2 / (2 * units.mass) * grid.second_derivative(psi.values, order=order)
    if op.potential:
        out += np.polynomial.polynomial.polyval(grid.x, op.potential) * psi.values
    return out


def operator_mean_and_variance(psi: WaveFunction, op: OperatorSpec, units: UnitSystem = NATURAL_UNITS,
                               order: int = 4) -> tuple[float, float]:
    """Mean ``<psi|A psi>`` and variance ``||(A - <A>) psi||^2``.

    The variance is the squared norm of the shifted operator applied to the
    state, so it never suffers the cancellation of ``<A^2> - <A>^2``. The
    Laplacian uses the five-point stencil unless ``order=2``.
    """
    grid = psi.grid
    norm = psi.norm()
    a_psi = apply_operator(psi, op, units, order)
    mean = grid.integrate(np.conj(psi.values) * a_psi) / norm
    if abs(mean.imag) > 1e-8 * max(1.0, abs(mean.real)):
        raise ResolutionError(f"operator expectation has imaginary part {mean.imag:.3e}")
    residual = a_psi - mean.real * psi.values
    variance = float(grid.integrate(np.abs(residual) ** 2) / norm)
    return float(mean.real), variance


# -- aggregate --------------------------------------------------------------

def parameter_set(reading: Reading, units: UnitSystem = NATURAL_UNITS, omega: float | None = None) -> ParameterSet:
    """All first- and second-order statistics of a reading.

    With ``omega`` the oscillator energy mean and variance are added, computed
    on the wavefunction reconstructed from the reading.
    """
    corr = correlation_xp(reading, units)
    if abs(corr.imag - units.hbar / 2) > CORR_IMAG_RTOL * units.hbar / 2:
        raise ResolutionError(f"Im C(x,p) = {corr.imag:.6g} departs from hbar/2; grid does not resolve the reading")
    mean_H = var_H = None
    if omega is not None:
        psi = reconstruct_wavefunction(reading, units)
        mean_H, var_H = operator_mean_and_variance(psi, OperatorSpec.oscillator(omega, units), units)
    return ParameterSet(
        mean_x=mean_position(reading),
        mean_p=mean_momentum(reading, units),
        var_x=position_variance(reading),
        var_p=momentum_variance(reading, units),
        corr_xp=corr,
        label=reading.label,
        mean_H=mean_H,
        var_H=var_H,
    )


@dataclass(frozen=True)
class UncertaintyCheck:
    """Margins of ``dx*dp >= |C(x,p)| >= hbar/2``; negative means violated."""

    product: float
    corr_modulus: float
    half_hbar: float
    tol: float = 1e-9
    robertson_margin: float = field(init=False)
    schrodinger_margin: float = field(init=False)
    commutator_margin: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "robertson_margin", self.product - self.half_hbar)
        object.__setattr__(self, "schrodinger_margin", self.product - self.corr_modulus)
        object.__setattr__(self, "commutator_margin", self.corr_modulus - self.half_hbar)

    @property
    def passed(self) -> bool:
        return min(self.robertson_margin, self.schrodinger_margin, self.commutator_margin) >= -self.tol


def check_uncertainty_relations(p: ParameterSet, units: UnitSystem = NATURAL_UNITS, tol: float = 1e-9) -> UncertaintyCheck:
    return UncertaintyCheck(p.std_x * p.std_p, abs(p.corr_xp), units.hbar / 2, tol)
