"""Uniform 1-D grids, trapezoidal quadrature and finite differences.

Fields are plain numpy arrays sampled at ``grid.x``; the grid owns every
discrete operation so that all modules agree on one notion of integral and
derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate as _integrate

from .errors import DomainError, GridMismatchError, ParameterError

MIN_POINTS = 5


@dataclass(frozen=True)
class UnitSystem:
    """Reduced Planck constant and particle mass. Natural units by default."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ParameterError(f"hbar and mass must be positive, got {self}")


NATURAL_UNITS = UnitSystem()


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``x_i = x_min + i*dx`` for ``i = 0..n-1``."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max):
            raise DomainError("grid bounds must be finite")
        if self.x_max <= self.x_min:
            raise DomainError(f"degenerate domain: x_max={self.x_max} <= x_min={self.x_min}")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise DomainError(f"need an integer n >= {MIN_POINTS}, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n)
        x.flags.writeable = False
        return x

    def check(self, values) -> np.ndarray:
        """Return ``values`` as an array after checking shape and finiteness."""
        values = np.asarray(values)
        if values.shape != (self.n,):
            raise GridMismatchError(f"field of shape {values.shape} on a grid of {self.n} points")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite samples")
        return values

    def same_as(self, other: "Grid") -> bool:
        return self.n == other.n and np.isclose(self.x_min, other.x_min, rtol=0, atol=1e-12 * self.length) \
            and np.isclose(self.x_max, other.x_max, rtol=0, atol=1e-12 * self.length)

    # -- quadrature -------------------------------------------------------

    def integrate(self, f, rule: str = "trapezoid"):
        """Integral of ``f`` over ``[x_min, x_max]``.

        ``rule`` is ``"trapezoid"`` (composite, the default everywhere in the
        package) or ``"simpson"``. Complex fields are supported.
        """
        f = self.check(f)
        if rule == "trapezoid":
            return np.trapezoid(f, dx=self.dx)
        if rule == "simpson":
            return _integrate.simpson(f, dx=self.dx)
        raise ValueError(f"unknown quadrature rule {rule!r}")

    def cumulative(self, f) -> np.ndarray:
        """Running trapezoidal integral from ``x_min``; first entry is 0."""
        f = self.check(f)
        return _integrate.cumulative_trapezoid(f, dx=self.dx, initial=0.0)

    # -- differentiation --------------------------------------------------

    def derivative(self, f, order: int = 2) -> np.ndarray:
        """First derivative by central differences.

        Boundary points use one-sided stencils of second order. ``order=4``
        switches interior points (two away from each edge) to the five-point
        stencil.
        """
        f = self.check(f)
        h = self.dx
        # stencils are written in first differences so constants give exact zeros
        df = np.diff(f)
        d = np.empty_like(f)
        d[1:-1] = (df[1:] + df[:-1]) / (2 * h)
        d[0] = (3 * df[0] - df[1]) / (2 * h)
        d[-1] = (3 * df[-1] - df[-2]) / (2 * h)
        if order == 4:
            d[2:-2] = (8 * (f[3:-1] - f[1:-3]) - (f[4:] - f[:-4])) / (12 * h)
        elif order != 2:
            raise ValueError("order must be 2 or 4")
        return d

    def second_derivative(self, f, order: int = 2) -> np.ndarray:
        """Second derivative; same stencil conventions as :meth:`derivative`."""
        f = self.check(f)
        h2 = self.dx ** 2
        df = np.diff(f)
        d = np.empty_like(f)
        d[1:-1] = (df[1:] - df[:-1]) / h2
        d[0] = (-2 * df[0] + 3 * df[1] - df[2]) / h2
        d[-1] = (2 * df[-1] - 3 * df[-2] + df[-3]) / h2
        if order == 4:
            d[2:-2] = (df[:-3] - 15 * df[1:-2] + 15 * df[2:-1] - df[3:]) / (12 * h2)
        elif order != 2:
            raise ValueError("order must be 2 or 4")
        return d


def make_grid(x_min: float, x_max: float, n: int) -> Grid:
    """Build a uniform grid; raises :class:`DomainError` on degenerate input."""
    return Grid(float(x_min), float(x_max), int(n))


def centered_grid(center: float, half_width: float, n: int) -> Grid:
    return make_grid(center - half_width, center + half_width, n)


def require_same_grid(a: Grid, b: Grid):
    if not a.same_as(b):
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")
