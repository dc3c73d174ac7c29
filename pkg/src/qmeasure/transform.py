"""Measurement kernels and the intrinsic -> recorded integral transforms.

A kernel is a discretized ``K(x_i, x_j) * dx`` whose rows sum to one. Rows
near the grid edge lose part of the kernel; by default the lost weight is put
back on the diagonal (the response that would leave the grid stays where it
is). For a symmetric profile this keeps every column sum at one as well, so
mass and current integrals are conserved to round-off. ``edge="rescale"``
instead divides each row by its sum.

Stationary (difference-type) kernels keep their one-dimensional profile and
are applied by direct convolution; this is the same sum as the dense matrix
product, in a different order, and it keeps relative accuracy far out in the
tails where the recorded current and density are both tiny.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridMismatchError, NormalizationError, ParameterError, ResolutionError
from .grid import Grid
from .state import RECORDED, Reading

DENSITY, CURRENT = "density", "current"
# exp(-x**2/2) underflows to exactly 0 beyond ~38.6; 40 keeps every nonzero entry.
_CUTOFF_WIDTHS = 40.0
ROW_TOL = 1e-12
EDGE_MODES = ("diagonal", "rescale")
COLUMN_TOL = 1e-6


@dataclass(frozen=True)
class DeviceParams:
    sigma: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.sigma < 0 or self.lam < 0:
            raise ParameterError(f"device widths must be >= 0, got sigma={self.sigma}, lambda={self.lam}")


class Kernel:
    """Discrete measurement kernel acting on fields of one grid.

    Build with :func:`gaussian_kernel`, :func:`identity_kernel`,
    :meth:`from_matrix` or :func:`load_kernel`.
    """

    def __init__(self, grid: Grid, kind: str, width: float | None = None, *,
                 profile=None, matrix=None, edge: str = "diagonal"):
        if kind not in (DENSITY, CURRENT):
            raise ValueError(f"kind must be {DENSITY!r} or {CURRENT!r}")
        if edge not in EDGE_MODES:
            raise ValueError(f"edge must be one of {EDGE_MODES}")
        if (profile is None) == (matrix is None):
            raise ValueError("give exactly one of profile or matrix")
        self.grid, self.kind, self.width = grid, kind, width
        n = grid.n
        if profile is not None:
            profile = np.asarray(profile, dtype=float)
            if profile.ndim != 1 or len(profile) % 2 != 1:
                raise ValueError("profile must have odd length")
            half = len(profile) // 2
            if half > n - 1:
                profile = profile[half - (n - 1): half + n]
            self._profile = profile
            self._matrix = None
            sums = self._convolve(np.ones(n))
            if edge == "rescale":
                self._row_scale, self._diagonal = 1.0 / sums, np.zeros(n)
            else:
                self._row_scale, self._diagonal = np.ones(n), np.clip(1.0 - sums, 0.0, None)
        else:
            matrix = np.array(matrix, dtype=float)
            if matrix.shape != (n, n):
                raise GridMismatchError(f"kernel matrix {matrix.shape} on a grid of {n} points")
            self._profile = None
            self._matrix = matrix
            self._row_scale = self._diagonal = None
        if np.any(self._entries_min() < 0):
            raise NormalizationError("kernel has negative entries")

    @classmethod
    def from_matrix(cls, grid: Grid, matrix, kind: str, width: float | None = None) -> "Kernel":
        return cls(grid, kind, width, matrix=matrix)

    @property
    def stationary(self) -> bool:
        return self._profile is not None

    def _entries_min(self) -> float:
        return self._profile.min() if self.stationary else self._matrix.min()

    def _convolve(self, f: np.ndarray) -> np.ndarray:
        half = len(self._profile) // 2
        return np.convolve(f, self._profile, mode="full")[half: half + len(f)]

    @property
    def weights(self) -> np.ndarray:
        """Dense ``n x n`` matrix (materialized on demand for stationary kernels)."""
        if not self.stationary:
            return self._matrix
        n = self.grid.n
        half = len(self._profile) // 2
        i, j = np.indices((n, n))
        offset = i - j
        dense = np.zeros((n, n))
        band = np.abs(offset) <= half
        dense[band] = self._profile[offset[band] + half]
        dense *= self._row_scale[:, None]
        dense[np.diag_indices(n)] += self._diagonal
        return dense

    @property
    def edge_weight(self) -> np.ndarray:
        """Per-row weight moved onto the diagonal (zeros for dense kernels)."""
        if not self.stationary:
            return np.zeros(self.grid.n)
        return self._diagonal

    def apply(self, f) -> np.ndarray:
        f = self.grid.check(f)
        if self.stationary:
            return self._row_scale * self._convolve(f) + self._diagonal * f
        return self._matrix @ f

    def row_sums(self) -> np.ndarray:
        if self.stationary:
            return self._row_scale * self._convolve(np.ones(self.grid.n)) + self._diagonal
        return self._matrix.sum(axis=1)

    def column_sums(self) -> np.ndarray:
        if self.stationary:
            # profile is symmetric, so the transpose is the same convolution
            return self._convolve(self._row_scale) + self._diagonal
        return self._matrix.sum(axis=0)

    def __repr__(self):
        kind = "stationary" if self.stationary else "dense"
        return f"Kernel({self.kind}, width={self.width}, {kind}, n={self.grid.n})"


def identity_kernel(grid: Grid, kind: str = DENSITY) -> Kernel:
    """Discrete Dirac kernel: application returns its input unchanged."""
    return Kernel(grid, kind, 0.0, profile=np.ones(1))


def gaussian_kernel(grid: Grid, width: float, kind: str = DENSITY, edge: str = "diagonal") -> Kernel:
    """Row-normalized Gaussian kernel of standard deviation ``width``.

    ``width == 0`` gives :func:`identity_kernel`. Widths below two grid
    spacings cannot be represented and raise :class:`ResolutionError`.
    ``edge`` selects how rows cut by the grid boundary are completed (see
    the module docstring).
    """
    if width < 0:
        raise ParameterError(f"kernel width must be >= 0, got {width}")
    if width == 0:
        return identity_kernel(grid, kind)
    dx = grid.dx
    if width < 2 * dx * (1 - 1e-9):
        raise ResolutionError(f"kernel width {width} is below 2*dx = {2 * dx:.4g}")
    half = min(grid.n - 1, int(np.ceil(_CUTOFF_WIDTHS * width / dx)))
    offsets = dx * np.arange(-half, half + 1)
    profile = np.exp(-offsets ** 2 / (2 * width ** 2)) * dx / (width * np.sqrt(2 * np.pi))
    return Kernel(grid, kind, float(width), profile=profile, edge=edge)


def _check_kernel(kernel: Kernel, reading: Reading, kind: str):
    if kernel.kind != kind:
        raise ValueError(f"expected a {kind} kernel, got {kernel.kind}")
    if not kernel.grid.same_as(reading.grid):
        raise GridMismatchError("kernel and reading live on different grids")


def apply_density_transform(G: Kernel, reading: Reading) -> np.ndarray:
    """Recorded density ``G . rho_I``."""
    _check_kernel(G, reading, DENSITY)
    return G.apply(reading.rho)


def apply_current_transform(L: Kernel, reading: Reading) -> np.ndarray:
    """Recorded current ``L . J_I``."""
    _check_kernel(L, reading, CURRENT)
    return L.apply(reading.current)


def measure(reading: Reading, G: Kernel, L: Kernel) -> Reading:
    """Recorded reading produced by the density and current channels."""
    return Reading(reading.grid, apply_density_transform(G, reading),
                   apply_current_transform(L, reading), RECORDED)


@dataclass(frozen=True)
class NormalizationReport:
    """Row/column sum deviations from one.

    ``max_interior_edge_weight`` is the largest diagonal completion on an
    interior row; it measures truncation of the kernel by the grid, which the
    column sums of a completed kernel no longer show.
    """

    max_row_deviation: float
    max_interior_column_deviation: float
    max_interior_edge_weight: float = 0.0
    row_tol: float = ROW_TOL
    column_tol: float = COLUMN_TOL

    @property
    def passed(self) -> bool:
        return (self.max_row_deviation <= self.row_tol
                and self.max_interior_column_deviation <= self.column_tol
                and self.max_interior_edge_weight <= self.column_tol)


def interior_mask(kernel: Kernel) -> np.ndarray:
    """Columns whose column sum is expected to be one.

    The margin from each edge is eight kernel widths, capped at 35% of the
    grid length; for kernels of unknown width it is 10% of the length.
    """
    grid = kernel.grid
    if kernel.width:
        margin = min(8 * kernel.width, 0.35 * grid.length)
    elif kernel.width == 0:
        margin = 0.0
    else:
        margin = 0.1 * grid.length
    x = grid.x
    return (x >= grid.x_min + margin) & (x <= grid.x_max - margin)


def check_normalization(kernel: Kernel, row_tol: float = ROW_TOL, column_tol: float = COLUMN_TOL) -> NormalizationReport:
    rows = np.abs(kernel.row_sums() - 1).max()
    mask = interior_mask(kernel)
    if not mask.any():
        return NormalizationReport(float(rows), np.inf, np.inf, row_tol, column_tol)
    cols = np.abs(kernel.column_sums()[mask] - 1).max()
    edge = kernel.edge_weight[mask].max()
    return NormalizationReport(float(rows), float(cols), float(edge), row_tol, column_tol)


# -- CSV exchange -------------------------------------------------------------

def save_kernel(kernel: Kernel, path):
    """Write the dense matrix; the first row is ``n, dx, kind, width``."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        width = "" if kernel.width is None else repr(float(kernel.width))
        writer.writerow([kernel.grid.n, repr(kernel.grid.dx), kernel.kind, width])
        for row in kernel.weights:
            writer.writerow([repr(float(v)) for v in row])


def load_kernel(path, grid: Grid) -> Kernel:
    """Read a kernel written by :func:`save_kernel` onto ``grid``.

    Rejects files whose ``n``/``dx`` disagree with the grid, and kernels that
    fail :func:`check_normalization`.
    """
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        n, dx, kind, width = next(reader)
        matrix = np.array([row for row in reader], dtype=float)
    if int(n) != grid.n or not np.isclose(float(dx), grid.dx, rtol=1e-9, atol=0):
        raise GridMismatchError(f"kernel file is for n={n}, dx={dx}; grid has n={grid.n}, dx={grid.dx}")
    kernel = Kernel.from_matrix(grid, matrix, kind, float(width) if width else None)
    report = check_normalization(kernel)
    if not report.passed:
        raise NormalizationError(f"loaded kernel fails normalization: {report}")
    return kernel
