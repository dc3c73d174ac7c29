"""Position draws from a reading: one measurement as many detection acts."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientSampleError, ParameterError
from .state import Reading

ALGORITHM = "PCG64"


@dataclass(frozen=True, eq=False)
class SampleSet:
    draws: np.ndarray
    seed: int
    source_label: str
    algorithm: str = ALGORITHM

    @property
    def count(self) -> int:
        return len(self.draws)


def sample_positions(reading: Reading, count: int, seed: int) -> SampleSet:
    """Inverse-transform draws on the trapezoidal cumulative of ``rho``.

    Within a cell the cumulative is interpolated linearly. Identical
    ``(reading, count, seed)`` give bitwise identical draws.
    """
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    grid = reading.grid
    cdf = grid.cumulative(reading.rho)
    cdf /= cdf[-1]
    u = np.random.Generator(np.random.PCG64(seed)).random(count)
    cell = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, grid.n - 2)
    lo, hi = cdf[cell], cdf[cell + 1]
    span = hi - lo
    frac = np.divide(u - lo, span, out=np.full_like(u, 0.5), where=span > 0)
    draws = grid.x[cell] + np.clip(frac, 0.0, 1.0) * grid.dx
    return SampleSet(draws, int(seed), reading.label)


def empirical_parameters(s: SampleSet) -> tuple[float, float, float]:
    """Mean, unbiased standard deviation, and standard error of the mean."""
    if s.count < 2:
        raise InsufficientSampleError("need at least two draws for a standard deviation")
    mean = float(np.mean(s.draws))
    std = float(np.std(s.draws, ddof=1))
    return mean, std, std / math.sqrt(s.count)


def write_samples_csv(s: SampleSet, path, scenario: str = ""):
    """Single column of positions after ``#``-prefixed metadata lines."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# seed={s.seed}\n# count={s.count}\n# scenario={scenario}\n"
                 f"# algorithm={s.algorithm}\n# source={s.source_label}\n")
        writer = csv.writer(fh)
        writer.writerow(["x [length]"])
        writer.writerows([repr(float(v))] for v in s.draws)


def read_samples_csv(path) -> SampleSet:
    meta = {}
    values = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif not line.startswith("x"):
                values.append(float(line))
    return SampleSet(np.array(values), int(meta["seed"]), meta.get("source", "R"),
                     meta.get("algorithm", ALGORITHM))
