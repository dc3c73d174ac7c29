"""Error indicators between intrinsic and recorded readings, and entropies."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import LabelMismatchError
from .estimators import ParameterSet
from .state import INTRINSIC, RECORDED, Reading

# Integrand points with rho (or |J|) at or below this contribute zero (0 ln 0 = 0).
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class IndicatorReport:
    d_mean_x: float
    d_mean_p: float
    d_corr: float
    d_std_x: float
    d_std_p: float
    d_mean_H: float | None = None
    d_std_H: float | None = None
    dH: float | None = None
    d_tau: float | None = None

    def with_entropies(self, dH: float, d_tau: float) -> "IndicatorReport":
        return IndicatorReport(**{**asdict(self), "dH": dH, "d_tau": d_tau})

    def epsilon(self, hbar: float = 1.0) -> float:
        """Product of the spread errors in units of hbar."""
        return self.d_std_x * self.d_std_p / hbar

    def to_dict(self) -> dict:
        return {k: (None if v is None else float(v)) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class EntropyPair:
    H: float
    tau: float
    label: str


def _minus_f_log_f(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    live = values > LOG_FLOOR
    out[live] = -values[live] * np.log(values[live])
    return out


def error_indicators(p_I: ParameterSet, p_R: ParameterSet) -> IndicatorReport:
    """Absolute recorded-minus-intrinsic differences; entropy fields left unset."""
    if p_I.label != INTRINSIC or p_R.label != RECORDED:
        raise LabelMismatchError(f"expected labels (I, R), got ({p_I.label}, {p_R.label})")
    d_mean_H = d_std_H = None
    if p_I.mean_H is not None and p_R.mean_H is not None:
        d_mean_H = abs(p_R.mean_H - p_I.mean_H)
        d_std_H = abs(p_R.std_H - p_I.std_H)
    return IndicatorReport(
        d_mean_x=abs(p_R.mean_x - p_I.mean_x),
        d_mean_p=abs(p_R.mean_p - p_I.mean_p),
        d_corr=abs(p_R.corr_xp - p_I.corr_xp),
        d_std_x=abs(p_R.std_x - p_I.std_x),
        d_std_p=abs(p_R.std_p - p_I.std_p),
        d_mean_H=d_mean_H,
        d_std_H=d_std_H,
    )


def positional_entropy(rho, grid) -> float:
    """``-integral(rho ln rho)`` in the working unit system."""
    return float(grid.integrate(_minus_f_log_f(grid.check(rho))))


def motional_entropy(current, grid) -> float:
    """``-integral(|J| ln |J|)``."""
    return float(grid.integrate(_minus_f_log_f(np.abs(grid.check(current)))))


def entropy_pair(reading: Reading) -> EntropyPair:
    return EntropyPair(positional_entropy(reading.rho, reading.grid),
                       motional_entropy(reading.current, reading.grid), reading.label)


def entropy_deltas(reading_I: Reading, reading_R: Reading) -> tuple[float, float]:
    """Signed ``(H_R - H_I, tau_R - tau_I)``."""
    if reading_I.label != INTRINSIC or reading_R.label != RECORDED:
        raise LabelMismatchError("entropy_deltas expects an intrinsic then a recorded reading")
    e_I, e_R = entropy_pair(reading_I), entropy_pair(reading_R)
    return e_R.H - e_I.H, e_R.tau - e_I.tau
