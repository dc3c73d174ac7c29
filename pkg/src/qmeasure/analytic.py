"""Closed-form results for a Gaussian packet seen through Gaussian kernels.

Everything here is exact arithmetic on the packet (x0, alpha, k) and device
(sigma, lambda) parameters; the numerical pipeline is checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidityError
from .estimators import ParameterSet
from .grid import NATURAL_UNITS, UnitSystem
from .indicators import IndicatorReport
from .report import report_body
from .state import GaussianPacketParams, oscillator_width
from .transform import DeviceParams


@dataclass(frozen=True)
class GaussianProfile:
    """``amplitude * N(center, variance)`` evaluated pointwise."""

    center: float
    variance: float
    amplitude: float

    def __call__(self, x):
        return self.amplitude * np.exp(-(x - self.center) ** 2 / (2 * self.variance)) / np.sqrt(2 * np.pi * self.variance)


@dataclass(frozen=True)
class AnalyticReport:
    recorded_density: GaussianProfile
    recorded_current: GaussianProfile
    params_I: ParameterSet
    params_R: ParameterSet
    indicators: IndicatorReport
    entropies: dict
    epsilon: float
    units: UnitSystem

    def to_dict(self) -> dict:
        body = report_body(self.params_I, self.params_R, self.indicators, self.entropies, self.units)
        body["recorded_density"] = vars(self.recorded_density).copy()
        body["recorded_current"] = vars(self.recorded_current).copy()
        return body


def momentum_radicand(alpha: float, sigma: float, lam: float) -> float:
    return alpha ** 4 - lam ** 4 + 2 * sigma ** 2 * (alpha ** 2 + lam ** 2)


def recorded_momentum_variance(packet: GaussianPacketParams, device: DeviceParams,
                               units: UnitSystem = NATURAL_UNITS) -> float:
    a, k = packet.alpha, packet.k
    s2 = a ** 2 + device.sigma ** 2
    base = 1.0 / (4 * s2)
    if k == 0:
        return units.hbar ** 2 * base
    radicand = momentum_radicand(a, device.sigma, device.lam)
    if radicand <= 0:
        raise ValidityError(f"recorded momentum spread undefined: radicand {radicand:.6g} <= 0 "
                            f"(sigma={device.sigma}, lambda={device.lam}, alpha={a})")
    return units.hbar ** 2 * (k * k * s2 / math.sqrt(radicand) - k * k + base)


def _gaussian_entropy(variance: float) -> float:
    return 0.5 * math.log(2 * math.pi * math.e * variance)


def _scaled_entropy(scale: float, variance: float) -> float:
    # -int |C g| ln |C g| for a unit-mass Gaussian g
    if scale == 0:
        return 0.0
    return -scale * math.log(scale) + scale * _gaussian_entropy(variance)


def analytic_scenario_report(packet: GaussianPacketParams, device: DeviceParams,
                             units: UnitSystem = NATURAL_UNITS) -> AnalyticReport:
    hbar, m = units.hbar, units.mass
    a, k, x0 = packet.alpha, packet.k, packet.x0
    s2 = a ** 2 + device.sigma ** 2
    l2 = a ** 2 + device.lam ** 2
    var_p_R = recorded_momentum_variance(packet, device, units)
    corr = complex(0.0, hbar / 2)
    p_I = ParameterSet(x0, hbar * k, a ** 2, (hbar / (2 * a)) ** 2, corr, "I")
    p_R = ParameterSet(x0, hbar * k, s2, var_p_R, corr, "R")
    flux = abs(hbar * k / m)
    entropies = {
        "H_I": _gaussian_entropy(a ** 2), "H_R": _gaussian_entropy(s2),
        "tau_I": _scaled_entropy(flux, a ** 2), "tau_R": _scaled_entropy(flux, l2),
    }
    d_std_p = abs(math.sqrt(var_p_R) - hbar / (2 * a))
    indicators = IndicatorReport(
        d_mean_x=0.0, d_mean_p=0.0, d_corr=0.0,
        d_std_x=math.sqrt(s2) - a, d_std_p=d_std_p,
        dH=0.5 * math.log1p(device.sigma ** 2 / a ** 2),
        d_tau=flux / 2 * math.log1p(device.lam ** 2 / a ** 2),
    )
    return AnalyticReport(
        recorded_density=GaussianProfile(x0, s2, 1.0),
        recorded_current=GaussianProfile(x0, l2, hbar * k / m),
        params_I=p_I, params_R=p_R, indicators=indicators, entropies=entropies,
        epsilon=indicators.epsilon(hbar), units=units,
    )


def recorded_oscillator_energy(omega: float, sigma: float, units: UnitSystem = NATURAL_UNITS) -> tuple[float, float]:
    """Mean and standard deviation of the oscillator energy in the recorded reading."""
    hbar, m = units.hbar, units.mass
    b = hbar + 2 * m * omega * sigma ** 2
    mean = omega * (hbar ** 2 + b ** 2) / (4 * b)
    std = 2 * m * omega ** 2 * sigma ** 2 * (hbar + m * omega * sigma ** 2) / (math.sqrt(2) * b)
    return mean, std


def analytic_oscillator_report(omega: float, sigma: float, units: UnitSystem = NATURAL_UNITS) -> AnalyticReport:
    """Ground-state oscillator measured with a density kernel of width ``sigma``."""
    alpha = oscillator_width(omega, units)
    base = analytic_scenario_report(GaussianPacketParams(0.0, alpha, 0.0), DeviceParams(sigma, 0.0), units)
    mean_R, std_R = recorded_oscillator_energy(omega, sigma, units)
    mean_I = units.hbar * omega / 2
    p_I = ParameterSet(**{**vars(base.params_I), "mean_H": mean_I, "var_H": 0.0})
    p_R = ParameterSet(**{**vars(base.params_R), "mean_H": mean_R, "var_H": std_R ** 2})
    indicators = IndicatorReport(**{**vars(base.indicators), "d_mean_H": mean_R - mean_I, "d_std_H": std_R})
    return AnalyticReport(base.recorded_density, base.recorded_current, p_I, p_R, indicators,
                          base.entropies, indicators.epsilon(units.hbar), units)
