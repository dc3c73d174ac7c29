"""JSON layout shared by numerical and closed-form reports."""

from __future__ import annotations

from .estimators import ParameterSet, check_uncertainty_relations
from .grid import UnitSystem
from .indicators import IndicatorReport


def report_body(params_I: ParameterSet, params_R: ParameterSet, indicators: IndicatorReport,
                entropies: dict, units: UnitSystem) -> dict:
    checks = {}
    for p in (params_I, params_R):
        c = check_uncertainty_relations(p, units)
        checks[p.label] = {
            "product": c.product, "corr_modulus": c.corr_modulus,
            "robertson_margin": c.robertson_margin, "schrodinger_margin": c.schrodinger_margin,
            "commutator_margin": c.commutator_margin, "passed": c.passed,
        }
    return {
        "params_I": params_I.to_dict(),
        "params_R": params_R.to_dict(),
        "indicators": indicators.to_dict(),
        "entropies": {k: float(v) for k, v in entropies.items()},
        "epsilon": indicators.epsilon(units.hbar),
        "uncertainty": checks,
    }


def flatten(report: dict) -> dict:
    """``{"params_R.std_x": value, ...}`` over the numeric fields of a report body."""
    flat = {}
    for section in ("params_I", "params_R", "indicators", "entropies"):
        for key, value in report.get(section, {}).items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                flat[f"{section}.{key}"] = float(value)
    if report.get("epsilon") is not None:
        flat["epsilon"] = float(report["epsilon"])
    return flat
