"""Scenario configuration and the intrinsic -> recorded pipeline.

A scenario is a Gaussian packet (or an oscillator ground state) measured by a
pair of Gaussian kernels. :func:`simulate` runs the numerical pipeline,
:func:`verify` diffs it against the closed forms, :func:`sweep` scans device
widths.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from importlib import resources
from pathlib import Path

import jsonschema

from . import analytic
from .errors import ConfigError, DivergenceError, QMeasureError, ResolutionError, TailDecayError, ValidityError
from .estimators import ParameterSet, parameter_set
from .grid import Grid, UnitSystem, centered_grid
from .indicators import IndicatorReport, entropy_pair, error_indicators
from .report import flatten, report_body
from .state import GaussianPacketParams, Reading, gaussian_packet, oscillator_width, reading_of
from .transform import CURRENT, DENSITY, DeviceParams, Kernel, check_normalization, gaussian_kernel, measure

DEFAULT_N = 4096
MAX_N = 65536
WIDEN_FACTOR = 1.5
MAX_WIDEN = 6.0  # cap on total half-width growth relative to the first grid

DEFAULT_OUTPUT = {
    "directory": ".",
    "report": "report.json",
    "fields_csv": None,
    "table_csv": None,
    "sweep_csv": "sweep.csv",
    "samples_csv": "samples.csv",
    "figures": False,
}


def _schema() -> dict:
    return json.loads(resources.files("qmeasure").joinpath("config.schema.json").read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ScenarioConfig:
    units: UnitSystem = UnitSystem()
    packet: GaussianPacketParams | None = None
    omega: float | None = None
    device: DeviceParams = DeviceParams()
    n: int | None = None
    half_width_factor: float = 8.0
    auto_widen: bool = True
    sample_count: int | None = None
    seed: int | None = None
    rtol: float = 1e-4
    atol: float = 1e-6
    name: str = "scenario"
    output: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUT))

    def __post_init__(self):
        if (self.packet is None) == (self.omega is None):
            raise ConfigError("exactly one of packet or oscillator must be given")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        try:
            jsonschema.validate(data, _schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid config at {where}: {exc.message}") from None
        try:
            units = UnitSystem(**data.get("units", {}))
            packet = GaussianPacketParams(**data["packet"]) if "packet" in data else None
            omega = data["oscillator"]["omega"] if "oscillator" in data else None
            dev = data.get("device", {})
            device = DeviceParams(dev.get("sigma", 0.0), dev.get("lambda", 0.0))
        except QMeasureError as exc:
            raise ConfigError(str(exc)) from None
        grid = data.get("grid", {})
        sampling = data.get("sampling", {})
        tol = data.get("tolerances", {})
        return cls(
            units=units, packet=packet, omega=omega, device=device,
            n=grid.get("n"), half_width_factor=grid.get("half_width_factor", 8.0),
            auto_widen=grid.get("auto_widen", True),
            sample_count=sampling.get("count"), seed=sampling.get("seed"),
            rtol=tol.get("rtol", 1e-4), atol=tol.get("atol", 1e-6),
            name=data.get("name", "scenario"),
            output={**DEFAULT_OUTPUT, **data.get("output", {})},
        )

    @property
    def packet_params(self) -> GaussianPacketParams:
        if self.packet is not None:
            return self.packet
        return GaussianPacketParams(0.0, oscillator_width(self.omega, self.units), 0.0)

    def with_device(self, sigma: float, lam: float) -> "ScenarioConfig":
        return replace(self, device=DeviceParams(sigma, lam))

    def to_dict(self) -> dict:
        out = {"name": self.name, "units": {"hbar": self.units.hbar, "mass": self.units.mass}}
        if self.packet is not None:
            out["packet"] = {"x0": self.packet.x0, "alpha": self.packet.alpha, "k": self.packet.k}
        else:
            out["oscillator"] = {"omega": self.omega}
        out["device"] = {"sigma": self.device.sigma, "lambda": self.device.lam}
        out["grid"] = {"half_width_factor": self.half_width_factor, "auto_widen": self.auto_widen}
        if self.n is not None:
            out["grid"]["n"] = self.n
        if self.sample_count is not None:
            out["sampling"] = {"count": self.sample_count, "seed": self.seed}
        out["tolerances"] = {"rtol": self.rtol, "atol": self.atol}
        out["output"] = dict(self.output)
        return out


def load_config(path) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return ScenarioConfig.from_dict(data)


def initial_grid(config: ScenarioConfig) -> Grid:
    """Grid centred on the packet, ``half_width_factor`` recorded widths wide.

    Without an explicit ``n`` the default 4096 points are increased until
    every nonzero kernel width spans at least two grid spacings.
    """
    p, d = config.packet_params, config.device
    half = config.half_width_factor * math.sqrt(p.alpha ** 2 + max(d.sigma, d.lam) ** 2)
    n = config.n or DEFAULT_N
    if config.n is None:
        widths = [w for w in (d.sigma, d.lam) if w > 0]
        if widths:
            needed = math.ceil(2 * half / (min(widths) / 2)) + 1
            if needed > MAX_N:
                raise ResolutionError(f"kernel width {min(widths)} needs {needed} grid points (max {MAX_N})")
            n = max(n, needed)
    return centered_grid(p.x0, half, n)


def widened(grid: Grid, factor: float = WIDEN_FACTOR) -> Grid:
    """Same spacing, ``factor`` times the half-width."""
    center = 0.5 * (grid.x_min + grid.x_max)
    steps = int(math.ceil(factor * (grid.n - 1) / 2))
    return centered_grid(center, steps * grid.dx, 2 * steps + 1)


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    grid: Grid
    reading_I: Reading
    reading_R: Reading
    params_I: ParameterSet
    params_R: ParameterSet
    indicators: IndicatorReport
    entropies: dict
    kernels: tuple[Kernel, Kernel]
    widenings: int = 0

    @property
    def epsilon(self) -> float:
        return self.indicators.epsilon(self.config.units.hbar)

    def report(self) -> dict:
        units = self.config.units
        body = report_body(self.params_I, self.params_R, self.indicators, self.entropies, units)
        g = self.grid
        resolved = self.config.to_dict()
        resolved["grid"].update({"x_min": g.x_min, "x_max": g.x_max, "n": g.n, "dx": g.dx,
                                 "widenings": self.widenings})
        G, L = self.kernels
        norms = {}
        for kern in (G, L):
            r = check_normalization(kern)
            norms[kern.kind] = {"max_row_deviation": r.max_row_deviation,
                                "max_interior_column_deviation": r.max_interior_column_deviation,
                                "max_interior_edge_weight": r.max_interior_edge_weight}
        body["conservation"] = {
            "mass_I": float(g.integrate(self.reading_I.rho)),
            "mass_R": float(g.integrate(self.reading_R.rho)),
            "current_integral_I": float(g.integrate(self.reading_I.current)),
            "current_integral_R": float(g.integrate(self.reading_R.current)),
        }
        body["kernel_normalization"] = norms
        return {"config": resolved, **body}

    def write_fields_csv(self, path):
        rI, rR = self.reading_I, self.reading_R
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["x [length]", "rho_I [1/length]", "J_I [1/time]", "rho_R [1/length]", "J_R [1/time]"])
            for row in zip(self.grid.x, rI.rho, rI.current, rR.rho, rR.current):
                w.writerow([repr(float(v)) for v in row])


def _run_on_grid(config: ScenarioConfig, grid: Grid) -> ScenarioResult:
    units, device = config.units, config.device
    psi = gaussian_packet(config.packet_params, grid, units)
    reading_I = reading_of(psi, units)
    G = gaussian_kernel(grid, device.sigma, DENSITY)
    L = gaussian_kernel(grid, device.lam, CURRENT)
    reading_R = measure(reading_I, G, L)
    p_I = parameter_set(reading_I, units, config.omega)
    p_R = parameter_set(reading_R, units, config.omega)
    e_I, e_R = entropy_pair(reading_I), entropy_pair(reading_R)
    indicators = error_indicators(p_I, p_R).with_entropies(e_R.H - e_I.H, e_R.tau - e_I.tau)
    entropies = {"H_I": e_I.H, "H_R": e_R.H, "tau_I": e_I.tau, "tau_R": e_R.tau}
    return ScenarioResult(config, grid, reading_I, reading_R, p_I, p_R, indicators, entropies, (G, L))


def simulate(config: ScenarioConfig) -> ScenarioResult:
    """Run the numerical pipeline, widening the grid while J^2/rho has not decayed."""
    grid = first = initial_grid(config)
    widenings = 0
    while True:
        try:
            result = _run_on_grid(config, grid)
            result.widenings = widenings
            return result
        except TailDecayError as exc:
            nxt = widened(grid)
            if not config.auto_widen or nxt.n > MAX_N or nxt.length > MAX_WIDEN * first.length:
                raise DivergenceError(f"{exc}; no admissible wider grid (half-width {grid.length / 2:.4g}, "
                                      f"n={grid.n})") from None
            grid = nxt
            widenings += 1


def reference_report(config: ScenarioConfig) -> analytic.AnalyticReport:
    if config.omega is not None:
        return analytic.analytic_oscillator_report(config.omega, config.device.sigma, config.units)
    return analytic.analytic_scenario_report(config.packet, config.device, config.units)


@dataclass(frozen=True)
class Comparison:
    field: str
    numeric: float
    reference: float
    abs_error: float
    rel_error: float | None
    passed: bool


def compare_reports(numeric: dict, reference: dict, rtol: float = 1e-4, atol: float = 1e-6) -> list[Comparison]:
    """Field-by-field diff; relative test for nonzero targets, absolute for zero ones."""
    num, ref = flatten(numeric), flatten(reference)
    rows = []
    for key in ref:
        if key not in num:
            continue
        a, b = num[key], ref[key]
        err = abs(a - b)
        if b == 0:
            rows.append(Comparison(key, a, b, err, None, err <= atol))
        else:
            rel = err / abs(b)
            rows.append(Comparison(key, a, b, err, rel, rel <= rtol))
    return rows


def verify(config: ScenarioConfig, rtol: float | None = None, atol: float | None = None) -> list[Comparison]:
    rtol = config.rtol if rtol is None else rtol
    atol = config.atol if atol is None else atol
    ref = reference_report(config)
    result = simulate(config)
    return compare_reports(result.report(), ref.to_dict(), rtol, atol)


SWEEP_FIELDS = [
    "sigma", "lambda", "valid", "reason",
    "d_mean_x", "d_mean_p", "d_corr", "d_std_x", "d_std_p", "d_mean_H", "d_std_H", "dH", "d_tau",
    "H_I", "H_R", "tau_I", "tau_R", "epsilon", "epsilon_reference",
    "robertson_margin_I", "schrodinger_margin_I", "robertson_margin_R", "schrodinger_margin_R",
    "commutator_margin_R",
]


def sweep_point(config: ScenarioConfig, sigma: float, lam: float, mode: str = "numeric") -> dict:
    """One sweep row. Points outside the closed-form validity domain are flagged, not raised."""
    cfg = config.with_device(sigma, lam)
    row = dict.fromkeys(SWEEP_FIELDS)
    row.update(sigma=sigma, **{"lambda": lam}, valid=True, reason="")
    try:
        ref = reference_report(cfg)
        row["epsilon_reference"] = ref.epsilon
        if mode == "analytic":
            body = ref.to_dict()
        else:
            body = simulate(cfg).report()
    except (ValidityError, DivergenceError, ResolutionError) as exc:
        row.update(valid=False, reason=f"{type(exc).__name__}: {exc}")
        return row
    row.update({k: v for k, v in body["indicators"].items()})
    row.update(body["entropies"])
    row["epsilon"] = body["epsilon"]
    for label in ("I", "R"):
        u = body["uncertainty"][label]
        row[f"robertson_margin_{label}"] = u["robertson_margin"]
        row[f"schrodinger_margin_{label}"] = u["schrodinger_margin"]
    row["commutator_margin_R"] = body["uncertainty"]["R"]["commutator_margin"]
    return row


def sweep(config: ScenarioConfig, sigmas, lambdas, mode: str = "numeric", jobs: int = 1) -> list[dict]:
    """Rows in row-major (sigma outer, lambda inner) order.

    With ``jobs > 1`` points run in worker processes; the row order is the
    same as for a serial run.
    """
    sigmas, lambdas = [float(s) for s in sigmas], [float(l) for l in lambdas]
    if not sigmas or not lambdas:
        raise ConfigError("sweep needs nonempty sigma and lambda lists")
    if mode not in ("numeric", "analytic"):
        raise ConfigError(f"unknown sweep mode {mode!r}")
    points = [(s, l) for s in sigmas for l in lambdas]
    if jobs <= 1:
        return [sweep_point(config, s, l, mode) for s, l in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(partial(_sweep_task, config, mode), points))


def _sweep_task(config: ScenarioConfig, mode: str, point: tuple[float, float]) -> dict:
    return sweep_point(config, point[0], point[1], mode)


def write_sweep_csv(rows: list[dict], path):
    units = {"sigma": "length", "lambda": "length", "d_mean_x": "length", "d_mean_p": "momentum",
             "d_corr": "length*momentum", "d_std_x": "length", "d_std_p": "momentum",
             "d_mean_H": "energy", "d_std_H": "energy", "dH": "1", "d_tau": "1/time",
             "H_I": "1", "H_R": "1", "tau_I": "1/time", "tau_R": "1/time",
             "epsilon": "1", "epsilon_reference": "1"}
    units.update({k: "length*momentum" for k in SWEEP_FIELDS if "margin" in k})
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"{k} [{units[k]}]" if k in units else k for k in SWEEP_FIELDS])
        for row in rows:
            w.writerow(["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k])
                        for k in SWEEP_FIELDS])


def default_scenario(**overrides) -> ScenarioConfig:
    """The reference Gaussian scenario (alpha = k = 1, sigma = 1, lambda = 0) in natural units."""
    base = ScenarioConfig(packet=GaussianPacketParams(0.0, 1.0, 1.0), device=DeviceParams(1.0, 0.0))
    return replace(base, **overrides)


def as_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=lambda o: None if o is None else float(o))


__all__ = [
    "ScenarioConfig", "ScenarioResult", "Comparison", "load_config", "initial_grid", "widened",
    "simulate", "verify", "compare_reports", "reference_report", "sweep", "sweep_point",
    "write_sweep_csv", "default_scenario", "as_json",
]
