"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single ``PASS``/``FAIL`` line (visible with or without
``-s``) before asserting, so the suite output doubles as a checklist.
"""

import math
import time

import numpy as np
import pytest

from qmeasure import GaussianPacketParams, gaussian_kernel, make_grid, positional_entropy, sample_positions
from qmeasure import empirical_parameters, write_samples_csv
from qmeasure.analytic import analytic_scenario_report, momentum_radicand
from qmeasure.estimators import momentum_second_moment
from qmeasure.scenario import ScenarioConfig, default_scenario, simulate, verify

from conftest import gaussian_density

MAX_SECONDS = 10.0


@pytest.fixture
def verdict(capsys):
    start = time.perf_counter()

    def record(number: int, title: str, checks: dict[str, bool], detail: str = ""):
        elapsed = time.perf_counter() - start
        checks = {**checks, f"runtime {elapsed:.2f}s < {MAX_SECONDS:g}s": elapsed < MAX_SECONDS}
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}"
        line += " | " + (detail or "; ".join(k for k in checks if not k.startswith("runtime")))
        if failed:
            line += " | failed: " + "; ".join(failed)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_1_gaussian_density_channel(verdict):
    rep = simulate(default_scenario()).report()
    p, ind = rep["params_R"], rep["indicators"]
    targets = {"std_x_R": (p["std_x"], 1.4142136), "std_p_R": (p["std_p"], 0.5288672),
               "d_std_x": (ind["d_std_x"], 0.4142136), "d_std_p": (ind["d_std_p"], 0.0288672),
               "dH": (ind["dH"], 0.3465736)}
    checks = {f"{k} rel {rel(a, b):.1e} <= 1e-4": rel(a, b) <= 1e-4 for k, (a, b) in targets.items()}
    checks.update({f"{k} {ind[k]:.1e} <= 1e-6": ind[k] <= 1e-6 for k in ("d_mean_x", "d_mean_p", "d_corr")})
    worst = max(rel(a, b) for a, b in targets.values())
    verdict(1, "S1 spreads, dH and mean deltas", checks, f"worst rel {worst:.2e}")


def test_criterion_2_current_channel(verdict):
    rep = simulate(default_scenario().with_device(1.0, 1.0)).report()
    d_tau = rep["indicators"]["d_tau"]
    u = rep["uncertainty"]["R"]
    checks = {
        f"d_tau rel {rel(d_tau, 0.3465736):.1e} <= 1e-4": rel(d_tau, 0.3465736) <= 1e-4,
        f"product err {abs(u['product'] - 0.5):.1e} <= 1e-5": abs(u["product"] - 0.5) <= 1e-5,
        f"Robertson margin {u['robertson_margin']:.1e} >= -1e-9": u["robertson_margin"] >= -1e-9,
    }
    verdict(2, "current channel d_tau and saturation", checks,
            f"product {u['product']:.9f}, margin {u['robertson_margin']:.2e}")


def test_criterion_3_oscillator(verdict):
    cfg = ScenarioConfig.from_dict({"oscillator": {"omega": 1}, "device": {"sigma": 1}})
    rep = simulate(cfg).report()
    pI, pR, ind = rep["params_I"], rep["params_R"], rep["indicators"]
    targets = {"mean_H_I": (pI["mean_H"], 0.5), "mean_H_R": (pR["mean_H"], 0.8333333),
               "std_H_R": (pR["std_H"], 0.9428090), "d_mean_H": (ind["d_mean_H"], 0.3333333),
               "d_std_H": (ind["d_std_H"], 0.9428090)}
    checks = {f"{k} rel {rel(a, b):.1e} <= 1e-4": rel(a, b) <= 1e-4 for k, (a, b) in targets.items()}
    checks[f"std_H_I {pI['std_H']:.1e} <= 1e-8"] = pI["std_H"] <= 1e-8
    verdict(3, "oscillator energy moments", checks, f"std_H_I {pI['std_H']:.1e}")


def test_criterion_4_positional_entropy_never_decreases(verdict):
    rng = np.random.default_rng(20240601)
    cases, worst = 0, math.inf
    while cases < 120:
        alpha, sigma = rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0)
        half = rng.uniform(8.0, 14.0) * math.hypot(alpha, sigma)
        n = int(rng.integers(1024, 8193))
        g = make_grid(-half + rng.uniform(-1, 1), half + rng.uniform(-1, 1), n)
        if 0 < sigma < 2 * g.dx:
            continue  # kernel narrower than the grid resolves
        rho = gaussian_density(g.x, rng.uniform(-1, 1), alpha ** 2)
        rho /= g.integrate(rho)
        dH = positional_entropy(gaussian_kernel(g, sigma).apply(rho), g) - positional_entropy(rho, g)
        worst = min(worst, dH)
        cases += 1
    verdict(4, "dH >= -1e-10 on random cases", {f"min dH {worst:.2e} >= -1e-10": worst >= -1e-10,
                                                   f"{cases} cases >= 100": cases >= 100})


def test_criterion_5_ideal_measurement_limit(verdict):
    rep = simulate(default_scenario().with_device(1e-3, 1e-3)).report()
    ind = {k: v for k, v in rep["indicators"].items() if v is not None}
    worst_key = max(ind, key=lambda k: abs(ind[k]))
    ts = [1, 0.5, 0.25, 0.1, 0.01]
    eps = [simulate(default_scenario().with_device(t, t)).epsilon for t in ts]
    checks = {f"max indicator {worst_key}={abs(ind[worst_key]):.1e} <= 1e-5": abs(ind[worst_key]) <= 1e-5,
              "epsilon strictly decreasing": all(a > b for a, b in zip(eps, eps[1:])),
              f"epsilon(0.01) {eps[-1]:.1e} near 0": eps[-1] <= 1e-5}
    verdict(5, "ideal limit and epsilon(t, t) monotone", checks,
            "epsilon " + ", ".join(f"{e:.3g}" for e in eps))


def test_criterion_6_oracle_equivalence_grid(verdict):
    base, worst, points, failures = default_scenario(), 0.0, 0, []
    for s in np.linspace(0, 1, 5):
        for l in np.linspace(0, 1, 5):
            if momentum_radicand(1.0, s, l) <= 0:
                continue
            rows = verify(base.with_device(float(s), float(l)), rtol=1e-4)
            points += 1
            worst = max([worst] + [r.rel_error for r in rows if r.rel_error is not None])
            failures += [f"({s:g},{l:g}) {r.field}" for r in rows if not r.passed]
    checks = {f"all {points} points verify": not failures, f"max rel error {worst:.2e} < 1e-4": worst < 1e-4}
    verdict(6, "verify over the 5x5 validity grid", checks, ", ".join(failures[:5]))


def test_criterion_7_second_order_convergence(verdict):
    exact = analytic_scenario_report(GaussianPacketParams(0.0, 1.0, 1.0), default_scenario().device).params_R.var_p
    exact += 1.0  # <p^2> = var_p + <p>^2 with <p> = hbar k = 1
    errs = []
    for n in (2048, 4096):
        res = simulate(default_scenario(n=n))
        errs.append(abs(momentum_second_moment(res.reading_R) - exact))
    ratio = errs[0] / errs[1]
    verdict(7, "<p^2>_R error ratio on doubling n", {f"ratio {ratio:.3f} in [3, 5]": 3 <= ratio <= 5},
            f"errors {errs[0]:.2e} -> {errs[1]:.2e}")


def test_criterion_8_sampling(verdict, tmp_path):
    reading = simulate(default_scenario()).reading_R
    a = sample_positions(reading, 10 ** 6, seed=8)
    mean, std, _ = empirical_parameters(a)
    paths = []
    for name in ("a.csv", "b.csv"):
        paths.append(tmp_path / name)
        write_samples_csv(sample_positions(reading, 10 ** 6, seed=8), paths[-1], "S1")
    checks = {f"|mean| {abs(mean):.2e} <= 0.00707": abs(mean) <= 0.00707,
              f"std rel {rel(std, 1.4142136):.2e} <= 0.01": rel(std, 1.4142136) <= 0.01,
              "byte-identical CSV": paths[0].read_bytes() == paths[1].read_bytes()}
    verdict(8, "10^6 draws from S1 rho_R", checks)


def test_criterion_9_conservation(verdict):
    configs = [default_scenario(), default_scenario().with_device(1.0, 1.0),
               ScenarioConfig.from_dict({"oscillator": {"omega": 1}, "device": {"sigma": 1}}),
               default_scenario().with_device(1e-3, 1e-3)]
    configs += [default_scenario().with_device(float(s), float(l))
                for s in np.linspace(0, 1, 5) for l in np.linspace(0, 1, 5) if momentum_radicand(1.0, s, l) > 0]
    mass_err = mom_err = 0.0
    for cfg in configs:
        res = simulate(cfg)
        mass_err = max(mass_err, abs(res.grid.integrate(res.reading_R.rho) - 1))
        mom_err = max(mom_err, abs(res.params_R.mean_p - res.params_I.mean_p))
    checks = {f"mass error {mass_err:.1e} <= 1e-8": mass_err <= 1e-8,
              f"<p> error {mom_err:.1e} <= 1e-8": mom_err <= 1e-8}
    verdict(9, f"mass and <p> conserved over {len(configs)} scenarios", checks)
