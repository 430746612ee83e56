"""Scenario orchestration: validate, compile, solve, analyze, report.

``run_bundle`` executes every scenario in a config file and writes, per
scenario, ``summary.csv`` (key/value), ``capacities.csv``, ``costs.csv``,
``ens_shadow_prices.csv`` (when defined) and ``report.json``; across
scenarios it writes ``summary.csv`` shaped like a scenario-comparison
table, plus rendered figures.  CSV and JSON outputs are byte-deterministic
for identical configs; figures are rendered from the same data.

Exit codes: 0 all optimal; 1 solver trouble (iteration limit or numerical
failure); 2 infeasible; 3 unbounded; 4 config error; 5 series/data error.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import ScenarioReport, build_report
from .compiler import CompileError, build_lp
from .config import BundleConfig, ConfigError, ScenarioConfig, build_system, load_config
from .figures import render_cost_breakdown, render_objectives, render_scarcity_prices
from .model import validate_system
from .series import SeriesError
from .simplex import (INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED,
                      SingularBasisError, SolveOptions, solve, verify_kkt)

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_INFEASIBLE = 2
EXIT_UNBOUNDED = 3
EXIT_CONFIG = 4
EXIT_DATA = 5

#: environment variable naming the default output directory
OUTPUT_ENV = "HUBCAP_OUT_DIR"


@dataclass
class RunResult:
    exit_code: int
    reports: list[ScenarioReport]
    out_dir: Path | None


def default_out_dir(config_path: Path) -> Path:
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env)
    return config_path.parent / f"{config_path.stem}_out"


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and not np.isfinite(x)):
        return ""
    return np.format_float_positional(float(x), precision=10, trim="-")


def run_bundle(config_path, out_dir=None, options: SolveOptions | None = None,
               log=print) -> RunResult:
    config_path = Path(config_path)
    try:
        cfg = load_config(config_path)
    except (ConfigError, OSError) as exc:
        log(f"config error: {exc}")
        return RunResult(EXIT_CONFIG, [], None)

    out = Path(out_dir) if out_dir else default_out_dir(config_path)
    out.mkdir(parents=True, exist_ok=True)
    options = options or SolveOptions()

    reports: list[ScenarioReport] = []
    worst = EXIT_OK
    for scenario in cfg.scenarios:
        try:
            report = run_scenario(cfg, scenario, out, options, log)
        except (ConfigError, CompileError) as exc:
            log(f"[{scenario.name}] config error: {exc}")
            return RunResult(EXIT_CONFIG, reports, out)
        except SeriesError as exc:
            log(f"[{scenario.name}] series error: {exc}")
            return RunResult(EXIT_DATA, reports, out)
        except SingularBasisError as exc:
            log(f"[{scenario.name}] solver failure: {exc}")
            return RunResult(EXIT_SOLVER, reports, out)
        reports.append(report)
        worst = max(worst, {OPTIMAL: EXIT_OK, INFEASIBLE: EXIT_INFEASIBLE,
                            UNBOUNDED: EXIT_UNBOUNDED,
                            ITERATION_LIMIT: EXIT_SOLVER}[report.status])

    _write_bundle_summary(reports, out)
    render_cost_breakdown(reports, out / "cost_breakdown.png")
    render_objectives(reports, out / "objectives.png")
    log(f"wrote {out / 'summary.csv'}")
    return RunResult(worst, reports, out)


def run_scenario(cfg: BundleConfig, scenario: ScenarioConfig, out: Path,
                 options: SolveOptions, log=print) -> ScenarioReport:
    system = build_system(cfg, scenario)
    violations = validate_system(system)
    if violations:
        raise CompileError("; ".join(str(v) for v in violations[:8]))
    lp, vm = build_lp(system)
    solution = solve(lp, options)
    report = build_report(scenario.name, system, lp, vm, solution)

    if solution.status == OPTIMAL:
        kkt = verify_kkt(lp, solution)
        if kkt.max() > 10 * options.tol_feas:
            report.notes.append(f"KKT residuals above tolerance: {kkt.as_dict()}")
        log(f"[{scenario.name}] optimal, objective {solution.objective:.2f} MEUR, "
            f"{solution.iterations} iterations")
    else:
        log(f"[{scenario.name}] {solution.status}")

    sdir = out / scenario.name
    sdir.mkdir(parents=True, exist_ok=True)
    _write_scenario_files(system, report, sdir)
    render_scarcity_prices(report, sdir / "scarcity_prices.png")
    return report


def _write_scenario_files(system, report: ScenarioReport, sdir: Path) -> None:
    lines = ["key,value"]
    lines.append(f"status,{report.status}")
    lines.append(f"objective_meur,{_fmt(report.objective)}")
    lines.append(f"co2_shadow_price_eur_per_t,{_fmt(report.co2_shadow_price)}")
    lines.append(f"fuel_cost_eur_per_mwh,{_fmt(report.fuel_cost_per_mwh)}")
    lines.append(f"net_co2_kt_per_year,{_fmt(report.net_co2_kt_per_year)}")
    lines.append(f"ens_penalty_meur,{_fmt(report.ens_penalty_cost)}")
    lines.append(f"co2_fee_meur,{_fmt(report.co2_fee_cost)}")
    for eid, (t, peak) in sorted(report.ens_peak.items()):
        lines.append(f"scarcity_peak_{eid}_eur_per_mwh,{_fmt(peak)}")
        lines.append(f"scarcity_peak_{eid}_step,{t}")
    (sdir / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["node,cluster,category,kind,capacity,stock_capacity"]
    for n in system.nodes:
        cap = report.capacities.get(n.id)
        stock = report.stock_capacities.get(n.id)
        kind = "conversion" if n.id not in report.stock_capacities else "storage"
        lines.append(f"{n.id},{n.cluster},{n.category},{kind},{_fmt(cap)},{_fmt(stock)}")
    (sdir / "capacities.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["group,name,cost_meur"]
    for cl, v in sorted(report.cost_by_cluster.items()):
        lines.append(f"cluster,{cl},{_fmt(v)}")
    for cat, v in report.cost_by_category.items():
        lines.append(f"category,{cat},{_fmt(v)}")
    (sdir / "costs.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    if report.ens_shadow_prices:
        cols = sorted(report.ens_shadow_prices)
        lines = ["t," + ",".join(cols)]
        length = len(next(iter(report.ens_shadow_prices.values())))
        for t in range(length):
            lines.append(f"{t}," + ",".join(_fmt(report.ens_shadow_prices[c][t])
                                            for c in cols))
        (sdir / "ens_shadow_prices.csv").write_text("\n".join(lines) + "\n",
                                                    encoding="utf-8")

    payload = {
        "name": report.name,
        "status": report.status,
        "objective_meur": report.objective if np.isfinite(report.objective) else None,
        "capacities": report.capacities,
        "stock_capacities": report.stock_capacities,
        "cost_by_cluster": report.cost_by_cluster,
        "cost_by_category": report.cost_by_category,
        "co2_shadow_price_eur_per_t": report.co2_shadow_price,
        "fuel_cost_eur_per_mwh": report.fuel_cost_per_mwh,
        "net_co2_kt_per_year": report.net_co2_kt_per_year,
        "ens_penalty_meur": report.ens_penalty_cost,
        "co2_fee_meur": report.co2_fee_cost,
        "scarcity_peaks": {k: {"step": t, "eur_per_mwh": v}
                           for k, (t, v) in report.ens_peak.items()},
        "iterations": report.iterations,
        "notes": report.notes,
    }
    (sdir / "report.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n",
        encoding="utf-8")


def _write_bundle_summary(reports: list[ScenarioReport], out: Path) -> None:
    cap_nodes = sorted({nid for r in reports for nid in r.capacities})
    head = ["scenario", "status", "objective_meur", "co2_shadow_price_eur_per_t",
            "fuel_cost_eur_per_mwh", "net_co2_kt_per_year", "ens_penalty_meur"]
    head += [f"cap:{n}" for n in cap_nodes]
    lines = [",".join(head)]
    for r in reports:
        row = [r.name, r.status, _fmt(r.objective), _fmt(r.co2_shadow_price),
               _fmt(r.fuel_cost_per_mwh), _fmt(r.net_co2_kt_per_year),
               _fmt(r.ens_penalty_cost)]
        row += [_fmt(r.capacities.get(n)) for n in cap_nodes]
        lines.append(",".join(row))
    (out / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
