"""Command-line interface.

Subcommands::

    hubcap run <config> [-o DIR] [--max-iter N] [--tol-feas X] [--tol-opt X]
    hubcap validate <config>
    hubcap export-lp <config> --format mps|lp [--scenario NAME] [-o FILE]
    hubcap synth <kind> -T <n> --seed <s> [-o FILE]
    hubcap presets [NAME] [--yaml]

The output directory defaults to ``<config>_out`` next to the config, or
to ``$HUBCAP_OUT_DIR`` when set.  Exit codes: 0 success/optimal, 1 solver
trouble, 2 infeasible, 3 unbounded, 4 config error, 5 series/data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from . import catalog
from .compiler import CompileError, build_lp
from .config import ConfigError, build_system, load_config
from .interchange import export_interchange
from .model import ConversionTech, validate_system
from .runner import (EXIT_CONFIG, EXIT_DATA, EXIT_OK, OUTPUT_ENV, run_bundle)
from .series import KINDS, SeriesError, series_to_text, synth_series
from .simplex import SolveOptions


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CompileError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SeriesError as exc:
        print(f"series error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hubcap",
        description="Capacity-expansion and dispatch optimizer for multi-energy hubs.",
        epilog=f"Default output directory: <config>_out, or ${OUTPUT_ENV} when set.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve every scenario in a config and write reports")
    run.add_argument("config", type=Path)
    run.add_argument("-o", "--out", type=Path, default=None)
    run.add_argument("--max-iter", type=int, default=None)
    run.add_argument("--tol-feas", type=float, default=None)
    run.add_argument("--tol-opt", type=float, default=None)
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="check a config and its systems structurally")
    val.add_argument("config", type=Path)
    val.set_defaults(func=_cmd_validate)

    exp = sub.add_parser("export-lp", help="write one scenario's LP as MPS or LP text")
    exp.add_argument("config", type=Path)
    exp.add_argument("--format", choices=("mps", "lp"), required=True)
    exp.add_argument("--scenario", default=None, help="scenario name (default: first)")
    exp.add_argument("-o", "--out", type=Path, default=None)
    exp.set_defaults(func=_cmd_export)

    syn = sub.add_parser("synth", help="generate a deterministic synthetic series")
    syn.add_argument("kind", choices=KINDS)
    syn.add_argument("-T", "--steps", type=int, required=True)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("-o", "--out", type=Path, default=None)
    syn.set_defaults(func=_cmd_synth)

    pre = sub.add_parser("presets", help="list catalog presets or show one")
    pre.add_argument("name", nargs="?", default=None)
    pre.add_argument("--yaml", action="store_true", help="emit as a config node snippet")
    pre.set_defaults(func=_cmd_presets)
    return p


def _solve_options(args) -> SolveOptions:
    kwargs = {}
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    if args.tol_feas is not None:
        kwargs["tol_feas"] = args.tol_feas
    if args.tol_opt is not None:
        kwargs["tol_opt"] = args.tol_opt
    return SolveOptions(**kwargs)


def _cmd_run(args) -> int:
    result = run_bundle(args.config, args.out, _solve_options(args))
    return result.exit_code


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    bad = False
    for scenario in cfg.scenarios:
        system = build_system(cfg, scenario)
        violations = validate_system(system)
        if violations:
            bad = True
            print(f"[{scenario.name}] {len(violations)} violation(s):")
            for v in violations:
                print(f"  {v}")
        else:
            print(f"[{scenario.name}] ok "
                  f"({len(system.nodes)} nodes, {len(system.hyperedges)} hyperedges, "
                  f"T={system.grid.steps})")
    return EXIT_CONFIG if bad else EXIT_OK


def _cmd_export(args) -> int:
    cfg = load_config(args.config)
    scenario = cfg.scenarios[0]
    if args.scenario is not None:
        match = [s for s in cfg.scenarios if s.name == args.scenario]
        if not match:
            raise ConfigError(f"no scenario named {args.scenario!r}; "
                              f"have {[s.name for s in cfg.scenarios]}")
        scenario = match[0]
    system = build_system(cfg, scenario)
    lp, _ = build_lp(system)
    text = export_interchange(lp, "mps" if args.format == "mps" else "lp_text")
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({lp.num_rows} rows, {lp.num_cols} cols)")
    return EXIT_OK


def _cmd_synth(args) -> int:
    values = synth_series(args.kind, args.steps, args.seed)
    text = series_to_text(args.kind, values)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({args.steps} steps)")
    return EXIT_OK


def _cmd_presets(args) -> int:
    if args.name is None:
        for name in catalog.list_presets():
            p = catalog.preset(name)
            kind = "conversion" if isinstance(p.builds, ConversionTech) else "storage"
            print(f"{name:<18} {kind:<10} [{p.source}] {p.note.splitlines()[0]}")
        return EXIT_OK
    p = catalog.preset(args.name)
    if args.yaml:
        print(_preset_yaml(p))
        return EXIT_OK
    print(f"{p.name} [{p.source}]")
    print(p.note)
    for f in dataclasses.fields(p.builds):
        print(f"  {f.name}: {getattr(p.builds, f.name)!r}")
    return EXIT_OK


def _preset_yaml(p: catalog.Preset) -> str:
    """Render a preset as an inline config node block for user editing."""
    tech = p.builds
    lines = []
    if isinstance(tech, ConversionTech):
        lines.append("- conversion:")
        lines.append(f"    id: {tech.id}")
        lines.append(f"    cluster: {tech.cluster}")
        lines.append(f"    reference: {tech.reference}")
        lines.append("    ports:")
        for cid, port in tech.ports.items():
            extra = f", delay: {port.delay}" if port.delay else ""
            lines.append(f"      {cid}: {{direction: {port.direction}, "
                         f"factor: {port.factor}{extra}}}")
        skip = {"id", "cluster", "reference", "ports", "capacity_factor"}
    else:
        lines.append("- storage:")
        lines.append(f"    id: {tech.id}")
        lines.append(f"    cluster: {tech.cluster}")
        lines.append(f"    stored_commodity: {tech.stored_commodity}")
        skip = {"id", "cluster", "stored_commodity", "charge_commodity",
                "discharge_commodity", "aux_ports"}
    for f in dataclasses.fields(tech):
        if f.name in skip:
            continue
        val = getattr(tech, f.name)
        default = f.default if f.default is not dataclasses.MISSING else None
        if val == default or val is None:
            continue
        if isinstance(val, float) and math.isinf(val):
            continue
        lines.append(f"    {f.name}: {val}")
    return "\n".join(lines)


if __name__ == "__main__":
    raise SystemExit(main())
