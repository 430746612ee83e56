"""Declarative scenario configuration.

A config file is YAML with four top-level blocks::

    horizon:  {steps: 48, step_hours: 1.0, years: null}   # years defaults
    wacc:     0.07                                         # to horizon span
    series:                                                # named bindings
      solar_cf_be:  {synth: solar_cf, seed: 11, scale: 1.0}
      elec_demand:  {file: data/elec.csv, role: demand}
    system:
      demand_cluster: BE
      atmosphere_commodity: co2_atmosphere
      commodities: [{id: electricity_be, unit: energy}, ...]
      nodes:
        - preset: solar_be            # catalog preset, rewired via args
          args: {node_id: solar_be}
          capacity_factor: solar_cf_be
          overrides: {capex: 550.0}
        - conversion: {id: ..., cluster: ..., reference: ..., ports: {...}}
        - storage:    {id: ..., cluster: ..., stored_commodity: ...}
      hyperedges:
        - id: elec_be
          commodity: electricity_be
          producers: [solar_be]        # or {node: n, commodity: c}
          consumers: [batt_be]
          demand: elec_demand          # series name or a number
          ens: forbidden               # or {price: 3.0}
      tags:
        power_nodes: [...]
        co2_export_nodes: [...]
        fuel_delivery: {node: ..., commodity: ...}
    scenarios:                         # or a single `scenario:` block
      - name: s1
        emission: {cap: 0.0}           # or {price: 0.08} or none
        ens: forbidden                 # global override for demand edges
        ens_overrides: {gas_be: {price: 3.0}}
        force_hub: GL                  # optional
        horizon: {...}                 # optional per-scenario overrides
        wacc: 0.07

Exactly one emission mode may be set per scenario.  Series are resolved
against the scenario's horizon, so one bundle can mix horizons.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import catalog
from .model import (Cap, Commodity, ConversionTech, EmissionPolicy, EnergySystem,
                    EnsPolicy, FORBIDDEN, Hyperedge, Penalized, Port, PortRef,
                    Price, ReportTags, StorageTech, TimeGrid)
from .series import read_series, synth_series


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    name: str
    emission: EmissionPolicy = None
    ens_global: EnsPolicy | None = None
    ens_overrides: dict[str, EnsPolicy] = field(default_factory=dict)
    force_hub: str | None = None
    horizon: dict | None = None
    wacc: float | None = None
    tags: dict | None = None


@dataclass
class BundleConfig:
    path: Path
    name: str
    horizon: dict
    wacc: float
    series: dict[str, dict]
    system: dict
    scenarios: list[ScenarioConfig]


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return mapping[key]


def _parse_emission(raw, where: str) -> EmissionPolicy:
    if raw in (None, "none", {}):
        return None
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: emission must be none, {{cap: x}} or {{price: x}}")
    has_cap = raw.get("cap") is not None
    has_price = raw.get("price") is not None
    if has_cap and has_price:
        raise ConfigError(f"{where}: emission cap and price are mutually exclusive")
    if has_cap:
        return Cap(float(raw["cap"]))
    if has_price:
        return Price(float(raw["price"]))
    return None


def _parse_ens(raw, where: str) -> EnsPolicy:
    if raw == "forbidden":
        return FORBIDDEN
    if isinstance(raw, dict) and "price" in raw:
        return Penalized(float(raw["price"]))
    raise ConfigError(f"{where}: ens must be 'forbidden' or {{price: x}}")


def load_config(path) -> BundleConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}: parse error{line}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    where = str(path)
    horizon = _require(raw, "horizon", where)
    if "steps" not in horizon:
        raise ConfigError(f"{where}: horizon needs 'steps'")
    system = _require(raw, "system", where)

    scen_raw = raw.get("scenarios")
    if scen_raw is None:
        single = raw.get("scenario")
        scen_raw = [single] if single is not None else [{"name": "base"}]
    scenarios = []
    for k, s in enumerate(scen_raw):
        sw = f"{where}: scenario #{k + 1}"
        name = s.get("name") or f"scenario_{k + 1}"
        ens_global = None if "ens" not in s or s["ens"] is None \
            else _parse_ens(s["ens"], sw)
        overrides = {eid: _parse_ens(spec, sw)
                     for eid, spec in (s.get("ens_overrides") or {}).items()}
        scenarios.append(ScenarioConfig(
            name=name,
            emission=_parse_emission(s.get("emission"), sw),
            ens_global=ens_global,
            ens_overrides=overrides,
            force_hub=s.get("force_hub"),
            horizon=s.get("horizon"),
            wacc=s.get("wacc"),
            tags=s.get("tags"),
        ))
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError(f"{where}: duplicate scenario names")

    return BundleConfig(
        path=path,
        name=raw.get("name", path.stem),
        horizon=horizon,
        wacc=float(raw.get("wacc", 0.07)),
        series=raw.get("series") or {},
        system=system,
        scenarios=scenarios,
    )


def _resolve_series(cfg: BundleConfig, name: str, steps: int, role: str) -> np.ndarray:
    spec = cfg.series.get(name)
    if spec is None:
        raise ConfigError(f"{cfg.path}: series {name!r} is not declared")
    scale = float(spec.get("scale", 1.0))
    if "synth" in spec:
        values = synth_series(spec["synth"], steps, int(spec.get("seed", 0)))
    elif "file" in spec:
        fpath = cfg.path.parent / spec["file"]
        values = read_series(fpath, steps=steps, role=spec.get("role", role))
    else:
        raise ConfigError(f"{cfg.path}: series {name!r} needs 'synth' or 'file'")
    if values.shape[0] != steps:
        raise ConfigError(f"{cfg.path}: series {name!r} has {values.shape[0]} steps, "
                          f"horizon needs {steps}")
    return values * scale


def _build_node(cfg: BundleConfig, spec: dict, steps: int):
    where = f"{cfg.path}: node {spec}"
    if "preset" in spec:
        try:
            node = catalog.build(spec["preset"], **(spec.get("args") or {}))
        except KeyError as exc:
            raise ConfigError(f"{cfg.path}: {exc.args[0]}") from None
        except TypeError as exc:
            raise ConfigError(f"{cfg.path}: preset {spec['preset']!r}: {exc}") from None
    elif "conversion" in spec:
        body = dict(spec["conversion"])
        ports = {cid: Port(direction=p["direction"], factor=float(p["factor"]),
                           delay=int(p.get("delay", 0)))
                 for cid, p in _require(body, "ports", where).items()}
        body["ports"] = ports
        node = _from_mapping(ConversionTech, body, where)
    elif "storage" in spec:
        node = _from_mapping(StorageTech, dict(spec["storage"]), where)
    else:
        raise ConfigError(f"{where}: need 'preset', 'conversion' or 'storage'")

    overrides = spec.get("overrides") or {}
    valid = {f.name for f in dataclasses.fields(node)}
    unknown = set(overrides) - valid
    if unknown:
        raise ConfigError(f"{cfg.path}: node {node.id!r}: unknown overrides {sorted(unknown)}")
    if overrides:
        node = dataclasses.replace(node, **overrides)

    cf = spec.get("capacity_factor")
    if cf is not None:
        if isinstance(cf, str):
            values = _resolve_series(cfg, cf, steps, "capacity_factor")
        else:
            values = np.asarray(cf, dtype=float)
        node = dataclasses.replace(node, capacity_factor=values)
    return node


def _from_mapping(cls, body: dict, where: str):
    valid = {f.name for f in dataclasses.fields(cls)}
    unknown = set(body) - valid
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**body)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_ref(raw, commodity: str, where: str) -> PortRef:
    if isinstance(raw, str):
        return PortRef(raw, commodity)
    if isinstance(raw, dict) and "node" in raw:
        return PortRef(raw["node"], raw.get("commodity", commodity))
    raise ConfigError(f"{where}: bad port reference {raw!r}")


def build_system(cfg: BundleConfig, scenario: ScenarioConfig) -> EnergySystem:
    """Materialize the system for one scenario (series resolved, policies set)."""
    hz = dict(cfg.horizon)
    if scenario.horizon:
        hz.update(scenario.horizon)
    steps = int(hz["steps"])
    grid = TimeGrid(steps=steps, step_hours=float(hz.get("step_hours", 1.0)),
                    years=hz.get("years"))

    sysraw = cfg.system
    where = str(cfg.path)
    commodities = [Commodity(c["id"], c["unit"])
                   for c in _require(sysraw, "commodities", where)]
    nodes = [_build_node(cfg, spec, steps) for spec in _require(sysraw, "nodes", where)]

    edges = []
    for espec in sysraw.get("hyperedges", []):
        eid = _require(espec, "id", where)
        commodity = _require(espec, "commodity", where)
        ew = f"{where}: hyperedge {eid!r}"
        demand_raw = espec.get("demand", 0.0)
        if isinstance(demand_raw, str):
            demand = _resolve_series(cfg, demand_raw, steps, "demand")
        elif isinstance(demand_raw, (int, float)):
            demand = float(demand_raw)
        else:
            demand = np.asarray(demand_raw, dtype=float)

        policy: EnsPolicy = FORBIDDEN
        if espec.get("ens") is not None:
            policy = _parse_ens(espec["ens"], ew)
        if scenario.ens_global is not None and _has_demand(demand):
            policy = scenario.ens_global
        if eid in scenario.ens_overrides:
            policy = scenario.ens_overrides[eid]

        edges.append(Hyperedge(
            id=eid, commodity=commodity,
            producers=[_parse_ref(r, commodity, ew) for r in espec.get("producers", [])],
            consumers=[_parse_ref(r, commodity, ew) for r in espec.get("consumers", [])],
            demand=demand, ens_policy=policy,
        ))

    tags_raw = dict(sysraw.get("tags") or {})
    if scenario.tags:
        tags_raw.update(scenario.tags)
    delivery = tags_raw.get("fuel_delivery")
    tags = ReportTags(
        power_nodes=frozenset(tags_raw.get("power_nodes") or ()),
        co2_export_nodes=frozenset(tags_raw.get("co2_export_nodes") or ()),
        fuel_delivery=PortRef(delivery["node"], delivery["commodity"]) if delivery else None,
    )

    system = EnergySystem(
        grid=grid,
        commodities=commodities,
        nodes=nodes,
        hyperedges=edges,
        emission_policy=scenario.emission,
        wacc=scenario.wacc if scenario.wacc is not None else cfg.wacc,
        demand_cluster=sysraw.get("demand_cluster", "BE"),
        atmosphere_commodity=sysraw.get("atmosphere_commodity", "co2_atmosphere"),
        fuel_hhv_gwh_per_kt=float(sysraw.get("fuel_hhv_gwh_per_kt", 15.44)),
        tags=tags,
    )
    if scenario.force_hub:
        from .model import force_hub
        try:
            system = force_hub(system, scenario.force_hub)
        except KeyError as exc:
            raise ConfigError(f"{where}: force_hub: {exc.args[0]}") from None
    return system


def _has_demand(demand) -> bool:
    if isinstance(demand, (int, float)):
        return demand != 0.0
    return bool(np.any(np.asarray(demand, dtype=float)))
