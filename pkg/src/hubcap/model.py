"""Domain types for the hypergraph energy-system model.

A system is a set of conversion and storage nodes joined by commodity
balances (hyperedges) over a discrete time grid.  Everything here is plain
data; compilation into an LP lives in :mod:`hubcap.compiler`.

Unit conventions, fixed system-wide:

* energy flows in GWh/h (numerically GW), mass and water flows in kt/h,
* costs in M-EUR, capacities in units of the node's reference flow,
* duals of mass balances are therefore M-EUR/kt (= kEUR/t) and duals of
  energy balances M-EUR/GWh; multiply by 1000 for EUR/t or EUR/MWh.

Instances are treated as immutable after construction: nothing in this
package mutates a system in place, so one system may be shared by
concurrent scenario solves.  ``force_hub`` returns a new system.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

Unit = Literal["energy", "mass", "water"]
Direction = Literal["in", "out"]
AtmosphereRole = Literal["none", "releases_co2", "captures_co2"]

#: Cost-attribution categories used by report breakdowns.
CATEGORIES = ("Flexibility", "CO2 Infra", "Power", "Conversion", "Transport")


@dataclass(frozen=True)
class TimeGrid:
    """Discrete optimization horizon: ``steps`` periods of ``step_hours`` each.

    ``years`` is the annualization span and is deliberately independent of
    ``steps * step_hours``; if omitted it defaults to the horizon length in
    years, which is the sensible choice for desk-scale runs.
    """

    steps: int
    step_hours: float = 1.0
    years: float | None = None

    def __post_init__(self):
        if self.years is None:
            object.__setattr__(self, "years", self.steps * self.step_hours / 8760.0)


@dataclass(frozen=True)
class Commodity:
    id: str
    unit: Unit


@dataclass(frozen=True)
class Port:
    """One flow of a conversion node.

    ``factor`` is the port flow per unit of the node's reference flow;
    the reference port itself carries factor 1 by convention.  ``delay``
    shifts this port's time index relative to the reference flow (a
    reference flow at step t is tied to this port's flow at t + delay).
    """

    direction: Direction
    factor: float
    delay: int = 0


@dataclass
class ConversionTech:
    """A node converting one commodity bundle into another.

    Capacity is measured in units of the ``reference`` port flow.  A node
    with ``capacity_factor`` set is non-dispatchable (renewables); one with
    ``must_run`` > 0 has a minimum operating level; ramp limits bound the
    step-to-step change of the driving flow as a fraction of capacity.
    """

    id: str
    cluster: str
    reference: str                      # commodity id of the reference port
    ports: dict[str, Port]
    preinstalled: float = 0.0
    max_potential: float = math.inf
    capacity_factor: np.ndarray | None = None
    must_run: float = 0.0
    ramp_up: float | None = None
    ramp_down: float | None = None
    capex: float = 0.0                  # M-EUR per unit of new capacity
    lifetime: int = 1                   # years, for annualization
    fixed_om: float = 0.0               # M-EUR per capacity unit per year
    var_om: float | np.ndarray = 0.0    # M-EUR per unit of reference flow
    atmosphere_role: AtmosphereRole = "none"
    category: str = "Conversion"

    def driving_commodity(self) -> str:
        """Commodity whose flow must-run and ramp limits apply to.

        The first declared input port drives the node; a pure source node
        is driven by its reference flow.
        """
        for cid, port in self.ports.items():
            if port.direction == "in":
                return cid
        return self.reference


@dataclass
class StorageTech:
    """A node storing one commodity, with separate stock and flow sizing.

    Charge and discharge ports default to the stored commodity;
    ``aux_ports`` are commodities consumed proportionally to the charge
    flow (e.g. liquefaction electricity).
    """

    id: str
    cluster: str
    stored_commodity: str
    charge_commodity: str | None = None
    discharge_commodity: str | None = None
    self_discharge: float = 0.0
    charge_eff: float = 1.0
    discharge_eff: float = 1.0
    min_soc_frac: float = 0.0
    discharge_ratio: float = 1.0        # max discharge flow per unit charge capacity
    aux_ports: dict[str, float] = field(default_factory=dict)
    stock_preinstalled: float = 0.0
    stock_max: float = math.inf
    stock_capex: float = 0.0
    stock_fixed_om: float = 0.0
    stock_var_om: float | np.ndarray = 0.0
    stock_lifetime: int = 1
    flow_preinstalled: float = 0.0
    flow_max: float = math.inf
    flow_capex: float = 0.0
    flow_fixed_om: float = 0.0
    flow_var_om: float | np.ndarray = 0.0
    flow_lifetime: int = 1
    category: str = "Flexibility"

    @property
    def charge(self) -> str:
        return self.charge_commodity or self.stored_commodity

    @property
    def discharge(self) -> str:
        return self.discharge_commodity or self.stored_commodity


Node = Union[ConversionTech, StorageTech]


@dataclass(frozen=True)
class Forbidden:
    """Demand shortfall is a hard constraint violation."""


@dataclass(frozen=True)
class Penalized:
    """Demand shortfall allowed at ``price`` M-EUR per unit not served."""

    price: float


EnsPolicy = Union[Forbidden, Penalized]
FORBIDDEN = Forbidden()


@dataclass(frozen=True)
class Cap:
    """Yearly cap on net CO2 released to the atmosphere, kt per year."""

    kt_per_year: float


@dataclass(frozen=True)
class Price:
    """Fee per kt of CO2 released (credit per kt captured), M-EUR/kt."""

    per_kt: float


EmissionPolicy = Union[Cap, Price, None]


@dataclass(frozen=True)
class PortRef:
    """Reference to one node port, identified by node id and commodity."""

    node: str
    commodity: str


@dataclass
class Hyperedge:
    """Commodity balance tying producer and consumer flows to a demand."""

    id: str
    commodity: str
    producers: list[PortRef] = field(default_factory=list)
    consumers: list[PortRef] = field(default_factory=list)
    demand: float | np.ndarray = 0.0
    ens_policy: EnsPolicy = FORBIDDEN


@dataclass
class ReportTags:
    """Node sets the report layer needs and cannot infer from structure."""

    power_nodes: frozenset[str] = frozenset()
    co2_export_nodes: frozenset[str] = frozenset()
    fuel_delivery: PortRef | None = None


@dataclass
class EnergySystem:
    grid: TimeGrid
    commodities: list[Commodity]
    nodes: list[Node]
    hyperedges: list[Hyperedge]
    emission_policy: EmissionPolicy = None
    wacc: float = 0.07
    demand_cluster: str = "BE"
    atmosphere_commodity: str = "co2_atmosphere"
    fuel_hhv_gwh_per_kt: float = 15.44
    tags: ReportTags = field(default_factory=ReportTags)

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def clusters(self) -> list[str]:
        seen: list[str] = []
        for n in self.nodes:
            if n.cluster not in seen:
                seen.append(n.cluster)
        return seen

    def conversions(self) -> list[ConversionTech]:
        return [n for n in self.nodes if isinstance(n, ConversionTech)]

    def storages(self) -> list[StorageTech]:
        return [n for n in self.nodes if isinstance(n, StorageTech)]


@dataclass(frozen=True)
class Violation:
    code: str
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.code}: {self.message}"


ValidationReport = list[Violation]


def _check_series(out: list[Violation], entity: str, code: str, value, steps: int,
                  lo: float | None = None, hi: float | None = None) -> None:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    elif arr.shape[0] != steps:
        out.append(Violation(f"{code}_length", entity,
                             f"series has {arr.shape[0]} entries, expected {steps}"))
        return
    if not np.all(np.isfinite(arr)):
        out.append(Violation(f"{code}_finite", entity, "series contains non-finite values"))
        return
    if lo is not None and arr.min() < lo or hi is not None and arr.max() > hi:
        out.append(Violation(f"{code}_range", entity,
                             f"values outside [{lo}, {hi}]"))


def _check_range(out: list[Violation], entity: str, name: str, value: float,
                 lo: float = -math.inf, hi: float = math.inf,
                 lo_strict: bool = False) -> None:
    bad = not np.isfinite(value) and hi != math.inf
    bad = bad or value > hi or value < lo or (lo_strict and value == lo)
    if bad or (value != value):  # NaN
        out.append(Violation("range", entity, f"{name}={value} outside valid range"))


def validate_system(system: EnergySystem) -> ValidationReport:
    """Structural validation; an empty report means the system compiles.

    Pure: repeated calls on the same system return identical reports.
    """
    out: list[Violation] = []
    grid = system.grid
    if not isinstance(grid.steps, int) or grid.steps < 2:
        out.append(Violation("range", "grid", f"steps={grid.steps}, need an integer >= 2"))
    if not grid.step_hours > 0:
        out.append(Violation("range", "grid", f"step_hours={grid.step_hours} must be > 0"))
    if not grid.years > 0:
        out.append(Violation("range", "grid", f"years={grid.years} must be > 0"))
    if not 0 < system.wacc < 1:
        out.append(Violation("range", "system", f"wacc={system.wacc} outside (0, 1)"))

    steps = grid.steps if isinstance(grid.steps, int) and grid.steps >= 2 else 2

    commodity_ids: set[str] = set()
    for c in system.commodities:
        if c.id in commodity_ids:
            out.append(Violation("duplicate_id", c.id, "commodity declared twice"))
        commodity_ids.add(c.id)
        if c.unit not in ("energy", "mass", "water"):
            out.append(Violation("range", c.id, f"unknown unit {c.unit!r}"))

    node_ids: set[str] = set()
    for n in system.nodes:
        if n.id in node_ids:
            out.append(Violation("duplicate_id", n.id, "node declared twice"))
        node_ids.add(n.id)
        if isinstance(n, ConversionTech):
            _validate_conversion(out, system, n, steps, commodity_ids)
        else:
            _validate_storage(out, system, n, steps, commodity_ids)

    edge_ids: set[str] = set()
    for e in system.hyperedges:
        if e.id in edge_ids:
            out.append(Violation("duplicate_id", e.id, "hyperedge declared twice"))
        edge_ids.add(e.id)
        if e.commodity not in commodity_ids:
            out.append(Violation("unknown_commodity", e.id, f"commodity {e.commodity!r} not declared"))
        _check_series(out, e.id, "demand", e.demand, steps)
        if isinstance(e.ens_policy, Penalized) and e.ens_policy.price < 0:
            out.append(Violation("range", e.id, f"ens price {e.ens_policy.price} < 0"))
        for kind, refs in (("producer", e.producers), ("consumer", e.consumers)):
            for ref in refs:
                _validate_ref(out, system, e, kind, ref, node_ids)

    policy = system.emission_policy
    if isinstance(policy, Cap) and policy.kt_per_year < 0:
        out.append(Violation("range", "emission_policy", f"cap {policy.kt_per_year} < 0"))
    if isinstance(policy, Price) and policy.per_kt < 0:
        out.append(Violation("range", "emission_policy", f"price {policy.per_kt} < 0"))
    return out


def _validate_conversion(out, system, n, steps, commodity_ids):
    if n.reference not in n.ports:
        out.append(Violation("unknown_port", n.id, f"reference {n.reference!r} has no port"))
    else:
        ref = n.ports[n.reference]
        if ref.factor != 1.0:
            out.append(Violation("reference_factor", n.id,
                                 f"reference port factor {ref.factor} != 1"))
        if ref.delay != 0:
            out.append(Violation("reference_delay", n.id, "reference port must have zero delay"))
    for cid, port in n.ports.items():
        if cid not in commodity_ids:
            out.append(Violation("unknown_commodity", n.id, f"port commodity {cid!r} not declared"))
        if port.factor < 0 or not np.isfinite(port.factor):
            out.append(Violation("range", n.id, f"port {cid} factor {port.factor} < 0"))
        if port.delay < 0 or port.delay != int(port.delay):
            out.append(Violation("range", n.id, f"port {cid} delay {port.delay} invalid"))
    _check_range(out, n.id, "preinstalled", n.preinstalled, lo=0.0)
    if not n.max_potential > 0:
        out.append(Violation("range", n.id, f"max_potential={n.max_potential} must be > 0"))
    if n.preinstalled > n.max_potential:
        out.append(Violation("range", n.id,
                             f"preinstalled {n.preinstalled} exceeds potential {n.max_potential}"))
    if n.capacity_factor is not None:
        _check_series(out, n.id, "capacity_factor", n.capacity_factor, steps, lo=0.0, hi=1.0)
    _check_range(out, n.id, "must_run", n.must_run, lo=0.0, hi=1.0)
    for name, ramp in (("ramp_up", n.ramp_up), ("ramp_down", n.ramp_down)):
        if ramp is not None:
            _check_range(out, n.id, name, ramp, lo=0.0, hi=1.0)
    if n.lifetime < 1:
        out.append(Violation("range", n.id, f"lifetime={n.lifetime} must be >= 1"))
    _check_series(out, n.id, "var_om", n.var_om, steps)
    if n.atmosphere_role not in ("none", "releases_co2", "captures_co2"):
        out.append(Violation("range", n.id, f"atmosphere_role {n.atmosphere_role!r} unknown"))
    elif n.atmosphere_role != "none":
        want = "out" if n.atmosphere_role == "releases_co2" else "in"
        port = n.ports.get(system.atmosphere_commodity)
        if port is None or port.direction != want:
            out.append(Violation("atmosphere_port", n.id,
                                 f"role {n.atmosphere_role} needs an {want!r} port on "
                                 f"{system.atmosphere_commodity!r}"))


def _validate_storage(out, system, n, steps, commodity_ids):
    for cid in {n.stored_commodity, n.charge, n.discharge, *n.aux_ports}:
        if cid not in commodity_ids:
            out.append(Violation("unknown_commodity", n.id, f"commodity {cid!r} not declared"))
    _check_range(out, n.id, "self_discharge", n.self_discharge, lo=0.0, hi=1.0)
    _check_range(out, n.id, "charge_eff", n.charge_eff, lo=0.0, hi=1.0, lo_strict=True)
    _check_range(out, n.id, "discharge_eff", n.discharge_eff, lo=0.0, hi=1.0, lo_strict=True)
    _check_range(out, n.id, "min_soc_frac", n.min_soc_frac, lo=0.0, hi=1.0)
    if not n.discharge_ratio > 0:
        out.append(Violation("range", n.id, f"discharge_ratio={n.discharge_ratio} must be > 0"))
    for name, pre, cap in (("stock", n.stock_preinstalled, n.stock_max),
                           ("flow", n.flow_preinstalled, n.flow_max)):
        _check_range(out, n.id, f"{name}_preinstalled", pre, lo=0.0)
        if pre > cap:
            out.append(Violation("range", n.id, f"{name} preinstalled {pre} exceeds max {cap}"))
    for name, life in (("stock_lifetime", n.stock_lifetime), ("flow_lifetime", n.flow_lifetime)):
        if life < 1:
            out.append(Violation("range", n.id, f"{name}={life} must be >= 1"))
    for factor in n.aux_ports.values():
        if factor < 0:
            out.append(Violation("range", n.id, f"aux factor {factor} < 0"))
    _check_series(out, n.id, "stock_var_om", n.stock_var_om, steps)
    _check_series(out, n.id, "flow_var_om", n.flow_var_om, steps)


def _validate_ref(out, system, edge, kind, ref, node_ids):
    if ref.node not in node_ids:
        out.append(Violation("unknown_node", edge.id, f"{kind} references missing node {ref.node!r}"))
        return
    n = system.node(ref.node)
    if ref.commodity != edge.commodity:
        out.append(Violation("commodity_mismatch", edge.id,
                             f"{kind} port {ref.node}:{ref.commodity} does not carry {edge.commodity!r}"))
    if isinstance(n, ConversionTech):
        port = n.ports.get(ref.commodity)
        if port is None:
            out.append(Violation("unknown_port", edge.id,
                                 f"node {ref.node!r} has no port on {ref.commodity!r}"))
            return
        want = "out" if kind == "producer" else "in"
        if port.direction != want:
            out.append(Violation("direction_mismatch", edge.id,
                                 f"{kind} {ref.node}:{ref.commodity} is an {port.direction!r} port"))
    else:
        ok = (ref.commodity == n.discharge) if kind == "producer" else \
             (ref.commodity == n.charge or ref.commodity in n.aux_ports)
        if not ok:
            out.append(Violation("unknown_port", edge.id,
                                 f"storage {ref.node!r} has no {kind} port on {ref.commodity!r}"))


def force_hub(system: EnergySystem, cluster_id: str) -> EnergySystem:
    """Restrict the system to one remote hub plus the demand-center cluster.

    Nodes of every other cluster are dropped, hyperedges lose references to
    dropped nodes, and hyperedges that referenced only dropped nodes vanish
    entirely.  Raises ``KeyError`` for an unknown cluster.
    """
    clusters = set(system.clusters())
    if cluster_id not in clusters:
        raise KeyError(f"unknown cluster {cluster_id!r}; have {sorted(clusters)}")
    keep = {cluster_id, system.demand_cluster}
    nodes = [n for n in system.nodes if n.cluster in keep]
    kept_ids = {n.id for n in nodes}

    edges: list[Hyperedge] = []
    for e in system.hyperedges:
        producers = [r for r in e.producers if r.node in kept_ids]
        consumers = [r for r in e.consumers if r.node in kept_ids]
        had_refs = bool(e.producers or e.consumers)
        if had_refs and not (producers or consumers):
            continue
        edges.append(dataclasses.replace(e, producers=producers, consumers=consumers))

    tags = ReportTags(
        power_nodes=frozenset(system.tags.power_nodes & kept_ids),
        co2_export_nodes=frozenset(system.tags.co2_export_nodes & kept_ids),
        fuel_delivery=system.tags.fuel_delivery
        if system.tags.fuel_delivery and system.tags.fuel_delivery.node in kept_ids
        else None,
    )
    return dataclasses.replace(system, nodes=nodes, hyperedges=edges, tags=tags)
