"""Economic indicators derived from a solved scenario.

Everything here is a pure function of (system, variable map, solution):
per-node costs aggregated by cluster and category, the CO2 shadow price
under a cap, per-hour scarcity prices on hard-constrained balances, the
levelized cost of delivered synthetic fuel, and the net CO2 balance.

Price orientation: the solver reports duals of a minimization, where
binding ``<=`` rows carry nonpositive duals.  This layer flips signs so
every reported price is the nonnegative marginal cost of tightening the
constraint by one unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compiler import annualize_capex, atmosphere_flows
from .lp import LpProblem, VariableMap
from .model import (CATEGORIES, Cap, ConversionTech, EnergySystem, Forbidden,
                    Penalized, Price, StorageTech)
from .simplex import OPTIMAL, Solution

#: unit conversion for reported prices: M-EUR/kt -> EUR/t, M-EUR/GWh -> EUR/MWh
PRICE_SCALE = 1000.0


class AnalysisError(ValueError):
    pass


@dataclass
class ScenarioReport:
    name: str
    status: str
    objective: float
    capacities: dict[str, float] = field(default_factory=dict)
    stock_capacities: dict[str, float] = field(default_factory=dict)
    cost_by_cluster: dict[str, float] = field(default_factory=dict)
    cost_by_category: dict[str, float] = field(default_factory=dict)
    co2_shadow_price: float | None = None            # EUR/t, cap mode only
    ens_shadow_prices: dict[str, np.ndarray] = field(default_factory=dict)
    ens_peak: dict[str, tuple[int, float]] = field(default_factory=dict)
    fuel_cost_per_mwh: float | None = None           # EUR/MWh HHV
    net_co2_kt_per_year: float = 0.0
    ens_penalty_cost: float = 0.0
    co2_fee_cost: float = 0.0
    iterations: int = 0
    notes: list[str] = field(default_factory=list)


def _check_optimal(solution: Solution) -> None:
    if solution.status != OPTIMAL:
        raise AnalysisError(f"analysis needs an optimal solution, got {solution.status}")


def _series(value, steps: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    return np.full(steps, float(arr)) if arr.ndim == 0 else arr


def node_cost(system: EnergySystem, vm: VariableMap, solution: Solution, node) -> float:
    """The node's contribution to the objective, evaluated at the solution."""
    T = system.grid.steps
    years = system.grid.years
    dt = system.grid.step_hours
    x = solution.x
    if isinstance(node, ConversionTech):
        zeta = annualize_capex(node.capex, node.lifetime, system.wacc)
        cost = years * (zeta + node.fixed_om) * x[vm.capacity(node.id)]
        flows = x[vm.flows(node.id, node.reference, T)]
        cost += float(_series(node.var_om, T) @ flows) * dt
        return cost
    stock_ann = annualize_capex(node.stock_capex, node.stock_lifetime, system.wacc)
    flow_ann = annualize_capex(node.flow_capex, node.flow_lifetime, system.wacc)
    cost = years * (stock_ann + node.stock_fixed_om) * x[vm.stock_capacity(node.id)]
    cost += years * (flow_ann + node.flow_fixed_om) * x[vm.flow_capacity(node.id)]
    cost += float(_series(node.stock_var_om, T) @ x[vm.stocks(node.id, T)])
    charge = np.array([x[vm.charge(node.id, node.charge, t)] for t in range(T)])
    cost += float(_series(node.flow_var_om, T) @ charge) * dt
    return cost


def cost_breakdown(system: EnergySystem, vm: VariableMap,
                   solution: Solution) -> tuple[dict[str, float], dict[str, float]]:
    """Node costs attributed to clusters and to reporting categories.

    Clusters present in the system always appear, even at zero cost.  The
    sum over either dict equals the LP objective minus shortfall penalties
    and emission fees (reconciliation within 1e-6 relative).
    """
    _check_optimal(solution)
    by_cluster = {cl: 0.0 for cl in system.clusters()}
    by_category = {cat: 0.0 for cat in CATEGORIES}
    for n in system.nodes:
        if n.category not in by_category:
            raise AnalysisError(f"node {n.id!r} has unmapped category {n.category!r}")
        cost = node_cost(system, vm, solution, n)
        by_cluster[n.cluster] += cost
        by_category[n.category] += cost
    return by_cluster, by_category


def ens_penalty_cost(system: EnergySystem, vm: VariableMap, solution: Solution) -> float:
    T = system.grid.steps
    dt = system.grid.step_hours
    total = 0.0
    for e in system.hyperedges:
        if isinstance(e.ens_policy, Penalized):
            slack = solution.x[vm.ens_series(e.id, T)]
            total += e.ens_policy.price * dt * float(slack.sum())
    return total


def co2_fee_cost(system: EnergySystem, vm: VariableMap, solution: Solution) -> float:
    if not isinstance(system.emission_policy, Price):
        return 0.0
    releases, captures = atmosphere_flows(system, vm)
    dt = system.grid.step_hours
    net = float(solution.x[releases].sum() - solution.x[captures].sum())
    return system.emission_policy.per_kt * dt * net


def co2_shadow_price(system: EnergySystem, lp: LpProblem, solution: Solution) -> float:
    """Marginal cost of the net-emission cap, EUR per tonne of CO2.

    Zero when the cap is slack (complementary slackness); positive when
    binding.  Only defined in cap mode.
    """
    _check_optimal(solution)
    if not isinstance(system.emission_policy, Cap):
        raise AnalysisError("CO2 shadow price is defined only under a cap policy")
    if lp.co2_cap_row is None:
        raise AnalysisError("LP was built without the emission cap row")
    return abs(solution.y[lp.co2_cap_row]) * PRICE_SCALE


def ens_shadow_prices(system: EnergySystem, lp: LpProblem, vm: VariableMap,
                      solution: Solution, edge_id: str) -> tuple[np.ndarray, int]:
    """Scarcity price series (EUR/MWh) of a hard-served balance, plus argmax.

    The duals of the balance rows are the marginal cost of one more unit
    of demand at each step; on energy commodities the unit conversion
    gives EUR/MWh.  Only defined where shortfall is forbidden: with a
    penalty, the price is capped by the penalty itself.
    """
    _check_optimal(solution)
    edge = next((e for e in system.hyperedges if e.id == edge_id), None)
    if edge is None:
        raise AnalysisError(f"unknown hyperedge {edge_id!r}")
    if not isinstance(edge.ens_policy, Forbidden):
        raise AnalysisError(f"hyperedge {edge_id!r} allows shortfall; "
                            "scarcity prices are defined for forbidden shortfall only")
    rows = [lp.row_names.index(f"{edge_id}.balance.0")]
    rows = np.arange(rows[0], rows[0] + system.grid.steps)
    series = solution.y[rows] * PRICE_SCALE
    return series, int(np.argmax(series))


def fuel_cost_per_mwh(system: EnergySystem, vm: VariableMap, solution: Solution) -> float:
    """Levelized cost of delivered synthetic fuel, EUR per MWh (HHV).

    From the objective, the costs of demand-center electricity production,
    shortfall penalties and CO2-export shipping are removed; the rest is
    divided by the energy content delivered at the tagged port.
    """
    _check_optimal(solution)
    tags = system.tags
    if tags.fuel_delivery is None:
        raise AnalysisError("system tags do not name a fuel delivery port")
    numerator = solution.objective
    numerator -= ens_penalty_cost(system, vm, solution)
    for nid in sorted(tags.power_nodes | tags.co2_export_nodes):
        numerator -= node_cost(system, vm, solution, system.node(nid))

    T = system.grid.steps
    ref = tags.fuel_delivery
    node = system.node(ref.node)
    if isinstance(node, StorageTech):
        cols = np.array([vm.discharge(ref.node, ref.commodity, t) for t in range(T)])
    else:
        cols = vm.flows(ref.node, ref.commodity, T)
    delivered = float(solution.x[cols].sum()) * system.grid.step_hours
    unit = next((c.unit for c in system.commodities if c.id == ref.commodity), "energy")
    if unit != "energy":
        delivered *= system.fuel_hhv_gwh_per_kt
    if delivered <= 0.0:
        raise AnalysisError("no fuel delivered; levelized cost undefined")
    return numerator / delivered * PRICE_SCALE


def net_co2_balance(system: EnergySystem, vm: VariableMap, solution: Solution) -> float:
    """Net CO2 released to the atmosphere, kt per year."""
    _check_optimal(solution)
    releases, captures = atmosphere_flows(system, vm)
    dt = system.grid.step_hours
    net = float(solution.x[releases].sum() - solution.x[captures].sum()) * dt
    return net / system.grid.years


def build_report(name: str, system: EnergySystem, lp: LpProblem, vm: VariableMap,
                 solution: Solution) -> ScenarioReport:
    """Assemble the full per-scenario report from a solve."""
    report = ScenarioReport(name=name, status=solution.status,
                            objective=solution.objective, iterations=solution.iterations)
    if solution.status != OPTIMAL:
        return report

    T = system.grid.steps
    for n in system.nodes:
        if isinstance(n, ConversionTech):
            report.capacities[n.id] = n.preinstalled + float(solution.x[vm.capacity(n.id)])
        else:
            report.capacities[n.id] = n.flow_preinstalled + float(
                solution.x[vm.flow_capacity(n.id)])
            report.stock_capacities[n.id] = n.stock_preinstalled + float(
                solution.x[vm.stock_capacity(n.id)])

    report.cost_by_cluster, report.cost_by_category = cost_breakdown(system, vm, solution)
    report.ens_penalty_cost = ens_penalty_cost(system, vm, solution)
    report.co2_fee_cost = co2_fee_cost(system, vm, solution)
    report.net_co2_kt_per_year = net_co2_balance(system, vm, solution)

    if isinstance(system.emission_policy, Cap):
        report.co2_shadow_price = co2_shadow_price(system, lp, solution)
    for e in system.hyperedges:
        unit = next((c.unit for c in system.commodities if c.id == e.commodity), None)
        if isinstance(e.ens_policy, Forbidden) and unit == "energy" \
                and np.any(np.asarray(e.demand, dtype=float)):
            series, peak_t = ens_shadow_prices(system, lp, vm, solution, e.id)
            report.ens_shadow_prices[e.id] = series
            report.ens_peak[e.id] = (peak_t, float(series[peak_t]))
    if system.tags.fuel_delivery is not None:
        try:
            report.fuel_cost_per_mwh = fuel_cost_per_mwh(system, vm, solution)
        except AnalysisError:
            report.fuel_cost_per_mwh = None
    return report
