"""Time-expansion of an EnergySystem into a sparse bounded LP.

The compile step emits constraint rows only; ``assemble_objective`` fills
the cost vector and ``emit_co2_policy`` adds the emission cap row or the
per-flow fee, so the three concerns stay independently testable.
``build_lp`` chains all three.

Conventions (see :mod:`hubcap.model` for units):

* a port's flow at step ``t + delay`` is tied to the reference flow at
  ``t``; rows whose shifted index falls outside the horizon are dropped,
* must-run and ramp rows bound the node's driving flow, rescaled into
  reference-flow units by dividing by the port factor,
* all flows, capacities, stocks and slacks are nonnegative columns; sizing
  limits are rows, not bounds.
"""

from __future__ import annotations

import numpy as np

from .lp import LpBuilder, LpProblem, VariableMap, VarKey
from .model import (Cap, ConversionTech, EnergySystem, Hyperedge, Penalized,
                    PortRef, Price, StorageTech, validate_system)


class CompileError(ValueError):
    """The system cannot be compiled as declared."""


def annualize_capex(capex: float, lifetime: int, wacc: float) -> float:
    """Annualized investment payment per capacity unit (M-EUR/unit/yr).

    Standard annuity at rate ``wacc`` over ``lifetime`` years.  A zero
    rate is rejected: the formula degenerates and the flat ``capex/L``
    limit is not assumed on the caller's behalf.
    """
    if lifetime < 1:
        raise ValueError(f"lifetime must be >= 1 year, got {lifetime}")
    if not 0.0 < wacc < 1.0:
        raise ValueError(f"wacc must lie strictly inside (0, 1), got {wacc}")
    return capex * wacc / (1.0 - (1.0 + wacc) ** (-lifetime))


def _series(value, steps: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(steps, float(arr))
    return arr


def compile_system(system: EnergySystem) -> tuple[LpProblem, VariableMap]:
    """Emit all structural constraints; the cost vector is left at zero."""
    violations = validate_system(system)
    if violations:
        summary = "; ".join(str(v) for v in violations[:8])
        raise CompileError(f"{len(violations)} validation error(s): {summary}")

    T = system.grid.steps
    b = LpBuilder()
    vm = VariableMap()

    def col(key: VarKey) -> int:
        j = vm.add(key)
        jj = b.add_col(key.name())
        assert j == jj
        return j

    for n in system.nodes:
        if isinstance(n, ConversionTech):
            col(VarKey(n.id, "cap"))
            for cid in n.ports:
                for t in range(T):
                    col(VarKey(n.id, "flow", cid, t))
        else:
            col(VarKey(n.id, "stock_cap"))
            col(VarKey(n.id, "flow_cap"))
            for t in range(T):
                col(VarKey(n.id, "stock", None, t))
            for role, cid in (("charge", n.charge), ("discharge", n.discharge)):
                for t in range(T):
                    col(VarKey(n.id, role, cid, t))
            for cid in n.aux_ports:
                for t in range(T):
                    col(VarKey(n.id, "aux", cid, t))
    for e in system.hyperedges:
        if isinstance(e.ens_policy, Penalized):
            for t in range(T):
                col(VarKey(e.id, "ens", None, t))

    for n in system.nodes:
        if isinstance(n, ConversionTech):
            _emit_conversion(b, vm, n, T)
        else:
            _emit_storage(b, vm, n, T)
    for e in system.hyperedges:
        _emit_balance(b, vm, system, e, T)

    return b.build(), vm


def _emit_conversion(b: LpBuilder, vm: VariableMap, n: ConversionTech, T: int) -> None:
    cap = vm.capacity(n.id)
    ref = n.reference

    for cid, port in n.ports.items():
        if cid == ref:
            continue
        for t in range(T):
            if t + port.delay >= T:
                break
            r = b.add_row(f"{n.id}.conv_{cid}.{t}", "=", 0.0)
            b.add_term(r, vm.flow(n.id, cid, t + port.delay), 1.0)
            b.add_term(r, vm.flow(n.id, ref, t), -port.factor)

    pi = None if n.capacity_factor is None else _series(n.capacity_factor, T)
    for t in range(T):
        avail = 1.0 if pi is None else float(pi[t])
        r = b.add_row(f"{n.id}.size.{t}", "<", avail * n.preinstalled)
        b.add_term(r, vm.flow(n.id, ref, t), 1.0)
        b.add_term(r, cap, -avail)

    if np.isfinite(n.max_potential):
        r = b.add_row(f"{n.id}.potential", "<", n.max_potential - n.preinstalled)
        b.add_term(r, cap, 1.0)

    driving = n.driving_commodity()
    factor = n.ports[driving].factor
    if (n.must_run > 0 or n.ramp_up is not None or n.ramp_down is not None) and factor <= 0:
        raise CompileError(f"{n.id}: driving port {driving!r} has factor {factor}; "
                           "must-run/ramp limits need a positive factor")

    if n.must_run > 0:
        for t in range(T):
            r = b.add_row(f"{n.id}.mustrun.{t}", "<", -n.must_run * n.preinstalled)
            b.add_term(r, cap, n.must_run)
            b.add_term(r, vm.flow(n.id, driving, t), -1.0 / factor)

    for label, rate, sign in (("rampup", n.ramp_up, 1.0), ("rampdown", n.ramp_down, -1.0)):
        if rate is None:
            continue
        for t in range(1, T):
            r = b.add_row(f"{n.id}.{label}.{t}", "<", rate * n.preinstalled)
            b.add_term(r, vm.flow(n.id, driving, t), sign / factor)
            b.add_term(r, vm.flow(n.id, driving, t - 1), -sign / factor)
            b.add_term(r, cap, -rate)


def _emit_storage(b: LpBuilder, vm: VariableMap, n: StorageTech, T: int) -> None:
    e_cap = vm.stock_capacity(n.id)
    q_cap = vm.flow_capacity(n.id)

    for t in range(T - 1):
        r = b.add_row(f"{n.id}.dyn.{t}", "=", 0.0)
        b.add_term(r, vm.stock(n.id, t + 1), 1.0)
        b.add_term(r, vm.stock(n.id, t), -(1.0 - n.self_discharge))
        b.add_term(r, vm.charge(n.id, n.charge, t), -n.charge_eff)
        b.add_term(r, vm.discharge(n.id, n.discharge, t), 1.0 / n.discharge_eff)

    for cid, factor in n.aux_ports.items():
        for t in range(T):
            r = b.add_row(f"{n.id}.aux_{cid}.{t}", "=", 0.0)
            b.add_term(r, vm.aux(n.id, cid, t), 1.0)
            b.add_term(r, vm.charge(n.id, n.charge, t), -factor)

    r = b.add_row(f"{n.id}.cyc", "=", 0.0)
    b.add_term(r, vm.stock(n.id, 0), 1.0)
    b.add_term(r, vm.stock(n.id, T - 1), -1.0)

    for t in range(T):
        r = b.add_row(f"{n.id}.stock_size.{t}", "<", n.stock_preinstalled)
        b.add_term(r, vm.stock(n.id, t), 1.0)
        b.add_term(r, e_cap, -1.0)

    if np.isfinite(n.stock_max):
        r = b.add_row(f"{n.id}.stock_potential", "<", n.stock_max - n.stock_preinstalled)
        b.add_term(r, e_cap, 1.0)

    if n.min_soc_frac > 0:
        for t in range(T):
            r = b.add_row(f"{n.id}.min_soc.{t}", "<",
                          -n.min_soc_frac * n.stock_preinstalled)
            b.add_term(r, e_cap, n.min_soc_frac)
            b.add_term(r, vm.stock(n.id, t), -1.0)

    for t in range(T):
        r = b.add_row(f"{n.id}.charge_size.{t}", "<", n.flow_preinstalled)
        b.add_term(r, vm.charge(n.id, n.charge, t), 1.0)
        b.add_term(r, q_cap, -1.0)

    for t in range(T):
        r = b.add_row(f"{n.id}.discharge_size.{t}", "<",
                      n.discharge_ratio * n.flow_preinstalled)
        b.add_term(r, vm.discharge(n.id, n.discharge, t), 1.0)
        b.add_term(r, q_cap, -n.discharge_ratio)

    if np.isfinite(n.flow_max):
        r = b.add_row(f"{n.id}.flow_potential", "<", n.flow_max - n.flow_preinstalled)
        b.add_term(r, q_cap, 1.0)


def resolve_port(system: EnergySystem, vm: VariableMap, ref: PortRef,
                 as_producer: bool, t: int) -> int:
    """Column index of the flow a hyperedge reference points at."""
    n = system.node(ref.node)
    if isinstance(n, ConversionTech):
        return vm.flow(ref.node, ref.commodity, t)
    if as_producer:
        return vm.discharge(ref.node, ref.commodity, t)
    if ref.commodity in n.aux_ports:
        return vm.aux(ref.node, ref.commodity, t)
    return vm.charge(ref.node, ref.commodity, t)


def _emit_balance(b: LpBuilder, vm: VariableMap, system: EnergySystem,
                  e: Hyperedge, T: int) -> None:
    demand = _series(e.demand, T)
    for t in range(T):
        r = b.add_row(f"{e.id}.balance.{t}", "=", float(demand[t]))
        for ref in e.producers:
            b.add_term(r, resolve_port(system, vm, ref, True, t), 1.0)
        for ref in e.consumers:
            b.add_term(r, resolve_port(system, vm, ref, False, t), -1.0)
        if isinstance(e.ens_policy, Penalized):
            b.add_term(r, vm.ens(e.id, t), 1.0)


def atmosphere_flows(system: EnergySystem, vm: VariableMap) -> tuple[list[int], list[int]]:
    """Column indices of atmosphere-release and atmosphere-capture flows."""
    T = system.grid.steps
    releases: list[int] = []
    captures: list[int] = []
    for n in system.nodes:
        if not isinstance(n, ConversionTech) or n.atmosphere_role == "none":
            continue
        cols = [vm.flow(n.id, system.atmosphere_commodity, t) for t in range(T)]
        (releases if n.atmosphere_role == "releases_co2" else captures).extend(cols)
    return releases, captures


def assemble_objective(system: EnergySystem, vm: VariableMap) -> np.ndarray:
    """Cost vector over the compiled columns (M-EUR)."""
    T = system.grid.steps
    years = system.grid.years
    dt = system.grid.step_hours
    c = np.zeros(len(vm))

    for n in system.nodes:
        if isinstance(n, ConversionTech):
            zeta = annualize_capex(n.capex, n.lifetime, system.wacc)
            c[vm.capacity(n.id)] = years * (zeta + n.fixed_om)
            vom = _series(n.var_om, T)
            if np.any(vom):
                for t in range(T):
                    c[vm.flow(n.id, n.reference, t)] += vom[t] * dt
        else:
            stock_ann = annualize_capex(n.stock_capex, n.stock_lifetime, system.wacc)
            flow_ann = annualize_capex(n.flow_capex, n.flow_lifetime, system.wacc)
            c[vm.stock_capacity(n.id)] = years * (stock_ann + n.stock_fixed_om)
            c[vm.flow_capacity(n.id)] = years * (flow_ann + n.flow_fixed_om)
            stock_vom = _series(n.stock_var_om, T)
            flow_vom = _series(n.flow_var_om, T)
            for t in range(T):
                if stock_vom[t]:
                    c[vm.stock(n.id, t)] += stock_vom[t]
                if flow_vom[t]:
                    c[vm.charge(n.id, n.charge, t)] += flow_vom[t] * dt

    for e in system.hyperedges:
        if isinstance(e.ens_policy, Penalized):
            for t in range(T):
                c[vm.ens(e.id, t)] = e.ens_policy.price * dt
    return c


def emit_co2_policy(system: EnergySystem, lp: LpProblem, vm: VariableMap) -> LpProblem:
    """Apply the emission policy: one net-release cap row, or per-flow fees.

    Cap mode appends a single row ``sum_t dt*(releases - captures) <=
    cap * years`` and records its index in ``lp.co2_cap_row`` so the
    shadow price can be read off the duals.  Price mode charges the fee on
    every release flow and credits it on every atmospheric capture.
    """
    policy = system.emission_policy
    if policy is None:
        return lp
    releases, captures = atmosphere_flows(system, vm)
    dt = system.grid.step_hours

    if isinstance(policy, Cap):
        if not (releases or captures):
            raise CompileError("emission cap set but no node releases or captures CO2")
        row = lp.num_rows
        cols = np.array(releases + captures, dtype=np.int64)
        vals = np.concatenate([np.full(len(releases), dt), np.full(len(captures), -dt)])
        keep = vals != 0.0
        return LpProblem(
            c=lp.c,
            a_rows=np.concatenate([lp.a_rows, np.full(keep.sum(), row, dtype=np.int64)]),
            a_cols=np.concatenate([lp.a_cols, cols[keep]]),
            a_vals=np.concatenate([lp.a_vals, vals[keep]]),
            sense=np.concatenate([lp.sense, ["<"]]),
            rhs=np.concatenate([lp.rhs, [policy.kt_per_year * system.grid.years]]),
            lower=lp.lower, upper=lp.upper,
            col_names=lp.col_names, row_names=lp.row_names + ["co2_policy.cap"],
            co2_cap_row=row,
        )

    assert isinstance(policy, Price)
    c = lp.c.copy()
    for j in releases:
        c[j] += policy.per_kt * dt
    for j in captures:
        c[j] -= policy.per_kt * dt
    return lp.with_cost(c)


def build_lp(system: EnergySystem) -> tuple[LpProblem, VariableMap]:
    """Full pipeline: compile, assemble the objective, apply the policy."""
    lp, vm = compile_system(system)
    lp = lp.with_cost(assemble_objective(system, vm))
    lp = emit_co2_policy(system, lp, vm)
    return lp, vm
