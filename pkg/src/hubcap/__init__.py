"""hubcap: capacity-expansion and dispatch optimization for multi-energy hubs.

Build an :class:`EnergySystem` (by hand or from catalog presets), compile
it to a sparse LP, solve with the embedded simplex, and derive economic
indicators from the primal/dual solution.  The ``hubcap`` CLI drives the
same pipeline from declarative YAML configs.
"""

from .analysis import (ScenarioReport, build_report, co2_shadow_price,
                       cost_breakdown, ens_shadow_prices, fuel_cost_per_mwh,
                       net_co2_balance)
from .catalog import Preset, build, list_presets, preset
from .compiler import (CompileError, annualize_capex, assemble_objective,
                       build_lp, compile_system, emit_co2_policy)
from .interchange import export_interchange, to_lp_text, to_mps
from .lp import LpProblem, VariableMap, VarKey
from .model import (Cap, Commodity, ConversionTech, EnergySystem, FORBIDDEN,
                    Forbidden, Hyperedge, Penalized, Port, PortRef, Price,
                    ReportTags, StorageTech, TimeGrid, Violation, force_hub,
                    validate_system)
from .series import read_series, synth_series, write_series
from .simplex import (KktResiduals, SingularBasisError, Solution, SolveOptions,
                      solve, verify_kkt)

__version__ = "0.1.0"

__all__ = [
    "Cap", "Commodity", "CompileError", "ConversionTech", "EnergySystem",
    "FORBIDDEN", "Forbidden", "Hyperedge", "KktResiduals", "LpProblem",
    "Penalized", "Port", "PortRef", "Preset", "Price", "ReportTags",
    "ScenarioReport", "SingularBasisError", "Solution", "SolveOptions",
    "StorageTech", "TimeGrid", "VarKey", "VariableMap", "Violation",
    "annualize_capex", "assemble_objective", "build", "build_lp",
    "build_report", "co2_shadow_price", "compile_system", "cost_breakdown",
    "emit_co2_policy", "ens_shadow_prices", "export_interchange",
    "force_hub", "fuel_cost_per_mwh", "list_presets", "net_co2_balance",
    "preset", "read_series", "solve", "synth_series", "to_lp_text", "to_mps",
    "validate_system", "verify_kkt", "write_series",
]
