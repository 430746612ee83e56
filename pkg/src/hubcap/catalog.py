"""Ready-made technology parameter presets.

Each preset builds a fully wired :class:`ConversionTech` or
:class:`StorageTech` template with default commodity ids and cluster
labels; callers rewire via builder keyword arguments or
``dataclasses.replace``.  Presets whose numbers are pinned by this catalog
carry ``source="catalog"``; entries inheriting figures from antecedent
techno-economic models carry ``source="antecedent"`` and should be treated
as placeholders to override with project data.

Cost figures are M-EUR, energy GWh, mass kt; capture/transport capacities
are kt/h of the reference flow, power capacities GW.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ConversionTech, Port, StorageTech

#: Higher heating value of methane used for mass<->energy conversions, GWh/kt.
CH4_HHV_GWH_PER_KT = 15.44

#: kt of CO2 / kt of H2 consumed per kt of CH4 synthesized (mass stoichiometry).
CH4_CO2_PER_KT = 44.0 / 16.0
CH4_H2_PER_KT = 8.0 / 16.0

#: Belgian industry + energy-sector CO2 source, kt/h (40 Mt over 8760 h).
BE_CO2_SOURCE_KT_PER_H = 40_000.0 / 8760.0


@dataclass(frozen=True)
class Preset:
    name: str
    builds: ConversionTech | StorageTech
    source: str   # "catalog" = numbers pinned here; "antecedent" = placeholder
    note: str


def pccc(node_id: str = "pccc_be", cluster: str = "BE", *,
         flue: str = "co2_flue_be", electricity: str = "electricity_be",
         captured: str = "co2_captured_be", atmosphere: str = "co2_atmosphere",
         capture_efficiency: float = 0.9) -> ConversionTech:
    """Post-combustion capture sized by flue throughput (kt/h)."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=flue,
        ports={
            flue: Port("in", 1.0),
            electricity: Port("in", 0.4125),
            captured: Port("out", capture_efficiency),
            atmosphere: Port("out", 1.0 - capture_efficiency),
        },
        capex=3150.0, lifetime=20, fixed_om=0.0, var_om=0.0,
        atmosphere_role="releases_co2", category="CO2 Infra",
    )


def pccc_ccgt(node_id: str = "pccc_ccgt_be", cluster: str = "BE", *,
              flue: str = "co2_flue_ccgt_be", **kwargs) -> ConversionTech:
    """Post-combustion capture wired to the gas-turbine flue stream."""
    return pccc(node_id, cluster, flue=flue, **kwargs)


def dac(node_id: str = "dac_dz", cluster: str = "DZ", *,
        captured: str = "co2_dz", electricity: str = "electricity_dz",
        hydrogen: str = "hydrogen_dz", water: str = "water_dz",
        atmosphere: str = "co2_atmosphere",
        gas: str = "gas_dz", gas_use_gwh_per_kt: float = 0.0) -> ConversionTech:
    """Direct air capture sized by CO2 output (kt/h).

    ``gas_use_gwh_per_kt`` adds an optional gas-heat input port; it
    defaults to 0 (electricity-only operation).
    """
    ports = {
        captured: Port("out", 1.0),
        atmosphere: Port("in", 1.0),
        electricity: Port("in", 0.1091),
        hydrogen: Port("in", 0.0438),
        water: Port("in", 5.0),
    }
    if gas_use_gwh_per_kt > 0:
        ports[gas] = Port("in", gas_use_gwh_per_kt)
    return ConversionTech(
        id=node_id, cluster=cluster, reference=captured, ports=ports,
        capex=4801.4, lifetime=30, fixed_om=0.0, var_om=0.0,
        atmosphere_role="captures_co2", category="CO2 Infra",
    )


def _shipping_link(node_id, cluster, cargo_in, delivered_out, fuel, *,
                   cargo_capex, lifetime, loading_hours, travel_hours,
                   fuel_gwh_per_day, cargo_kt, category, delay_steps):
    """Continuous-flow carrier: fleet capex = cargo capex x round-trip hours.

    Sustaining 1 unit/h of delivered flow needs one round trip's worth of
    cargo capacity in transit; fuel use is prorated per unit shipped from
    the per-day consumption of a reference ``cargo_kt`` carrier.
    ``delay_steps`` shifts the cargo intake relative to delivery and
    defaults to the voyage duration at 1 h steps; pass 0 for a purely
    continuous link.
    """
    voyage = loading_hours + travel_hours
    fuel_per_unit = fuel_gwh_per_day * (voyage / 24.0) / cargo_kt
    if delay_steps is None:
        delay_steps = int(voyage)
    return ConversionTech(
        id=node_id, cluster=cluster, reference=delivered_out,
        ports={
            delivered_out: Port("out", 1.0),
            cargo_in: Port("in", 1.0, delay=delay_steps),
            fuel: Port("in", fuel_per_unit),
        },
        capex=cargo_capex * 2 * voyage, lifetime=lifetime, category=category,
    )


def co2_carrier(node_id: str = "co2_carrier_dz", cluster: str = "DZ", *,
                cargo_in: str = "co2_captured_be", delivered_out: str = "co2_dz",
                fuel: str = "gas_dz", loading_hours: int = 24,
                travel_hours: int = 116, cargo_kt: float = 1.0,
                delay_steps: int | None = None) -> ConversionTech:
    """Liquefied-CO2 shipping from the demand center to a hub."""
    return _shipping_link(
        node_id, cluster, cargo_in, delivered_out, fuel,
        cargo_capex=5.0, lifetime=40, loading_hours=loading_hours,
        travel_hours=travel_hours, fuel_gwh_per_day=0.0150, cargo_kt=cargo_kt,
        category="CO2 Infra", delay_steps=delay_steps)


def ch4_carrier(node_id: str = "ch4_carrier_dz", cluster: str = "DZ", *,
                cargo_in: str = "gas_dz", delivered_out: str = "gas_be",
                loading_hours: int = 24, travel_hours: int = 116,
                delay_steps: int | None = None) -> ConversionTech:
    """Liquefied-methane shipping from a hub to the demand center (GWh/h)."""
    voyage = loading_hours + travel_hours
    if delay_steps is None:
        delay_steps = int(voyage)
    return ConversionTech(
        id=node_id, cluster=cluster, reference=delivered_out,
        ports={
            delivered_out: Port("out", 1.0),
            # 2% of the cargo is burnt for propulsion and boil-off.
            cargo_in: Port("in", 1.0 / 0.98, delay=delay_steps),
        },
        capex=0.30 * 2 * voyage, lifetime=30, category="Transport",
    )


def electrolysis(node_id: str = "electrolysis_dz", cluster: str = "DZ", *,
                 hydrogen: str = "hydrogen_dz", electricity: str = "electricity_dz",
                 water: str = "water_dz") -> ConversionTech:
    """Water electrolysis sized by H2 output (kt/h)."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=hydrogen,
        ports={
            hydrogen: Port("out", 1.0),
            electricity: Port("in", 50.0),
            water: Port("in", 9.0),
        },
        capex=30_000.0, lifetime=15, fixed_om=600.0, category="Conversion",
    )


def methanation(node_id: str = "methanation_dz", cluster: str = "DZ", *,
                gas: str = "gas_dz", hydrogen: str = "hydrogen_dz",
                co2: str = "co2_dz") -> ConversionTech:
    """CO2 methanation sized by CH4 output in GWh/h (HHV basis)."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=gas,
        ports={
            gas: Port("out", 1.0),
            hydrogen: Port("in", CH4_H2_PER_KT / CH4_HHV_GWH_PER_KT),
            co2: Port("in", CH4_CO2_PER_KT / CH4_HHV_GWH_PER_KT),
        },
        capex=300.0, lifetime=20, fixed_om=9.0, category="Conversion",
    )


def _vre(node_id, cluster, electricity, *, max_potential, capex, lifetime,
         fixed_om) -> ConversionTech:
    return ConversionTech(
        id=node_id, cluster=cluster, reference=electricity,
        ports={electricity: Port("out", 1.0)},
        max_potential=max_potential, capex=capex, lifetime=lifetime,
        fixed_om=fixed_om, category="Power",
    )


def wind_onshore_be(node_id: str = "wind_on_be", cluster: str = "BE", *,
                    electricity: str = "electricity_be") -> ConversionTech:
    return _vre(node_id, cluster, electricity, max_potential=8.4,
                capex=1300.0, lifetime=25, fixed_om=35.0)


def wind_offshore_be(node_id: str = "wind_off_be", cluster: str = "BE", *,
                     electricity: str = "electricity_be") -> ConversionTech:
    return _vre(node_id, cluster, electricity, max_potential=8.0,
                capex=3000.0, lifetime=25, fixed_om=80.0)


def solar_be(node_id: str = "solar_be", cluster: str = "BE", *,
             electricity: str = "electricity_be") -> ConversionTech:
    return _vre(node_id, cluster, electricity, max_potential=40.0,
                capex=600.0, lifetime=25, fixed_om=10.0)


def ccgt_be(node_id: str = "ccgt_be", cluster: str = "BE", *,
            electricity: str = "electricity_be", gas: str = "gas_be",
            flue: str = "co2_flue_ccgt_be", efficiency: float = 0.58) -> ConversionTech:
    """Gas turbine sized by electric output; flue CO2 is a separate stream."""
    gas_per_el = 1.0 / efficiency
    co2_per_el = gas_per_el * CH4_CO2_PER_KT / CH4_HHV_GWH_PER_KT
    return ConversionTech(
        id=node_id, cluster=cluster, reference=electricity,
        ports={
            electricity: Port("out", 1.0),
            gas: Port("in", gas_per_el),
            flue: Port("out", co2_per_el),
        },
        capex=900.0, lifetime=25, fixed_om=20.0, var_om=0.002,
        ramp_up=1.0, ramp_down=1.0, category="Power",
    )


def hvdc(node_id: str = "hvdc_dz", cluster: str = "DZ", *,
         electricity_in: str = "electricity_dz", electricity_out: str = "electricity_be",
         km: float = 1000.0, loss_per_1000km: float = 0.03) -> ConversionTech:
    """HVDC corridor sized by received power (GW)."""
    loss = loss_per_1000km * km / 1000.0
    return ConversionTech(
        id=node_id, cluster=cluster, reference=electricity_out,
        ports={
            electricity_out: Port("out", 1.0),
            electricity_in: Port("in", 1.0 / (1.0 - loss)),
        },
        capex=300.0 + 0.255 * km, lifetime=40, category="Transport",
    )


def co2_pipe(node_id: str = "co2_pipe_dz", cluster: str = "DZ", *,
             cargo_in: str = "co2_captured_be", delivered_out: str = "co2_dz",
             electricity: str = "electricity_be", km: float = 2000.0) -> ConversionTech:
    """CO2 pipeline with compression electricity drawn at the sending end."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=delivered_out,
        ports={
            delivered_out: Port("out", 1.0),
            cargo_in: Port("in", 1.0),
            electricity: Port("in", 0.11 + 0.002 * km / 100.0),
        },
        capex=0.30 * km, lifetime=40, category="CO2 Infra",
    )


def co2_source_be(node_id: str = "co2_source_be", cluster: str = "BE", *,
                  flue: str = "co2_flue_be",
                  kt_per_h: float = BE_CO2_SOURCE_KT_PER_H) -> ConversionTech:
    """Must-run industrial flue-gas source, preinstalled at the yearly total."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=flue,
        ports={flue: Port("out", 1.0)},
        preinstalled=kt_per_h, max_potential=kt_per_h, must_run=1.0,
        category="CO2 Infra",
    )


def co2_vent(node_id: str = "co2_vent_be", cluster: str = "BE", *,
             flue: str = "co2_flue_be", atmosphere: str = "co2_atmosphere") -> ConversionTech:
    """Free venting of uncaptured flue gas to the atmosphere."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=flue,
        ports={flue: Port("in", 1.0), atmosphere: Port("out", 1.0)},
        atmosphere_role="releases_co2", category="CO2 Infra",
    )


def co2_export(node_id: str = "co2_export_be", cluster: str = "BE", *,
               captured: str = "co2_captured_be") -> ConversionTech:
    """Export of captured CO2 for sequestration, paid per kt shipped."""
    return ConversionTech(
        id=node_id, cluster=cluster, reference=captured,
        ports={captured: Port("in", 1.0)},
        var_om=0.015, category="CO2 Infra",
    )


def water_source(node_id: str = "water_src_dz", cluster: str = "DZ", *,
                 water: str = "water_dz") -> ConversionTech:
    return ConversionTech(
        id=node_id, cluster=cluster, reference=water,
        ports={water: Port("out", 1.0)},
        var_om=0.0002, category="Conversion",
    )


def battery(node_id: str = "battery_dz", cluster: str = "DZ", *,
            electricity: str = "electricity_dz") -> StorageTech:
    return StorageTech(
        id=node_id, cluster=cluster, stored_commodity=electricity,
        self_discharge=0.00004, charge_eff=0.959, discharge_eff=0.959,
        stock_capex=142.0, stock_lifetime=10, stock_fixed_om=5.0,
        flow_capex=160.0, flow_lifetime=10, category="Flexibility",
    )


def h2_storage(node_id: str = "h2_storage_dz", cluster: str = "DZ", *,
               hydrogen: str = "hydrogen_dz") -> StorageTech:
    return StorageTech(
        id=node_id, cluster=cluster, stored_commodity=hydrogen,
        charge_eff=0.98, discharge_eff=0.98,
        stock_capex=45.0, stock_lifetime=30, stock_fixed_om=2.25,
        flow_capex=0.0, flow_preinstalled=1e6, category="Flexibility",
    )


def co2_storage(node_id: str = "co2_storage_dz", cluster: str = "DZ", *,
                co2: str = "co2_dz") -> StorageTech:
    return StorageTech(
        id=node_id, cluster=cluster, stored_commodity=co2,
        charge_eff=1.0, discharge_eff=1.0,
        stock_capex=2.0, stock_lifetime=30,
        flow_capex=0.0, flow_preinstalled=1e6, category="CO2 Infra",
    )


_CATALOG: dict[str, tuple] = {
    "pccc": (pccc, "catalog",
             "CAPEX 3150 M-EUR per kt/h of flue throughput, 20 yr life; "
             "0.4125 GWh electricity per kt processed; 90% of the inlet "
             "stream routed to the captured port, 10% vented; FOM/VOM "
             "neglected."),
    "pccc_ccgt": (pccc_ccgt, "catalog",
                  "Same unit costs as `pccc`, wired to the gas-turbine flue "
                  "stream."),
    "dac": (dac, "catalog",
            "CAPEX 4801.4 M-EUR per kt/h captured, 30 yr life; per kt: "
            "0.1091 GWh electricity, 0.0438 kt H2, 5.0 kt water; optional "
            "gas-heat port defaults to 0; FOM/VOM neglected."),
    "co2_carrier": (co2_carrier, "catalog",
                    "Cargo CAPEX 5 M-EUR/kt, 40 yr life, 0.0150 GWh/day fuel "
                    "per reference 1 kt carrier; 24 h loading + 116 h travel "
                    "enter as the delivery delay; fleet capex per kt/h = "
                    "cargo capex x round-trip hours (continuous flow)."),
    "ch4_carrier": (ch4_carrier, "antecedent",
                    "Cargo CAPEX 0.30 M-EUR/GWh and 2% self-consumption are "
                    "placeholders from antecedent shipping models; loading/"
                    "travel times mirror the CO2 carrier."),
    "electrolysis": (electrolysis, "antecedent",
                     "50 GWh electricity and 9 kt water per kt H2, CAPEX "
                     "30000 M-EUR per kt/h (600 EUR/kW-el): antecedent "
                     "placeholders, override with project data."),
    "methanation": (methanation, "antecedent",
                    "Mass stoichiometry 2.75 kt CO2 and 0.5 kt H2 per kt CH4 "
                    "converted to the GWh(HHV) basis at 15.44 GWh/kt; CAPEX "
                    "300 M-EUR per GWh/h is an antecedent placeholder."),
    "wind_onshore_be": (wind_onshore_be, "antecedent",
                        "Potential pinned at 8.4 GW; cost figures (1300 "
                        "M-EUR/GW, 25 yr) are antecedent placeholders."),
    "wind_offshore_be": (wind_offshore_be, "antecedent",
                         "Potential pinned at 8.0 GW; cost figures (3000 "
                         "M-EUR/GW, 25 yr) are antecedent placeholders."),
    "solar_be": (solar_be, "antecedent",
                 "Potential pinned at 40 GW; cost figures (600 M-EUR/GW, "
                 "25 yr) are antecedent placeholders."),
    "ccgt_be": (ccgt_be, "antecedent",
                "58% HHV efficiency, CAPEX 900 M-EUR/GW: antecedent "
                "placeholders; flue CO2 0.3071 kt/GWh-el follows from the "
                "methane stoichiometry at that efficiency."),
    "hvdc": (hvdc, "antecedent",
             "300 M-EUR/GW stations + 0.255 M-EUR/GW/km line, 3% loss per "
             "1000 km: antecedent placeholders."),
    "co2_pipe": (co2_pipe, "antecedent",
                 "0.30 M-EUR per kt/h per km and compression electricity "
                 "0.002 GWh/kt per 100 km: antecedent placeholders."),
    "co2_source_be": (co2_source_be, "catalog",
                      "40 Mt/yr industry + energy-sector emissions = "
                      "4.566 kt/h, must-run, preinstalled at no cost."),
    "co2_vent": (co2_vent, "catalog", "Free venting of flue gas; the released "
                                      "flow enters the emission accounting."),
    "co2_export": (co2_export, "antecedent",
                   "15 EUR/t sequestration fee: antecedent placeholder."),
    "water_source": (water_source, "antecedent",
                     "Desalinated water at 0.2 EUR/t: antecedent placeholder."),
    "battery": (battery, "antecedent",
                "Li-ion figures (142 M-EUR/GWh stock, 160 M-EUR/GW flow, "
                "96% one-way efficiency): antecedent placeholders."),
    "h2_storage": (h2_storage, "antecedent",
                   "Salt-cavern style storage, 45 M-EUR/kt stock: antecedent "
                   "placeholder; flow capacity effectively unconstrained."),
    "co2_storage": (co2_storage, "antecedent",
                    "Liquefied CO2 buffer at 2 M-EUR/kt stock: antecedent "
                    "placeholder."),
}


def list_presets() -> list[str]:
    """Sorted preset names; stable across calls."""
    return sorted(_CATALOG)


def preset(name: str) -> Preset:
    """Build the named preset with default wiring."""
    try:
        builder, source, note = _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets())}") from None
    return Preset(name=name, builds=builder(), source=source, note=note)


def build(name: str, **kwargs) -> ConversionTech | StorageTech:
    """Build the named preset's tech with rewired ids/commodities."""
    try:
        builder, _, _ = _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets())}") from None
    return builder(**kwargs) if kwargs else builder()
