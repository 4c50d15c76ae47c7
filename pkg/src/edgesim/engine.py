"""Executes a schedule end to end and aggregates model-level reports.

Layers run sequentially on their assigned accelerators; there is no
cross-layer pipelining. Each communication event is a DRAM round trip:
the producer writes at the external bandwidth, the consumer reads at its
own bandwidth, and each byte is charged twice at the destination's DRAM
energy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cost import CostEstimate, CostOptions, DEFAULT_OPTIONS, estimate
from .energy import EnergyBreakdown, layer_energy
from .errors import ConfigurationError
from .families import Family
from .hardware import HardwareSuite, canonical_suite
from .ir import ModelGraph
from .metrics import LayerMetrics, model_metrics
from .scheduler import (
    AssignmentReason,
    CommunicationEvent,
    FamilyRouting,
    SchedulePlan,
    canonical_routing,
    schedule,
    single_target_routing,
)


@dataclass(frozen=True)
class LayerResult:
    layer_id: str
    accelerator: str
    family: Family
    reason: AssignmentReason
    metrics: LayerMetrics
    cost: CostEstimate
    energy: EnergyBreakdown


@dataclass(frozen=True)
class CommunicationResult:
    producer: str
    consumer: str
    bytes: int
    latency_s: float
    energy_j: float


@dataclass(frozen=True)
class AcceleratorSubtotal:
    name: str
    macs: int
    busy_s: float
    energy: EnergyBreakdown
    utilization: float  # MAC-weighted over the layers assigned here


@dataclass(frozen=True)
class SimReport:
    model_name: str
    layers: tuple[LayerResult, ...]
    communications: tuple[CommunicationResult, ...]
    total_macs: int
    total_latency_s: float
    total_energy: EnergyBreakdown
    mean_utilization: float
    throughput_macs_per_s: float
    per_accelerator: tuple[AcceleratorSubtotal, ...]


def _mac_weighted_utilization(rows: Sequence[LayerResult]) -> float:
    weight = sum(r.metrics.macs for r in rows)
    if weight == 0:
        return 0.0
    return sum(r.cost.utilization * r.metrics.macs for r in rows) / weight


def simulate(model: ModelGraph, plan: SchedulePlan, suite: HardwareSuite,
             options: CostOptions = DEFAULT_OPTIONS, include_statics: bool = True,
             include_idle_static: bool = False) -> SimReport:
    """Cost and energy of one inference under the given plan."""
    assigned = {a.layer_id: a for a in plan.assignments}
    for layer in model.layers:
        if layer.id not in assigned:
            raise ConfigurationError(f"plan does not cover layer '{layer.id}'")
    mm = model_metrics(model)
    by_id = mm.by_id()

    rows: list[LayerResult] = []
    for layer in model.layers:
        a = assigned[layer.id]
        try:
            accel = suite.get(a.destination)
        except KeyError:
            raise ConfigurationError(f"plan routes '{layer.id}' to unknown accelerator '{a.destination}'") from None
        cost = estimate(layer, by_id[layer.id], accel, options)
        energy = layer_energy(cost, by_id[layer.id], accel, include_statics)
        rows.append(LayerResult(layer.id, a.destination, a.family, a.reason,
                                by_id[layer.id], cost, energy))

    comms = [_communication_cost(event, assigned[event.consumer].destination, suite)
             for event in plan.events]

    total_latency = sum(r.cost.latency_s for r in rows) + sum(c.latency_s for c in comms)
    total_energy = EnergyBreakdown.zero()
    for r in rows:
        total_energy = total_energy + r.energy
    for c in comms:
        total_energy = total_energy + EnergyBreakdown.dram_only(c.energy_j)

    if include_statics and include_idle_static:
        idle = EnergyBreakdown.zero()
        for accel in suite.accelerators:
            busy = sum(r.cost.latency_s for r in rows if r.accelerator == accel.name)
            span = max(0.0, total_latency - busy)
            kb = (accel.act_buffer_bytes + accel.param_buffer_bytes) / 1024
            idle = idle + EnergyBreakdown(0.0, 0.0, 0.0, 0.0,
                                          accel.energy.p_static_pe * accel.pe_count * span,
                                          accel.energy.p_static_buf * kb * span)
        total_energy = total_energy + idle

    subtotals = []
    for accel in suite.accelerators:
        mine = [r for r in rows if r.accelerator == accel.name]
        if not mine:
            continue
        acc_energy = EnergyBreakdown.zero()
        for r in mine:
            acc_energy = acc_energy + r.energy
        subtotals.append(AcceleratorSubtotal(
            name=accel.name,
            macs=sum(r.metrics.macs for r in mine),
            busy_s=sum(r.cost.latency_s for r in mine),
            energy=acc_energy,
            utilization=_mac_weighted_utilization(mine),
        ))

    return SimReport(
        model_name=model.name,
        layers=tuple(rows),
        communications=tuple(comms),
        total_macs=mm.total_macs,
        total_latency_s=total_latency,
        total_energy=total_energy,
        mean_utilization=_mac_weighted_utilization(rows),
        throughput_macs_per_s=mm.total_macs / total_latency if total_latency > 0 else 0.0,
        per_accelerator=tuple(subtotals),
    )


def _communication_cost(event: CommunicationEvent, dest_name: str,
                        suite: HardwareSuite) -> CommunicationResult:
    dest = suite.get(dest_name)
    write_s = event.bytes / suite.dram.ext_bandwidth_bytes_per_s
    read_s = event.bytes / dest.mem_bandwidth_bytes_per_s
    return CommunicationResult(
        producer=event.producer,
        consumer=event.consumer,
        bytes=event.bytes,
        latency_s=write_s + read_s,
        energy_j=2 * event.bytes * dest.energy.e_dram,
    )


# ---------------------------------------------------------------------------
# scenario comparison


@dataclass(frozen=True)
class Scenario:
    name: str
    suite: HardwareSuite
    routing: FamilyRouting


def canonical_scenarios() -> tuple[Scenario, ...]:
    """Baseline, Base+HB, and the three-accelerator heterogeneous setup."""
    suite = canonical_suite()
    dram = suite.dram

    def only(*names: str) -> HardwareSuite:
        return HardwareSuite(tuple(suite.get(n) for n in names), dram)

    return (
        Scenario("Baseline", only("Baseline"), single_target_routing("Baseline")),
        Scenario("Base+HB", only("Base+HB"), single_target_routing("Base+HB")),
        Scenario("Mensa-G", only("Pascal", "Pavlov", "Jacquard"), canonical_routing()),
    )


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    energy_j: float
    latency_s: float
    throughput_macs_per_s: float
    mean_utilization: float
    energy_efficiency_x: float
    throughput_x: float
    latency_x: float


@dataclass(frozen=True)
class ComparisonTable:
    baseline: str
    rows: tuple[ScenarioResult, ...]


def compare_suites(models: ModelGraph | Sequence[ModelGraph], scenarios: Sequence[Scenario],
                   baseline: str, options: CostOptions = DEFAULT_OPTIONS) -> ComparisonTable:
    """Totals per scenario plus improvement ratios relative to the baseline.

    With several models, totals aggregate over all of them. All three
    ratios are reported baseline-over-scenario style, so larger is better.
    """
    if isinstance(models, ModelGraph):
        models = [models]
    if baseline not in {s.name for s in scenarios}:
        raise ConfigurationError(f"baseline scenario '{baseline}' is not among the scenarios")

    totals: dict[str, tuple[float, float, float, float]] = {}
    for scen in scenarios:
        energy = latency = macs = util_weight = 0.0
        for model in models:
            plan = schedule(model, scen.suite, scen.routing, options)
            report = simulate(model, plan, scen.suite, options)
            energy += report.total_energy.total
            latency += report.total_latency_s
            macs += report.total_macs
            util_weight += report.mean_utilization * report.total_macs
        totals[scen.name] = (energy, latency, macs, util_weight / macs if macs else 0.0)

    base_energy, base_latency, base_macs, _ = totals[baseline]
    rows = []
    for scen in scenarios:
        energy, latency, macs, util = totals[scen.name]
        throughput = macs / latency if latency else 0.0
        base_throughput = base_macs / base_latency if base_latency else 0.0
        rows.append(ScenarioResult(
            scenario=scen.name,
            energy_j=energy,
            latency_s=latency,
            throughput_macs_per_s=throughput,
            mean_utilization=util,
            energy_efficiency_x=base_energy / energy if energy else float("inf"),
            throughput_x=throughput / base_throughput if base_throughput else float("inf"),
            latency_x=base_latency / latency if latency else float("inf"),
        ))
    return ComparisonTable(baseline=baseline, rows=tuple(rows))
