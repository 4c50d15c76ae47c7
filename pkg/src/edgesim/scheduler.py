"""Two-phase runtime scheduler.

Phase I maps every layer to its ideal accelerator through its family.
Phase II walks the layers in execution order and keeps a layer with the
previous destination unless the communication-aware rules say moving to
the ideal accelerator pays off. Layers execute sequentially; activations
move between accelerators through DRAM.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .cost import CostOptions, DEFAULT_OPTIONS, compute_bound_latency_s, estimate
from .errors import ConfigurationError
from .families import Family, classify, nearest_family
from .hardware import HardwareSuite
from .ir import LayerKind, ModelGraph
from .metrics import ModelMetrics, model_metrics

#: Low-reuse threshold in MAC/byte; equals 64 FLOP/byte at 2 FLOP per MAC
#: and coincides with the Baseline ridge point.
LOW_REUSE_THRESHOLD_MACS_PER_BYTE = 32.0

#: A layer moves to its ideal accelerator when the previous destination is
#: at least this much slower compute-bound.
COMPUTE_PRESSURE_RATIO = 2.0

_ROUTABLE = (Family.F1, Family.F2, Family.F3, Family.F4, Family.F5)


@dataclass(frozen=True)
class FamilyRouting:
    """Family -> accelerator name map; must cover F1..F5."""

    targets: Mapping[Family, str]

    def __post_init__(self) -> None:
        missing = [f.value for f in _ROUTABLE if f not in self.targets]
        if missing:
            raise ConfigurationError(f"routing is missing families: {', '.join(missing)}")

    def target(self, family: Family) -> str:
        return self.targets[family]


def canonical_routing() -> FamilyRouting:
    return FamilyRouting({
        Family.F1: "Pascal",
        Family.F2: "Pascal",
        Family.F3: "Pavlov",
        Family.F4: "Jacquard",
        Family.F5: "Jacquard",
    })


def single_target_routing(name: str) -> FamilyRouting:
    return FamilyRouting({family: name for family in _ROUTABLE})


class AssignmentReason(str, Enum):
    IDEAL_SAME = "ideal_same"
    MOVED_COND_A = "moved_cond_a"
    MOVED_COND_B = "moved_cond_b"
    STAYED_WITH_PREV = "stayed_with_prev"


@dataclass(frozen=True)
class PhaseOneChoice:
    layer_id: str
    family: Family
    ideal: str


@dataclass(frozen=True)
class Assignment:
    layer_id: str
    family: Family
    ideal: str
    destination: str
    reason: AssignmentReason


@dataclass(frozen=True)
class CommunicationEvent:
    producer: str
    consumer: str
    bytes: int
    via_dram: bool = True


@dataclass(frozen=True)
class SchedulePlan:
    assignments: tuple[Assignment, ...]
    events: tuple[CommunicationEvent, ...]

    def destination(self, layer_id: str) -> str:
        for a in self.assignments:
            if a.layer_id == layer_id:
                return a.destination
        raise KeyError(layer_id)


def phase1(model: ModelGraph, metrics: ModelMetrics, routing: FamilyRouting) -> tuple[PhaseOneChoice, ...]:
    """Ideal accelerator per layer, in isolation.

    Combine stages are cell bookkeeping and follow the gate family (F3).
    Unclassified layers route via the nearest family in log space.
    """
    by_id = metrics.by_id()
    choices: list[PhaseOneChoice] = []
    for layer in model.layers:
        if layer.kind is LayerKind.LSTM_CELL_COMBINE:
            family = Family.F3
        else:
            family = classify(by_id[layer.id], layer.kind)
        routed = family if family is not Family.UNCLASSIFIED else nearest_family(by_id[layer.id])
        choices.append(PhaseOneChoice(layer.id, family, routing.target(routed)))
    return tuple(choices)


def phase2(model: ModelGraph, metrics: ModelMetrics, ideal: tuple[PhaseOneChoice, ...],
           suite: HardwareSuite, options: CostOptions = DEFAULT_OPTIONS) -> SchedulePlan:
    """Finalize destinations with the communication-aware rules.

    For layer i with ideal != previous destination, the layer moves when
    either holds, else it stays with the previous destination:

    * cond A: compute-bound latency on the previous destination is at
      least 2x the compute-bound latency on the ideal accelerator;
    * cond B: the parameter bytes the previous destination would fetch
      exceed the predecessor's output activations, and the layer's
      parameter reuse is below 32 MAC/byte.
    """
    by_id = metrics.by_id()
    try:
        for choice in ideal:
            suite.get(choice.ideal)
    except KeyError as exc:
        raise ConfigurationError(f"suite has no accelerator named {exc}") from None

    assignments: list[Assignment] = []
    for i, layer in enumerate(model.layers):
        choice = ideal[i]
        if i == 0 or choice.ideal == assignments[i - 1].destination:
            assignments.append(Assignment(layer.id, choice.family, choice.ideal,
                                          choice.ideal, AssignmentReason.IDEAL_SAME))
            continue
        prev_dest = assignments[i - 1].destination
        m = by_id[layer.id]
        lat_prev = compute_bound_latency_s(layer, m, suite.get(prev_dest))
        lat_ideal = compute_bound_latency_s(layer, m, suite.get(choice.ideal))
        cond_a = lat_prev >= COMPUTE_PRESSURE_RATIO * lat_ideal and lat_ideal > 0
        fetch_on_prev = estimate(layer, m, suite.get(prev_dest), options).dram_param_bytes
        prev_out = by_id[model.layers[i - 1].id].output_act_bytes
        cond_b = (fetch_on_prev > prev_out
                  and m.param_reuse < LOW_REUSE_THRESHOLD_MACS_PER_BYTE)
        if cond_a:
            dest, reason = choice.ideal, AssignmentReason.MOVED_COND_A
        elif cond_b:
            dest, reason = choice.ideal, AssignmentReason.MOVED_COND_B
        else:
            dest, reason = prev_dest, AssignmentReason.STAYED_WITH_PREV
        assignments.append(Assignment(layer.id, choice.family, choice.ideal, dest, reason))

    events = _communication_events(model, metrics, assignments, suite)
    return SchedulePlan(assignments=tuple(assignments), events=tuple(events))


def _communication_events(model: ModelGraph, metrics: ModelMetrics,
                          assignments: list[Assignment], suite: HardwareSuite) -> list[CommunicationEvent]:
    """Adjacent handoffs between different destinations, plus skip-connection
    sources whose data is absent from (or FIFO-evicted out of) the consumer's
    activation buffer."""
    by_id = metrics.by_id()
    pos = model.index()
    dest = {a.layer_id: a.destination for a in assignments}
    events: list[CommunicationEvent] = []
    for i, layer in enumerate(model.layers):
        if i >= 1:
            prev = model.layers[i - 1]
            if dest[prev.id] != dest[layer.id]:
                events.append(CommunicationEvent(prev.id, layer.id, by_id[prev.id].output_act_bytes))
        for pred in layer.predecessors:
            j = pos[pred]
            if j == i - 1:
                continue
            src_bytes = by_id[pred].output_act_bytes
            if dest[pred] != dest[layer.id]:
                events.append(CommunicationEvent(pred, layer.id, src_bytes))
                continue
            # same accelerator: data survives only if everything written to
            # the activation buffer since then still fits (FIFO eviction)
            buffer = suite.get(dest[layer.id]).act_buffer_bytes
            occupancy = src_bytes
            for k in range(j + 1, i):
                if dest[model.layers[k].id] == dest[layer.id]:
                    occupancy += by_id[model.layers[k].id].output_act_bytes
            if occupancy > buffer:
                events.append(CommunicationEvent(pred, layer.id, src_bytes))
    return events


def schedule(model: ModelGraph, suite: HardwareSuite, routing: FamilyRouting,
             options: CostOptions = DEFAULT_OPTIONS) -> SchedulePlan:
    """Phase I followed by Phase II; deterministic for identical inputs."""
    metrics = model_metrics(model)
    return phase2(model, metrics, phase1(model, metrics, routing), suite, options)
