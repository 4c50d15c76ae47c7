"""Analytical dataflow cost model.

For a (layer, accelerator) pair this derives DRAM traffic, buffer and NoC
activity, compute cycles, latency, PE utilization, and the bottleneck.

Latency model: one array cycle retires one MAC per usable PE lane, so a
saturated array runs at the accelerator's peak MAC rate. Compute and
memory fully overlap by default, which produces the sharp knee of a
throughput roofline; an additive mode exists for sensitivity studies.

Traffic model per dataflow:

* parameters stream from DRAM once per inference for conv/FC layers
  regardless of buffer fit (cross-tile refetch is out of scope). LSTM gate
  weights are refetched once per timestep and cell unless the dataflow
  multicasts them temporally from PE registers (Pavlov, Jacquard), which
  fetches them exactly once.
* activations stream in and out of DRAM; the Pascal dataflow accumulates
  each output inside one PE across cycles and therefore emits no output
  store traffic.
* only the Jacquard dataflow spatially reduces partial sums over the NoC:
  each output gathers (lanes - 1) partial sums of 4 bytes, where lanes is
  the spatial reduction width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .hardware import AcceleratorConfig, DataflowKind
from .ir import LayerDescriptor, LayerKind, MvmRole
from .metrics import LayerMetrics
from .errors import ValidationError

#: 32-bit accumulators for 8-bit MACs.
PARTIAL_SUM_BYTES = 4


class Bottleneck(str, Enum):
    COMPUTE = "compute"
    MEMORY = "memory"


@dataclass(frozen=True)
class CostOptions:
    #: overlap compute and memory (max); False adds them instead
    overlap: bool = True
    #: steady state: conv/FC parameters that fit the buffer are already
    #: resident from the previous inference and are not refetched
    steady_state: bool = False


DEFAULT_OPTIONS = CostOptions()


@dataclass(frozen=True)
class CostEstimate:
    compute_cycles: int
    dram_param_bytes: int
    dram_act_bytes: int
    param_buf_accesses: int
    act_buf_accesses: int
    noc_bytes: int
    latency_s: float
    utilization: float
    bottleneck: Bottleneck

    @property
    def dram_bytes_total(self) -> int:
        return self.dram_param_bytes + self.dram_act_bytes


def _outputs(layer: LayerDescriptor) -> int:
    if layer.kind in (LayerKind.LSTM_GATE, LayerKind.LSTM_CELL_COMBINE):
        r = layer.recurrent
        assert r is not None
        return r.h * r.c
    s = layer.conv
    assert s is not None
    return s.ho * s.wo * s.co


def _reduction_width(layer: LayerDescriptor) -> int:
    """Length of the per-output dot product exposed to spatial reduction."""
    if layer.kind is LayerKind.LSTM_GATE:
        r = layer.recurrent
        assert r is not None
        return r.d if layer.mvm is MvmRole.INPUT_MVM else r.h
    if layer.kind is LayerKind.LSTM_CELL_COMBINE:
        return 1
    s = layer.conv
    assert s is not None
    return s.ci


def param_fetch_multiplier(layer: LayerDescriptor, accel: AcceleratorConfig) -> int:
    """How many times each parameter byte crosses the DRAM interface.

    Conv/FC layers stream their weights once. LSTM gate weights are
    refetched every timestep and cell unless the dataflow keeps them in PE
    registers across the recurrence.
    """
    if layer.kind is not LayerKind.LSTM_GATE:
        return 1
    if accel.dataflow in (DataflowKind.PAVLOV_FLOW, DataflowKind.JACQUARD_FLOW):
        return 1
    r = layer.recurrent
    assert r is not None
    return r.t * r.c


def effective_parallelism(layer: LayerDescriptor, accel: AcceleratorConfig) -> int:
    """Concurrently usable MAC lanes for this layer under the dataflow."""
    pes = accel.pe_count
    flow = accel.dataflow
    if flow is DataflowKind.PASCAL_FLOW:
        lanes = min(pes, _outputs(layer))
    elif flow is DataflowKind.PAVLOV_FLOW:
        if layer.kind in (LayerKind.LSTM_GATE, LayerKind.LSTM_CELL_COMBINE):
            # the four gates of a cell are computed in parallel
            r = layer.recurrent
            assert r is not None
            lanes = min(pes, 4 * r.h)
        else:
            lanes = min(pes, _outputs(layer))
    elif flow is DataflowKind.JACQUARD_FLOW:
        lanes = min(pes, _reduction_width(layer))
    else:  # monolithic baseline
        if layer.kind in (LayerKind.LSTM_GATE, LayerKind.LSTM_CELL_COMBINE):
            # whole-gate barrier: a gate occupies at most H lanes at a time
            r = layer.recurrent
            assert r is not None
            lanes = min(pes, r.h)
        else:
            lanes = min(pes, _outputs(layer))
    return max(1, lanes)


def _buffer_accesses(layer: LayerDescriptor, accel: AcceleratorConfig,
                     metrics: LayerMetrics, cycles: int, dram_param: int) -> tuple[int, int]:
    """(param, act) buffer byte-accesses under the dataflow's reuse pattern."""
    flow = accel.dataflow
    if flow is DataflowKind.PASCAL_FLOW:
        param = cycles  # one read per cycle, spatially multicast to all lanes
    elif flow is DataflowKind.PAVLOV_FLOW:
        param = 0       # no parameter buffer: DRAM streams into PE registers
    elif flow is DataflowKind.JACQUARD_FLOW:
        param = dram_param  # staged once, then multicast temporally from registers
    else:
        param = metrics.macs  # every MAC reads its weight byte from the buffer
    if flow in (DataflowKind.PAVLOV_FLOW, DataflowKind.JACQUARD_FLOW):
        act_reads = cycles  # one input byte per cycle, spatially multicast
    else:
        act_reads = metrics.macs
    return param, act_reads + metrics.output_act_bytes


def estimate(layer: LayerDescriptor, metrics: LayerMetrics, accel: AcceleratorConfig,
             options: CostOptions = DEFAULT_OPTIONS) -> CostEstimate:
    """Cost of running one layer on one accelerator."""
    lanes = effective_parallelism(layer, accel)
    cycles = math.ceil(metrics.macs / lanes) if metrics.macs else 0
    # one cycle = time for the full array to retire pe_count MACs at peak
    cycle_s = accel.pe_count / accel.peak_macs_per_s
    compute_s = cycles * cycle_s

    miss_fraction = 1
    if (options.steady_state and layer.kind is not LayerKind.LSTM_GATE
            and 0 < metrics.param_bytes <= accel.param_buffer_bytes):
        miss_fraction = 0
    dram_param = metrics.param_bytes * param_fetch_multiplier(layer, accel) * miss_fraction

    dram_act = metrics.input_act_bytes
    if accel.dataflow is not DataflowKind.PASCAL_FLOW:
        dram_act += metrics.output_act_bytes

    noc = 0
    if accel.dataflow is DataflowKind.JACQUARD_FLOW and metrics.macs:
        lanes_red = min(accel.pe_count, _reduction_width(layer))
        noc = _outputs(layer) * (lanes_red - 1) * PARTIAL_SUM_BYTES

    param_acc, act_acc = _buffer_accesses(layer, accel, metrics, cycles, dram_param)

    mem_s = (dram_param + dram_act) / accel.mem_bandwidth_bytes_per_s
    latency = max(compute_s, mem_s) if options.overlap else compute_s + mem_s
    if latency > 0:
        utilization = min(1.0, max(0.0, metrics.macs / (accel.peak_macs_per_s * latency)))
    else:
        utilization = 0.0
    bottleneck = Bottleneck.COMPUTE if compute_s >= mem_s else Bottleneck.MEMORY

    return CostEstimate(
        compute_cycles=cycles,
        dram_param_bytes=dram_param,
        dram_act_bytes=dram_act,
        param_buf_accesses=param_acc,
        act_buf_accesses=act_acc,
        noc_bytes=noc,
        latency_s=latency,
        utilization=utilization,
        bottleneck=bottleneck,
    )


def roofline_attainable(intensity: float, accel: AcceleratorConfig) -> float:
    """Attainable MAC rate at the given arithmetic intensity (MAC/byte)."""
    if intensity < 0:
        raise ValidationError("intensity must be non-negative")
    return min(accel.peak_macs_per_s, accel.mem_bandwidth_bytes_per_s * intensity)


def ridge_point(accel: AcceleratorConfig) -> float:
    """Intensity (MAC/byte) where the roofline reaches peak throughput."""
    return accel.peak_macs_per_s / accel.mem_bandwidth_bytes_per_s


def compute_bound_latency_s(layer: LayerDescriptor, metrics: LayerMetrics,
                            accel: AcceleratorConfig) -> float:
    """Latency with infinite bandwidth, without cycle rounding.

    Used for scheduling comparisons: leaving out the ceil makes the
    compute-latency ratio between two accelerators invariant under a
    common scaling of the layer's MAC count.
    """
    lanes = effective_parallelism(layer, accel)
    return metrics.macs * accel.pe_count / (lanes * accel.peak_macs_per_s)
