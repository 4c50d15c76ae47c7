"""Static + dynamic energy over the PE array, buffers, NoC, and DRAM."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .cost import CostEstimate
from .errors import ValidationError
from .hardware import KIB, AcceleratorConfig, EnergyCoefficients
from .metrics import LayerMetrics


@dataclass(frozen=True)
class EnergyBreakdown:
    pe_dynamic: float
    buf_dynamic: float
    noc: float
    dram: float
    pe_static: float
    buf_static: float

    @property
    def total(self) -> float:
        return (self.pe_dynamic + self.buf_dynamic + self.noc + self.dram
                + self.pe_static + self.buf_static)

    def __add__(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        return EnergyBreakdown(
            pe_dynamic=self.pe_dynamic + other.pe_dynamic,
            buf_dynamic=self.buf_dynamic + other.buf_dynamic,
            noc=self.noc + other.noc,
            dram=self.dram + other.dram,
            pe_static=self.pe_static + other.pe_static,
            buf_static=self.buf_static + other.buf_static,
        )

    @staticmethod
    def zero() -> "EnergyBreakdown":
        return EnergyBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def dram_only(joules: float) -> "EnergyBreakdown":
        return EnergyBreakdown(0.0, 0.0, 0.0, joules, 0.0, 0.0)


def layer_energy(cost: CostEstimate, metrics: LayerMetrics, accel: AcceleratorConfig,
                 include_statics: bool = True) -> EnergyBreakdown:
    """Energy of one layer execution whose cost was estimated on ``accel``.

    Static power accrues over the layer's own latency on its assigned
    accelerator only; registers are not counted as buffer capacity.
    """
    e = accel.energy
    buf_kb = (accel.act_buffer_bytes + accel.param_buffer_bytes) / KIB
    if include_statics:
        pe_static = e.p_static_pe * accel.pe_count * cost.latency_s
        buf_static = e.p_static_buf * buf_kb * cost.latency_s
    else:
        pe_static = buf_static = 0.0
    return EnergyBreakdown(
        pe_dynamic=metrics.macs * e.e_mac,
        buf_dynamic=cost.param_buf_accesses * e.e_param_buf + cost.act_buf_accesses * e.e_act_buf,
        noc=cost.noc_bytes * e.e_noc,
        dram=cost.dram_bytes_total * e.e_dram,
        pe_static=pe_static,
        buf_static=buf_static,
    )


def energy_roofline(intensity: float, coeffs: EnergyCoefficients) -> float:
    """Maximum attainable efficiency in MAC/J at the given intensity.

    A smooth curve: memory energy cannot be hidden the way memory time
    can, so efficiency approaches 1/e_mac only asymptotically.
    """
    if intensity <= 0:
        raise ValidationError("intensity must be positive")
    return 1.0 / (coeffs.e_mac + coeffs.e_dram / intensity)


def buffer_effectiveness(layer_param_bytes: float, param_buffer_bytes: float) -> float:
    """Fraction of a layer's parameters the buffer can hold."""
    if param_buffer_bytes < 0:
        raise ValidationError("buffer size must be non-negative")
    if layer_param_bytes == 0:
        return 1.0
    return min(1.0, param_buffer_bytes / layer_param_bytes)


def model_buffer_effectiveness(param_bytes_per_layer: Iterable[float],
                               param_buffer_bytes: float) -> float:
    """Byte-weighted mean cached fraction across layers."""
    total = 0.0
    cached = 0.0
    for pb in param_bytes_per_layer:
        total += pb
        cached += buffer_effectiveness(pb, param_buffer_bytes) * pb
    return cached / total if total else 1.0
