"""Accelerator descriptions and the canonical five-configuration suite.

Peak MAC rate is an explicit field rather than being derived from the PE
count and a clock: the quoted array sizes and peak throughputs of the
reference configurations are not mutually consistent, so the peak is taken
as ground truth and ``clock_hz`` is informational only (set to the per-PE
MAC rate). One MAC counts as two FLOPs for reporting; that conversion
lives in :data:`FLOPS_PER_MAC` and is applied nowhere inside cost math.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Mapping

from .errors import SchemaError, ValidationError

#: MAC -> FLOP conversion for reporting. Applied only at reporting surfaces.
FLOPS_PER_MAC = 2


class DataflowKind(str, Enum):
    #: single fixed dataflow; LSTM gates run serialized like FC layers
    BASELINE_MONOLITHIC = "baseline_monolithic"
    #: in-PE temporal reduction of outputs + spatial multicast of parameters
    PASCAL_FLOW = "pascal_flow"
    #: weight temporal multicast across timesteps/cells + input spatial multicast
    PAVLOV_FLOW = "pavlov_flow"
    #: weight temporal multicast + input spatial multicast + spatial reduction
    JACQUARD_FLOW = "jacquard_flow"


class Placement(str, Enum):
    ON_CHIP = "on_chip"
    NEAR_MEMORY = "near_memory"


@dataclass(frozen=True)
class EnergyCoefficients:
    """Per-event energies and static powers. Values other than the MAC
    energy are configurable placeholders, not ground truth."""

    e_mac: float            # J per 8-bit MAC
    e_param_buf: float      # J per parameter-buffer byte accessed
    e_act_buf: float        # J per activation-buffer byte accessed
    e_noc: float            # J per on-chip-network byte
    e_dram: float           # J per DRAM byte
    p_static_pe: float      # W per PE
    p_static_buf: float     # W per KB of on-chip buffer

    def __post_init__(self) -> None:
        for fname in ("e_mac", "e_param_buf", "e_act_buf", "e_noc", "e_dram",
                      "p_static_pe", "p_static_buf"):
            if getattr(self, fname) < 0:
                raise ValidationError(f"energy coefficient '{fname}' must be non-negative")


@dataclass(frozen=True)
class AcceleratorConfig:
    name: str
    pe_rows: int
    pe_cols: int
    clock_hz: float
    peak_macs_per_s: float
    act_buffer_bytes: int
    param_buffer_bytes: int
    per_pe_register_bytes: int
    dataflow: DataflowKind
    mem_bandwidth_bytes_per_s: float
    placement: Placement
    energy: EnergyCoefficients

    @property
    def pe_count(self) -> int:
        return self.pe_rows * self.pe_cols

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("accelerator name must be non-empty")
        if self.pe_rows <= 0 or self.pe_cols <= 0:
            raise ValidationError(f"accelerator '{self.name}': PE array dims must be positive")
        if self.peak_macs_per_s <= 0:
            raise ValidationError(f"accelerator '{self.name}': peak_macs_per_s must be positive")
        if self.mem_bandwidth_bytes_per_s <= 0:
            raise ValidationError(f"accelerator '{self.name}': bandwidth must be positive")
        if min(self.act_buffer_bytes, self.param_buffer_bytes, self.per_pe_register_bytes) < 0:
            raise ValidationError(f"accelerator '{self.name}': buffer sizes must be non-negative")


@dataclass(frozen=True)
class DramConfig:
    capacity_bytes: int
    ext_bandwidth_bytes_per_s: float

    def __post_init__(self) -> None:
        if self.capacity_bytes <= 0:
            raise ValidationError("dram: capacity must be positive")
        if self.ext_bandwidth_bytes_per_s <= 0:
            raise ValidationError("dram: external bandwidth must be positive")


@dataclass(frozen=True)
class HardwareSuite:
    accelerators: tuple[AcceleratorConfig, ...]
    dram: DramConfig

    def __post_init__(self) -> None:
        names = [a.name for a in self.accelerators]
        if len(names) != len(set(names)):
            raise ValidationError("accelerator names must be unique")

    def get(self, name: str) -> AcceleratorConfig:
        for accel in self.accelerators:
            if accel.name == name:
                return accel
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.accelerators)


# ---------------------------------------------------------------------------
# default energy coefficients (placeholders except the MAC energy)

#: 0.2 pJ/bit for an 8-bit MAC -> 1.6 pJ per MAC.
MAC_ENERGY_J = 1.6e-12

#: J per byte; external DRAM (LPDDR4-class) vs. in-stack access.
DEFAULT_DRAM_EXTERNAL_J = 32e-12
DEFAULT_DRAM_INTERNAL_J = 8e-12

DEFAULT_NOC_J = 0.2e-12
DEFAULT_STATIC_PE_W = 10e-6
DEFAULT_STATIC_BUF_W_PER_KB = 20e-6

#: Placeholder capacity -> access-energy curve (bytes, J/byte). Larger
#: buffers cost more per access; interpolated log-linearly in capacity.
BUFFER_ENERGY_TABLE: tuple[tuple[int, float], ...] = (
    (32 << 10, 0.30e-12),
    (128 << 10, 0.45e-12),
    (256 << 10, 0.60e-12),
    (512 << 10, 0.80e-12),
    (1 << 20, 1.10e-12),
    (2 << 20, 1.50e-12),
    (4 << 20, 2.10e-12),
)


def buffer_access_energy(capacity_bytes: int,
                         table: tuple[tuple[int, float], ...] = BUFFER_ENERGY_TABLE) -> float:
    """J/byte for a buffer of the given capacity, from the supplied table."""
    if capacity_bytes <= 0:
        return 0.0
    if capacity_bytes <= table[0][0]:
        return table[0][1]
    if capacity_bytes >= table[-1][0]:
        return table[-1][1]
    for (c0, e0), (c1, e1) in zip(table, table[1:]):
        if c0 <= capacity_bytes <= c1:
            frac = (math.log(capacity_bytes) - math.log(c0)) / (math.log(c1) - math.log(c0))
            return e0 + frac * (e1 - e0)
    return table[-1][1]  # pragma: no cover


def default_coefficients(act_buffer_bytes: int, param_buffer_bytes: int,
                         placement: Placement) -> EnergyCoefficients:
    internal = placement is Placement.NEAR_MEMORY
    return EnergyCoefficients(
        e_mac=MAC_ENERGY_J,
        e_param_buf=buffer_access_energy(param_buffer_bytes),
        e_act_buf=buffer_access_energy(act_buffer_bytes),
        e_noc=DEFAULT_NOC_J,
        e_dram=DEFAULT_DRAM_INTERNAL_J if internal else DEFAULT_DRAM_EXTERNAL_J,
        p_static_pe=DEFAULT_STATIC_PE_W,
        p_static_buf=DEFAULT_STATIC_BUF_W_PER_KB,
    )


# ---------------------------------------------------------------------------
# canonical suite

KIB = 1 << 10
MIB = 1 << 20
GIB = 1 << 30


def _accel(name: str, rows: int, cols: int, peak: float, act_buf: int, param_buf: int,
           pe_reg: int, dataflow: DataflowKind, bw: float, placement: Placement) -> AcceleratorConfig:
    return AcceleratorConfig(
        name=name,
        pe_rows=rows,
        pe_cols=cols,
        clock_hz=peak / (rows * cols),
        peak_macs_per_s=peak,
        act_buffer_bytes=act_buf,
        param_buffer_bytes=param_buf,
        per_pe_register_bytes=pe_reg,
        dataflow=dataflow,
        mem_bandwidth_bytes_per_s=bw,
        placement=placement,
        energy=default_coefficients(act_buf, param_buf, placement),
    )


def canonical_suite() -> HardwareSuite:
    """The five reference configurations.

    Baseline: 64x64 monolithic array, 1024 GMAC/s, 2 MiB + 4 MiB buffers,
    32 GB/s external DRAM. Base+HB: Baseline with 8x bandwidth. Pascal:
    32x32, compute-centric, small buffers, on-chip. Pavlov: 8x8 in the
    memory stack, no parameter buffer, 512 B registers per PE. Jacquard:
    16x16 in the memory stack, 128 KiB per buffer.
    """
    baseline = _accel("Baseline", 64, 64, 1024e9, 2 * MIB, 4 * MIB, 32,
                      DataflowKind.BASELINE_MONOLITHIC, 32e9, Placement.ON_CHIP)
    base_hb = replace(baseline, name="Base+HB", mem_bandwidth_bytes_per_s=256e9)
    pascal = _accel("Pascal", 32, 32, 1024e9, 256 * KIB, 128 * KIB, 32,
                    DataflowKind.PASCAL_FLOW, 32e9, Placement.ON_CHIP)
    pavlov = _accel("Pavlov", 8, 8, 64e9, 128 * KIB, 0, 512,
                    DataflowKind.PAVLOV_FLOW, 256e9, Placement.NEAR_MEMORY)
    jacquard = _accel("Jacquard", 16, 16, 256e9, 128 * KIB, 128 * KIB, 32,
                      DataflowKind.JACQUARD_FLOW, 256e9, Placement.NEAR_MEMORY)
    return HardwareSuite(
        accelerators=(baseline, base_hb, pascal, pavlov, jacquard),
        dram=DramConfig(capacity_bytes=2 * GIB, ext_bandwidth_bytes_per_s=32e9),
    )


# ---------------------------------------------------------------------------
# schema load / save

_ENERGY_KEYS = {
    "mac_j": "e_mac",
    "param_buf_j_per_byte": "e_param_buf",
    "act_buf_j_per_byte": "e_act_buf",
    "noc_j_per_byte": "e_noc",
    "dram_j_per_byte": "e_dram",
    "static_pe_w": "p_static_pe",
    "static_buf_w_per_kb": "p_static_buf",
}


def _num(obj: Mapping[str, Any], key: str, where: str) -> float:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: field '{key}' must be a number")
    return float(value)


def _parse_energy(obj: Any, where: str) -> EnergyCoefficients:
    if not isinstance(obj, Mapping):
        raise SchemaError(f"{where}: field 'energy' must be an object")
    kwargs = {attr: _num(obj, key, where) for key, attr in _ENERGY_KEYS.items()}
    return EnergyCoefficients(**kwargs)


def load_suite(document: str | Mapping[str, Any]) -> HardwareSuite:
    """Parse and validate a hardware suite document (JSON text or mapping)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"hardware document is not valid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("hardware document must be a JSON object")
    accels_raw = document.get("accelerators")
    if not isinstance(accels_raw, list) or not accels_raw:
        raise SchemaError("hardware: field 'accelerators' must be a non-empty list")
    accels = []
    for entry in accels_raw:
        if not isinstance(entry, Mapping):
            raise SchemaError("accelerators: each entry must be an object")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise SchemaError("accelerator: field 'name' must be a non-empty string")
        where = f"accelerator '{name}'"
        pe = entry.get("pe")
        if (not isinstance(pe, list) or len(pe) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in pe)):
            raise SchemaError(f"{where}: field 'pe' must be [rows, cols]")
        try:
            dataflow = DataflowKind(entry.get("dataflow"))
        except ValueError:
            raise SchemaError(f"{where}: field 'dataflow' has unknown value '{entry.get('dataflow')}'") from None
        try:
            placement = Placement(entry.get("placement"))
        except ValueError:
            raise SchemaError(f"{where}: field 'placement' has unknown value '{entry.get('placement')}'") from None
        peak = _num(entry, "peak_gmacs", where) * 1e9
        accels.append(AcceleratorConfig(
            name=name,
            pe_rows=pe[0],
            pe_cols=pe[1],
            clock_hz=_num(entry, "clock_hz", where) if "clock_hz" in entry else peak / (pe[0] * pe[1]),
            peak_macs_per_s=peak,
            act_buffer_bytes=int(_num(entry, "act_buf_kb", where) * KIB),
            param_buffer_bytes=int(_num(entry, "param_buf_kb", where) * KIB),
            per_pe_register_bytes=int(_num(entry, "pe_reg_b", where)) if "pe_reg_b" in entry else 0,
            dataflow=dataflow,
            mem_bandwidth_bytes_per_s=_num(entry, "bw_gbps", where) * 1e9,
            placement=placement,
            energy=_parse_energy(entry.get("energy"), where),
        ))
    dram_raw = document.get("dram")
    if not isinstance(dram_raw, Mapping):
        raise SchemaError("hardware: field 'dram' must be an object")
    dram = DramConfig(
        capacity_bytes=int(_num(dram_raw, "capacity_gb", "dram") * GIB),
        ext_bandwidth_bytes_per_s=_num(dram_raw, "ext_bw_gbps", "dram") * 1e9,
    )
    return HardwareSuite(accelerators=tuple(accels), dram=dram)


def serialize_suite(suite: HardwareSuite) -> dict[str, Any]:
    accels = []
    for a in suite.accelerators:
        accels.append({
            "name": a.name,
            "pe": [a.pe_rows, a.pe_cols],
            "clock_hz": a.clock_hz,
            "peak_gmacs": a.peak_macs_per_s / 1e9,
            "act_buf_kb": a.act_buffer_bytes / KIB,
            "param_buf_kb": a.param_buffer_bytes / KIB,
            "pe_reg_b": a.per_pe_register_bytes,
            "dataflow": a.dataflow.value,
            "bw_gbps": a.mem_bandwidth_bytes_per_s / 1e9,
            "placement": a.placement.value,
            "energy": {key: getattr(a.energy, attr) for key, attr in _ENERGY_KEYS.items()},
        })
    return {
        "accelerators": accels,
        "dram": {
            "capacity_gb": suite.dram.capacity_bytes / GIB,
            "ext_bw_gbps": suite.dram.ext_bandwidth_bytes_per_s / 1e9,
        },
    }


def suite_to_json(suite: HardwareSuite) -> str:
    return json.dumps(serialize_suite(suite), indent=2, sort_keys=True) + "\n"
