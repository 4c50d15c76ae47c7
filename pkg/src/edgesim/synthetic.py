"""Seeded synthetic model suite spanning all five layer families.

Stands in for a proprietary production model set: MobileNet-style CNNs,
LSTM stacks, transducers, and a conv+LSTM hybrid. Layer shapes are sampled
inside per-family windows and verified against the classifier before being
emitted, and one CNN is forced to exhibit at least a 200x MAC spread and a
20x footprint spread across its layers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import GenerationError
from .families import Family, classify
from .ir import LayerKind, conv_layer
from .metrics import layer_metrics

_MAX_TRIES = 200


@dataclass(frozen=True)
class SyntheticSuiteSpec:
    seed: int = 1
    cnn_count: int = 2
    #: layers per family inside each CNN, in emission order F1,F2,F4,F5 + FC head
    cnn_family_counts: Mapping[str, int] = field(
        default_factory=lambda: {"F1": 2, "F2": 3, "F4": 2, "F5": 3, "F3": 1}
    )
    lstm_layers: int = 2
    lstm_timesteps: int = 10
    transducer_stack: int = 2
    transducer_timesteps: int = 8
    rcnn_timesteps: int = 6

    def __post_init__(self) -> None:
        if self.cnn_count < 1 or self.lstm_layers < 1 or self.transducer_stack < 1:
            raise GenerationError("suite spec: counts must be at least 1")
        if min(self.lstm_timesteps, self.transducer_timesteps, self.rcnn_timesteps) < 1:
            raise GenerationError("suite spec: timestep counts must be at least 1")
        if any(n < 0 for n in self.cnn_family_counts.values()):
            raise GenerationError("suite spec: family counts must be non-negative")


def _verify(entry: dict[str, Any], target: Family) -> dict[str, Any]:
    kind = LayerKind(entry["kind"])
    desc = conv_layer(
        entry["id"], kind,
        hi=entry.get("hi", 1), wi=entry.get("wi", 1),
        ci=entry["ci"], co=entry.get("co"),
        kh=entry.get("kh", 1), kw=entry.get("kw", 1),
        stride=entry.get("stride", 1),
    )
    if classify(layer_metrics(desc), kind) is not target:
        raise GenerationError(f"sampled layer missed family {target.value}")
    return entry


def _sample_f1(rng: random.Random, lid: str, *, min_macs: int = 0) -> dict[str, Any]:
    """Early standard conv: shallow channels, large spatial extent."""
    for _ in range(_MAX_TRIES):
        s = rng.randrange(56, 113)
        ci = rng.randrange(8, 33)
        pb_lo = max(1200, math.ceil(31e6 / (s * s)), math.ceil(min_macs / (s * s)))
        pb_hi = min(90_000, math.floor(190e6 / (s * s)))
        if pb_lo >= pb_hi:
            continue
        pb = rng.randrange(pb_lo, pb_hi)
        co = max(1, round(pb / (ci * 9)))
        entry = {"id": lid, "kind": "StandardConv", "hi": s + 2, "wi": s + 2,
                 "ci": ci, "co": co, "kh": 3, "kw": 3}
        try:
            return _verify(entry, Family.F1)
        except GenerationError:
            continue
    raise GenerationError("could not sample a family-1 layer")


def _sample_f2(rng: random.Random, lid: str) -> dict[str, Any]:
    """Mid-network pointwise conv."""
    for _ in range(_MAX_TRIES):
        s = rng.randrange(12, 20)
        pb_lo = max(105_000, math.ceil(20.5e6 / (s * s)))
        pb_hi = min(490_000, math.floor(99e6 / (s * s)))
        if pb_lo >= pb_hi:
            continue
        ch = round(math.sqrt(rng.randrange(pb_lo, pb_hi)))
        entry = {"id": lid, "kind": "PointwiseConv", "hi": s, "wi": s, "ci": ch, "co": ch}
        try:
            return _verify(entry, Family.F2)
        except GenerationError:
            continue
    raise GenerationError("could not sample a family-2 layer")


def _sample_f3_fc(rng: random.Random, lid: str) -> dict[str, Any]:
    """Large fully connected head: big footprint, single-use weights."""
    for _ in range(_MAX_TRIES):
        ci = rng.randrange(1000, 3001)
        entry = {"id": lid, "kind": "FullyConnected", "ci": ci, "co": ci}
        try:
            return _verify(entry, Family.F3)
        except GenerationError:
            continue
    raise GenerationError("could not sample a family-3 layer")


def _sample_f4(rng: random.Random, lid: str) -> dict[str, Any]:
    """Late standard conv: deep channels, small spatial extent."""
    for _ in range(_MAX_TRIES):
        s = rng.choice((5, 6))
        ch = rng.randrange(236, 334 if s == 5 else 278)
        entry = {"id": lid, "kind": "StandardConv", "hi": s + 2, "wi": s + 2,
                 "ci": ch, "co": ch, "kh": 3, "kw": 3}
        try:
            return _verify(entry, Family.F4)
        except GenerationError:
            continue
    raise GenerationError("could not sample a family-4 layer")


def _sample_f5(rng: random.Random, lid: str, *, max_macs: int | None = None) -> dict[str, Any]:
    """Depthwise conv: tiny footprint, no cross-channel activation reuse."""
    for _ in range(_MAX_TRIES):
        ci = rng.randrange(130, 161) if max_macs else rng.randrange(130, 1001)
        pb = 9 * ci
        s_lo = max(8, math.ceil(math.sqrt(0.52e6 / pb)))
        s_hi = min(24, math.floor(math.sqrt(4.8e6 / pb)))
        if max_macs is not None:
            s_hi = min(s_hi, math.floor(math.sqrt(max_macs / pb)))
        if s_lo > s_hi:
            continue
        s = rng.randrange(s_lo, s_hi + 1)
        entry = {"id": lid, "kind": "DepthwiseConv", "hi": s + 2, "wi": s + 2,
                 "ci": ci, "co": ci, "kh": 3, "kw": 3}
        try:
            return _verify(entry, Family.F5)
        except GenerationError:
            continue
    raise GenerationError("could not sample a family-5 layer")


def _cnn_doc(rng: random.Random, name: str, counts: Mapping[str, int],
             force_diversity: bool) -> dict[str, Any]:
    layers: list[dict[str, Any]] = []

    def add(entry: dict[str, Any]) -> None:
        if layers:
            entry["predecessors"] = [layers[-1]["id"]]
        layers.append(entry)

    n_f1, n_f2 = counts.get("F1", 0), counts.get("F2", 0)
    n_f4, n_f5 = counts.get("F4", 0), counts.get("F5", 0)
    for i in range(n_f1):
        force = force_diversity and i == 0
        add(_sample_f1(rng, f"{name}.conv{len(layers)}", min_macs=130_000_000 if force else 0))
    # MobileNet-style body: alternating pointwise / depthwise blocks
    for i in range(max(n_f2, n_f5)):
        if i < n_f2:
            add(_sample_f2(rng, f"{name}.pw{len(layers)}"))
        if i < n_f5:
            force = force_diversity and i == 0
            add(_sample_f5(rng, f"{name}.dw{len(layers)}", max_macs=600_000 if force else None))
    for _ in range(n_f4):
        add(_sample_f4(rng, f"{name}.conv{len(layers)}"))
    for _ in range(counts.get("F3", 0)):
        add(_sample_f3_fc(rng, f"{name}.fc{len(layers)}"))

    # one skip connection from an early layer to a late one
    if len(layers) >= 5:
        src = layers[1]["id"]
        if src not in layers[4]["predecessors"]:
            layers[4]["predecessors"].append(src)
    return {"name": name, "class": "CNN", "layers": layers}


def _lstm_doc(rng: random.Random, name: str, n_layers: int, timesteps: int) -> dict[str, Any]:
    dims = (1024, 1280, 1536, 2048)
    layers = []
    for i in range(n_layers):
        h = rng.choice(dims)
        entry: dict[str, Any] = {"id": f"{name}.l{i}", "kind": "LstmLayer",
                                 "d": h, "h": h, "t": timesteps, "c": 1}
        if i:
            entry["predecessors"] = [f"{name}.l{i - 1}"]
        layers.append(entry)
    return {"name": name, "class": "LSTM", "layers": layers}


def _transducer_doc(rng: random.Random, name: str, stack: int, timesteps: int) -> dict[str, Any]:
    dims = (1024, 1280, 1536, 2048)
    layers: list[dict[str, Any]] = []
    last_id: dict[str, str] = {}
    last_h: dict[str, int] = {}
    for part in ("enc", "pred"):
        for i in range(stack):
            h = rng.choice(dims)
            lid = f"{name}.{part}{i}"
            entry: dict[str, Any] = {"id": lid, "kind": "LstmLayer",
                                     "d": h, "h": h, "t": timesteps, "c": 1}
            if i:
                entry["predecessors"] = [f"{name}.{part}{i - 1}"]
            layers.append(entry)
            last_id[part] = lid
            last_h[part] = h
    layers.append({
        "id": f"{name}.joint0", "kind": "FullyConnected",
        "ci": last_h["enc"] + last_h["pred"], "co": rng.randrange(1000, 2001),
        "predecessors": [last_id["enc"], last_id["pred"]],
    })
    return {"name": name, "class": "Transducer", "layers": layers}


def _rcnn_doc(rng: random.Random, name: str, timesteps: int) -> dict[str, Any]:
    layers = [
        _sample_f1(rng, f"{name}.conv0"),
        _sample_f2(rng, f"{name}.pw1"),
        _sample_f5(rng, f"{name}.dw2"),
    ]
    for prev, entry in zip(layers, layers[1:]):
        entry["predecessors"] = [prev["id"]]
    h = rng.choice((1024, 1536))
    layers.append({"id": f"{name}.lstm3", "kind": "LstmLayer", "d": h, "h": h,
                   "t": timesteps, "c": 1, "predecessors": [layers[-1]["id"]]})
    layers.append({"id": f"{name}.fc4", "kind": "FullyConnected", "ci": h, "co": h,
                   "predecessors": [f"{name}.lstm3"]})
    return {"name": name, "class": "RCNN", "layers": layers}


def generate_suite(spec: SyntheticSuiteSpec = SyntheticSuiteSpec()) -> list[dict[str, Any]]:
    """Model documents for the suite; byte-for-byte reproducible per seed."""
    rng = random.Random(spec.seed)
    docs = []
    for i in range(spec.cnn_count):
        docs.append(_cnn_doc(rng, f"cnn_{i}", spec.cnn_family_counts, force_diversity=i == 0))
    docs.append(_lstm_doc(rng, "lstm_0", spec.lstm_layers, spec.lstm_timesteps))
    docs.append(_transducer_doc(rng, "transducer_0", spec.transducer_stack, spec.transducer_timesteps))
    docs.append(_rcnn_doc(rng, "rcnn_0", spec.rcnn_timesteps))
    return docs
