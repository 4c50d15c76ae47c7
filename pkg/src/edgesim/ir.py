"""Neural-network intermediate representation.

Layers are shape-only descriptors (no tensors) arranged in a DAG. Recurrent
layers may be written as a single ``LstmLayer`` entry in a model document;
the loader expands each timestep into four gates x two matrix-vector
multiplications plus one elementwise combine stage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .errors import SchemaError, StructureError, ValidationError


class LayerKind(str, Enum):
    STANDARD_CONV = "StandardConv"
    DEPTHWISE_CONV = "DepthwiseConv"
    POINTWISE_CONV = "PointwiseConv"
    FULLY_CONNECTED = "FullyConnected"
    LSTM_GATE = "LstmGate"
    LSTM_CELL_COMBINE = "LstmCellCombine"


#: Kinds whose shape is the feed-forward (conv/FC) shape.
FEEDFORWARD_KINDS = frozenset(
    {
        LayerKind.STANDARD_CONV,
        LayerKind.DEPTHWISE_CONV,
        LayerKind.POINTWISE_CONV,
        LayerKind.FULLY_CONNECTED,
    }
)

#: Kinds whose shape is the recurrent (LSTM) shape.
RECURRENT_KINDS = frozenset({LayerKind.LSTM_GATE, LayerKind.LSTM_CELL_COMBINE})


class GateRole(str, Enum):
    INPUT = "input"
    INPUT_MODULATION = "input_modulation"
    FORGET = "forget"
    OUTPUT = "output"


class MvmRole(str, Enum):
    #: multiplies the input weight matrix with the current input vector
    INPUT_MVM = "input"
    #: multiplies the hidden weight matrix with the previous hidden vector
    HIDDEN_MVM = "hidden"


class ModelClass(str, Enum):
    CNN = "CNN"
    LSTM = "LSTM"
    TRANSDUCER = "Transducer"
    RCNN = "RCNN"


@dataclass(frozen=True)
class ConvShape:
    """Feed-forward shape; FC layers use 1x1 spatial and kernel dims."""

    hi: int
    wi: int
    ci: int
    co: int
    kh: int
    kw: int
    stride: int
    ho: int
    wo: int


@dataclass(frozen=True)
class RecurrentShape:
    """LSTM shape: input dim, hidden dim, timesteps, cell multiplicity."""

    d: int
    h: int
    t: int
    c: int = 1


@dataclass(frozen=True)
class LayerDescriptor:
    id: str
    kind: LayerKind
    conv: ConvShape | None = None
    recurrent: RecurrentShape | None = None
    gate: GateRole | None = None
    mvm: MvmRole | None = None
    bits: int = 8
    predecessors: tuple[str, ...] = ()
    #: Descriptors sharing a weight_group share one physical weight tensor
    #: (gate MVMs replicated across timesteps). None means no parameters.
    weight_group: str | None = None


@dataclass(frozen=True)
class ModelGraph:
    name: str
    model_class: ModelClass
    layers: tuple[LayerDescriptor, ...]

    def index(self) -> dict[str, int]:
        return {layer.id: i for i, layer in enumerate(self.layers)}

    def layer(self, layer_id: str) -> LayerDescriptor:
        for layer in self.layers:
            if layer.id == layer_id:
                return layer
        raise KeyError(layer_id)


# ---------------------------------------------------------------------------
# construction helpers


def _out_dim(in_dim: int, k: int, stride: int) -> int:
    return (in_dim - k) // stride + 1


def conv_layer(
    layer_id: str,
    kind: LayerKind,
    *,
    hi: int,
    wi: int,
    ci: int,
    co: int | None = None,
    kh: int = 1,
    kw: int = 1,
    stride: int = 1,
    bits: int = 8,
    predecessors: Sequence[str] = (),
    weight_group: str | None = None,
) -> LayerDescriptor:
    """Build a validated feed-forward layer; output dims are derived."""
    if kind not in FEEDFORWARD_KINDS:
        raise ValidationError(f"conv_layer cannot build kind {kind.value}")
    if kind is LayerKind.DEPTHWISE_CONV:
        co = ci if co is None else co
    if kind is LayerKind.FULLY_CONNECTED:
        hi = wi = kh = kw = stride = 1
    if co is None:
        raise ValidationError(f"layer '{layer_id}': output channels are required")
    shape = ConvShape(
        hi=hi, wi=wi, ci=ci, co=co, kh=kh, kw=kw, stride=stride,
        ho=_out_dim(hi, kh, stride), wo=_out_dim(wi, kw, stride),
    )
    desc = LayerDescriptor(
        id=layer_id,
        kind=kind,
        conv=shape,
        bits=bits,
        predecessors=tuple(predecessors),
        weight_group=weight_group or layer_id,
    )
    validate_layer(desc)
    return desc


def lstm_gate(
    layer_id: str,
    *,
    gate: GateRole,
    mvm: MvmRole,
    d: int,
    h: int,
    t: int,
    c: int = 1,
    bits: int = 8,
    predecessors: Sequence[str] = (),
    weight_group: str | None = None,
) -> LayerDescriptor:
    desc = LayerDescriptor(
        id=layer_id,
        kind=LayerKind.LSTM_GATE,
        recurrent=RecurrentShape(d=d, h=h, t=t, c=c),
        gate=gate,
        mvm=mvm,
        bits=bits,
        predecessors=tuple(predecessors),
        weight_group=weight_group or layer_id,
    )
    validate_layer(desc)
    return desc


def lstm_combine(
    layer_id: str,
    *,
    d: int,
    h: int,
    t: int,
    c: int = 1,
    bits: int = 8,
    predecessors: Sequence[str] = (),
) -> LayerDescriptor:
    desc = LayerDescriptor(
        id=layer_id,
        kind=LayerKind.LSTM_CELL_COMBINE,
        recurrent=RecurrentShape(d=d, h=h, t=t, c=c),
        bits=bits,
        predecessors=tuple(predecessors),
        weight_group=None,
    )
    validate_layer(desc)
    return desc


def validate_layer(layer: LayerDescriptor) -> None:
    if not layer.id:
        raise ValidationError("layer id must be non-empty")
    if layer.bits <= 0 or layer.bits % 8 != 0:
        raise ValidationError(f"layer '{layer.id}': bits must be a positive multiple of 8")
    if layer.kind in FEEDFORWARD_KINDS:
        s = layer.conv
        if s is None:
            raise ValidationError(f"layer '{layer.id}': feed-forward shape is required")
        for name in ("hi", "wi", "ci", "co", "kh", "kw", "stride", "ho", "wo"):
            if getattr(s, name) <= 0:
                raise ValidationError(f"layer '{layer.id}': {name} must be positive")
        if s.hi < s.kh or s.wi < s.kw:
            raise ValidationError(f"layer '{layer.id}': kernel exceeds input dims")
        if s.ho != _out_dim(s.hi, s.kh, s.stride) or s.wo != _out_dim(s.wi, s.kw, s.stride):
            raise ValidationError(f"layer '{layer.id}': output dims inconsistent with input/kernel/stride")
        if layer.kind is LayerKind.DEPTHWISE_CONV and s.ci != s.co:
            raise ValidationError(f"layer '{layer.id}': depthwise requires ci == co")
        if layer.kind is LayerKind.POINTWISE_CONV and (s.kh != 1 or s.kw != 1):
            raise ValidationError(f"layer '{layer.id}': pointwise requires 1x1 kernel")
        if layer.weight_group is None:
            raise ValidationError(f"layer '{layer.id}': parameterized layer needs a weight group")
    elif layer.kind in RECURRENT_KINDS:
        r = layer.recurrent
        if r is None:
            raise ValidationError(f"layer '{layer.id}': recurrent shape is required")
        for name in ("d", "h", "t", "c"):
            if getattr(r, name) <= 0:
                raise ValidationError(f"layer '{layer.id}': {name} must be positive")
        if layer.kind is LayerKind.LSTM_GATE:
            if layer.gate is None or layer.mvm is None:
                raise ValidationError(f"layer '{layer.id}': gate and mvm roles are required")
            if layer.weight_group is None:
                raise ValidationError(f"layer '{layer.id}': parameterized layer needs a weight group")
        else:
            if layer.weight_group is not None:
                raise ValidationError(f"layer '{layer.id}': combine stage carries no weights")
    else:  # pragma: no cover - enum is closed
        raise ValidationError(f"layer '{layer.id}': unknown kind")


# ---------------------------------------------------------------------------
# LSTM expansion

_GATE_ORDER = (GateRole.INPUT, GateRole.INPUT_MODULATION, GateRole.FORGET, GateRole.OUTPUT)
_MVM_SUFFIX = {MvmRole.INPUT_MVM: "x", MvmRole.HIDDEN_MVM: "h"}


def combine_id(lstm_id: str, timestep: int) -> str:
    return f"{lstm_id}.t{timestep}.combine"


def expand_lstm_layer(
    lstm_id: str,
    shape: RecurrentShape,
    predecessors: Sequence[str],
    bits: int = 8,
) -> list[LayerDescriptor]:
    """Expand one LSTM layer into 9*T descriptors.

    Per timestep: 8 gate MVMs then one combine. Hidden MVMs at timestep
    t > 1 depend on the previous combine (inter-cell dependency); each
    combine depends on all 8 gate MVMs of its timestep (intra-cell
    dependency). Input MVMs read the upstream layer at every timestep.
    Weight groups are shared across timesteps.
    """
    for fname in ("d", "h", "t", "c"):
        if getattr(shape, fname) <= 0:
            raise ValidationError(f"layer '{lstm_id}': {fname} must be positive")
    out: list[LayerDescriptor] = []
    for t in range(1, shape.t + 1):
        gate_ids: list[str] = []
        for gate in _GATE_ORDER:
            for mvm in (MvmRole.INPUT_MVM, MvmRole.HIDDEN_MVM):
                gid = f"{lstm_id}.t{t}.{gate.value}.{_MVM_SUFFIX[mvm]}"
                if mvm is MvmRole.INPUT_MVM:
                    preds: tuple[str, ...] = tuple(predecessors)
                else:
                    preds = (combine_id(lstm_id, t - 1),) if t > 1 else ()
                out.append(
                    lstm_gate(
                        gid,
                        gate=gate,
                        mvm=mvm,
                        d=shape.d,
                        h=shape.h,
                        t=shape.t,
                        c=shape.c,
                        bits=bits,
                        predecessors=preds,
                        weight_group=f"{lstm_id}.{gate.value}.{_MVM_SUFFIX[mvm]}",
                    )
                )
                gate_ids.append(gid)
        out.append(
            lstm_combine(
                combine_id(lstm_id, t),
                d=shape.d,
                h=shape.h,
                t=shape.t,
                c=shape.c,
                bits=bits,
                predecessors=tuple(gate_ids),
            )
        )
    return out


# ---------------------------------------------------------------------------
# graph validation


def _find_cycle(edges: Mapping[str, Iterable[str]]) -> list[str] | None:
    """Return one dependency cycle as an id path, or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {node: WHITE for node in edges}
    for start in edges:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, Iterator]] = [(start, iter(edges[start]))]
        path = [start]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in color:
                    continue
                if color[nxt] == GREY:
                    return path[path.index(nxt):] + [nxt]
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, iter(edges[nxt])))
                    path.append(nxt)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return None


def validate_graph(layers: Sequence[LayerDescriptor]) -> None:
    """Check id uniqueness, edge targets, and topological layer order."""
    seen: set[str] = set()
    for layer in layers:
        if layer.id in seen:
            raise StructureError(f"duplicate layer id '{layer.id}'")
        seen.add(layer.id)
    pos = {layer.id: i for i, layer in enumerate(layers)}
    for i, layer in enumerate(layers):
        for pred in layer.predecessors:
            if pred not in pos:
                raise StructureError(f"layer '{layer.id}' references unknown layer '{pred}'")
            if pos[pred] >= i:
                cycle = _find_cycle({l.id: l.predecessors for l in layers})
                if cycle is not None:
                    raise StructureError("dependency cycle: " + " -> ".join(cycle))
                raise StructureError(
                    f"layer order is not topological: '{pred}' appears after its dependent '{layer.id}'"
                )


def build_model(name: str, model_class: ModelClass, layers: Sequence[LayerDescriptor]) -> ModelGraph:
    validate_graph(layers)
    return ModelGraph(name=name, model_class=model_class, layers=tuple(layers))


# ---------------------------------------------------------------------------
# document loading / serialization

_CONV_FIELDS = ("hi", "wi", "ci", "co", "kh", "kw", "stride", "ho", "wo")


def _req_str(obj: Mapping[str, Any], key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{where}: field '{key}' must be a non-empty string")
    return value


def _opt_int(obj: Mapping[str, Any], key: str, where: str, default: int | None = None) -> int | None:
    if key not in obj:
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}: field '{key}' must be an integer")
    return value


def _req_int(obj: Mapping[str, Any], key: str, where: str) -> int:
    value = _opt_int(obj, key, where)
    if value is None:
        raise SchemaError(f"{where}: field '{key}' is required")
    return value


def _parse_layer(entry: Mapping[str, Any]) -> list[LayerDescriptor]:
    """Parse one document layer; LstmLayer entries expand to 9*T descriptors."""
    if not isinstance(entry, Mapping):
        raise SchemaError("layers: each entry must be an object")
    lid = _req_str(entry, "id", "layer")
    where = f"layer '{lid}'"
    kind_token = _req_str(entry, "kind", where)
    bits = _opt_int(entry, "bits", where, 8)
    preds_raw = entry.get("predecessors", [])
    if not isinstance(preds_raw, list) or not all(isinstance(p, str) for p in preds_raw):
        raise SchemaError(f"{where}: field 'predecessors' must be a list of ids")
    preds = tuple(preds_raw)

    if kind_token == "LstmLayer":
        shape = RecurrentShape(
            d=_req_int(entry, "d", where),
            h=_req_int(entry, "h", where),
            t=_req_int(entry, "t", where),
            c=_opt_int(entry, "c", where, 1),
        )
        return expand_lstm_layer(lid, shape, preds, bits)

    try:
        kind = LayerKind(kind_token)
    except ValueError:
        raise SchemaError(f"{where}: field 'kind' has unknown value '{kind_token}'") from None

    wg = entry.get("weight_group")
    if wg is not None and not isinstance(wg, str):
        raise SchemaError(f"{where}: field 'weight_group' must be a string")

    if kind in FEEDFORWARD_KINDS:
        ci = _req_int(entry, "ci", where)
        co = _opt_int(entry, "co", where)
        if kind is LayerKind.FULLY_CONNECTED:
            if co is None:
                raise SchemaError(f"{where}: field 'co' is required")
            desc = conv_layer(lid, kind, hi=1, wi=1, ci=ci, co=co, bits=bits,
                              predecessors=preds, weight_group=wg)
        else:
            hi = _req_int(entry, "hi", where)
            wi = _req_int(entry, "wi", where)
            kh = _opt_int(entry, "kh", where, 1)
            kw = _opt_int(entry, "kw", where, 1)
            if kind is LayerKind.STANDARD_CONV and ("kh" not in entry or "kw" not in entry):
                raise SchemaError(f"{where}: fields 'kh' and 'kw' are required")
            desc = conv_layer(
                lid, kind, hi=hi, wi=wi, ci=ci, co=co, kh=kh, kw=kw,
                stride=_opt_int(entry, "stride", where, 1),
                bits=bits, predecessors=preds, weight_group=wg,
            )
        for key in ("ho", "wo"):
            given = _opt_int(entry, key, where)
            if given is not None and given != getattr(desc.conv, key):
                raise ValidationError(f"{where}: {key}={given} inconsistent with derived value {getattr(desc.conv, key)}")
        return [desc]

    # explicit recurrent descriptors
    d = _req_int(entry, "d", where)
    h = _req_int(entry, "h", where)
    t = _req_int(entry, "t", where)
    c = _opt_int(entry, "c", where, 1)
    if kind is LayerKind.LSTM_GATE:
        try:
            gate = GateRole(_req_str(entry, "gate", where))
            mvm = MvmRole(_req_str(entry, "mvm", where))
        except ValueError as exc:
            raise SchemaError(f"{where}: {exc}") from None
        return [lstm_gate(lid, gate=gate, mvm=mvm, d=d, h=h, t=t, c=c, bits=bits,
                          predecessors=preds, weight_group=wg)]
    return [lstm_combine(lid, d=d, h=h, t=t, c=c, bits=bits, predecessors=preds)]


def load_model(document: str | Mapping[str, Any]) -> ModelGraph:
    """Parse, expand, and validate a model document (JSON text or mapping)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"model document is not valid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("model document must be a JSON object")
    name = _req_str(document, "name", "model")
    try:
        model_class = ModelClass(_req_str(document, "class", "model"))
    except ValueError:
        raise SchemaError(f"model: field 'class' has unknown value '{document.get('class')}'") from None
    entries = document.get("layers")
    if not isinstance(entries, list):
        raise SchemaError("model: field 'layers' must be a list")

    expanded: list[LayerDescriptor] = []
    final_stage: dict[str, str] = {}  # original lstm id -> last combine id
    for entry in entries:
        descs = _parse_layer(entry)
        if len(descs) > 1:
            final_stage[entry["id"]] = descs[-1].id
        expanded.extend(descs)

    # successors of an unexpanded LSTM layer consume its last combine stage
    if final_stage:
        rewired = []
        for desc in expanded:
            preds = tuple(final_stage.get(p, p) for p in desc.predecessors)
            rewired.append(replace(desc, predecessors=preds) if preds != desc.predecessors else desc)
        expanded = rewired

    return build_model(name, model_class, expanded)


def build_transducer(
    encoder_layers: Sequence[RecurrentShape],
    prediction_layers: Sequence[RecurrentShape],
    joint_layers: Sequence[tuple[int, int]],
    name: str = "transducer",
    bits: int = 8,
) -> ModelGraph:
    """Assemble encoder/prediction LSTM stacks joined by feed-forward layers.

    The first joint layer depends on the final combine stage of both stacks.
    """
    for label, component in (("encoder", encoder_layers), ("prediction", prediction_layers), ("joint", joint_layers)):
        if not component:
            raise ValidationError(f"transducer {label} component must be non-empty")

    layers: list[LayerDescriptor] = []

    def emit_stack(prefix: str, shapes: Sequence[RecurrentShape]) -> str:
        prev: tuple[str, ...] = ()
        last = ""
        for i, shape in enumerate(shapes):
            lid = f"{name}.{prefix}{i}"
            layers.extend(expand_lstm_layer(lid, shape, prev, bits))
            last = combine_id(lid, shape.t)
            prev = (last,)
        return last

    enc_last = emit_stack("enc", encoder_layers)
    pred_last = emit_stack("pred", prediction_layers)
    prev_joint: tuple[str, ...] = (enc_last, pred_last)
    for i, (ci, co) in enumerate(joint_layers):
        lid = f"{name}.joint{i}"
        layers.append(conv_layer(lid, LayerKind.FULLY_CONNECTED, hi=1, wi=1, ci=ci, co=co,
                                 bits=bits, predecessors=prev_joint))
        prev_joint = (lid,)
    return build_model(name, ModelClass.TRANSDUCER, layers)


def serialize_model(model: ModelGraph) -> dict[str, Any]:
    """Emit a document that loads back to an equal (fully expanded) graph."""
    entries: list[dict[str, Any]] = []
    for layer in model.layers:
        entry: dict[str, Any] = {"id": layer.id, "kind": layer.kind.value}
        if layer.kind in FEEDFORWARD_KINDS:
            assert layer.conv is not None
            for fname in _CONV_FIELDS:
                entry[fname] = getattr(layer.conv, fname)
        else:
            assert layer.recurrent is not None
            entry.update(d=layer.recurrent.d, h=layer.recurrent.h,
                         t=layer.recurrent.t, c=layer.recurrent.c)
            if layer.gate is not None:
                entry["gate"] = layer.gate.value
                entry["mvm"] = layer.mvm.value
        entry["bits"] = layer.bits
        entry["predecessors"] = list(layer.predecessors)
        if layer.weight_group is not None and layer.weight_group != layer.id:
            entry["weight_group"] = layer.weight_group
        entries.append(entry)
    return {"name": model.name, "class": model.model_class.value, "layers": entries}


def model_to_json(model: ModelGraph) -> str:
    return json.dumps(serialize_model(model), indent=2, sort_keys=True) + "\n"
