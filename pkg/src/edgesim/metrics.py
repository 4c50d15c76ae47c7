"""Per-layer characteristics: MACs, parameter footprint, and reuse.

Reuse convention: one MAC per parameter byte per use, so an 8-bit weight
used once has a reuse of exactly 1. Throughput reporting elsewhere counts
one MAC as two FLOPs; the two conventions are never mixed inside the math.

Closed forms per kind (B = bits/8):

    StandardConv    macs = Ho*Wo*Co*Ci*Kh*Kw   params = Co*Ci*Kh*Kw*B
    DepthwiseConv   macs = Ho*Wo*Ci*Kh*Kw      params = Ci*Kh*Kw*B
    PointwiseConv   macs = Ho*Wo*Co*Ci         params = Co*Ci*B
    FullyConnected  macs = Ci*Co               params = Ci*Co*B
    LstmGate x-MVM  macs = H*D*C               params = H*D*B
    LstmGate h-MVM  macs = H*H*C               params = H*H*B
    LstmCellCombine macs = 0                   params = 0

The cell multiplicity C scales MACs and activation volumes but never the
parameter footprint (weights are shared across cells and timesteps).
Biases and normalization parameters are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ir import LayerDescriptor, LayerKind, ModelGraph, MvmRole


@dataclass(frozen=True)
class LayerMetrics:
    macs: int
    param_bytes: int
    input_act_bytes: int
    output_act_bytes: int

    @property
    def param_reuse(self) -> float:
        """MACs per parameter byte; 0 for parameterless stages."""
        return self.macs / self.param_bytes if self.param_bytes else 0.0

    @property
    def act_reuse(self) -> float:
        """MACs per input-activation byte."""
        return self.macs / self.input_act_bytes if self.input_act_bytes else 0.0


def layer_metrics(layer: LayerDescriptor) -> LayerMetrics:
    byte = layer.bits // 8
    if layer.kind in (LayerKind.LSTM_GATE, LayerKind.LSTM_CELL_COMBINE):
        r = layer.recurrent
        assert r is not None
        if layer.kind is LayerKind.LSTM_GATE:
            in_dim = r.d if layer.mvm is MvmRole.INPUT_MVM else r.h
            return LayerMetrics(
                macs=r.h * in_dim * r.c,
                param_bytes=r.h * in_dim * byte,
                input_act_bytes=in_dim * r.c * byte,
                output_act_bytes=r.h * r.c * byte,
            )
        # combine: elementwise merge of the 8 gate MVM outputs into h_t
        return LayerMetrics(
            macs=0,
            param_bytes=0,
            input_act_bytes=8 * r.h * r.c * byte,
            output_act_bytes=r.h * r.c * byte,
        )
    s = layer.conv
    assert s is not None
    in_act = s.hi * s.wi * s.ci * byte
    out_act = s.ho * s.wo * s.co * byte
    if layer.kind is LayerKind.STANDARD_CONV:
        macs = s.ho * s.wo * s.co * s.ci * s.kh * s.kw
        params = s.co * s.ci * s.kh * s.kw * byte
    elif layer.kind is LayerKind.DEPTHWISE_CONV:
        macs = s.ho * s.wo * s.ci * s.kh * s.kw
        params = s.ci * s.kh * s.kw * byte
    elif layer.kind is LayerKind.POINTWISE_CONV:
        macs = s.ho * s.wo * s.co * s.ci
        params = s.co * s.ci * byte
    else:  # fully connected
        macs = s.ci * s.co
        params = s.ci * s.co * byte
    return LayerMetrics(macs=macs, param_bytes=params,
                        input_act_bytes=in_act, output_act_bytes=out_act)


@dataclass(frozen=True)
class LayerRow:
    layer_id: str
    kind: LayerKind
    metrics: LayerMetrics


@dataclass(frozen=True)
class ModelMetrics:
    """Model aggregate. Parameter bytes count each weight group once, so
    gate descriptors replicated across timesteps do not double-count."""

    total_macs: int
    total_param_bytes: int
    rows: tuple[LayerRow, ...]

    def by_id(self) -> dict[str, LayerMetrics]:
        return {row.layer_id: row.metrics for row in self.rows}


def model_metrics(model: ModelGraph) -> ModelMetrics:
    rows: list[LayerRow] = []
    total_macs = 0
    total_params = 0
    seen_groups: set[str] = set()
    for layer in model.layers:
        m = layer_metrics(layer)
        rows.append(LayerRow(layer.id, layer.kind, m))
        total_macs += m.macs
        if layer.weight_group is not None and layer.weight_group not in seen_groups:
            seen_groups.add(layer.weight_group)
            total_params += m.param_bytes
    return ModelMetrics(total_macs=total_macs, total_param_bytes=total_params, rows=tuple(rows))
