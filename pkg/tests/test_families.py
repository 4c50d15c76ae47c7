from collections import Counter

from hypothesis import given, strategies as st

from edgesim.families import (
    FAMILY_RANGES,
    Family,
    classify,
    family_histogram,
    nearest_family,
)
from edgesim.ir import (
    LayerKind,
    ModelClass,
    RecurrentShape,
    build_model,
    expand_lstm_layer,
)
from edgesim.metrics import LayerMetrics


def metrics(macs, param_bytes, in_act=1024, out_act=1024):
    return LayerMetrics(macs=macs, param_bytes=param_bytes,
                        input_act_bytes=in_act, output_act_bytes=out_act)


def test_lstm_gate_example_is_f3():
    m = metrics(2_097_152, 2_097_152)
    assert m.param_reuse == 1.0
    assert classify(m, LayerKind.LSTM_GATE) is Family.F3


def test_pointwise_example_resolves_to_f1():
    m = metrics(20_070_400, 16_384)
    assert m.param_reuse == 1225.0
    assert classify(m, LayerKind.POINTWISE_CONV) is Family.F1


def test_depthwise_example_needs_boundary_slack():
    m = metrics(451_584, 2_304)
    assert m.param_reuse == 196.0
    # 451,584 MACs sits just under the family-5 floor of 0.5M; the 10%
    # boundary slack admits it
    assert classify(m, LayerKind.DEPTHWISE_CONV) is Family.F5


def test_classify_is_deterministic_and_pure():
    m = metrics(2_097_152, 2_097_152)
    assert all(classify(m, LayerKind.LSTM_GATE) is Family.F3 for _ in range(5))


@given(st.integers(min_value=1_000, max_value=4_200), st.integers(min_value=1_000, max_value=4_200))
def test_any_gate_with_f3_footprint_is_f3(d, h):
    pb = d * h
    if not 0.9e6 <= pb <= 18e6:
        return
    m = metrics(macs=pb, param_bytes=pb)
    assert classify(m, LayerKind.LSTM_GATE) is Family.F3


@given(
    st.integers(min_value=1, max_value=10**8),
    st.integers(min_value=1, max_value=2 * 10**7),
)
def test_range_invariants(macs, pb):
    fam = classify(metrics(macs, pb), LayerKind.STANDARD_CONV)
    reuse = macs / pb
    if fam is Family.F3:
        assert reuse <= 8.0
    if fam is Family.F1:
        assert reuse >= 702.0  # 780 minus the 10% slack


def test_unclassified_fallback_and_nearest():
    # tiny footprint, tiny reuse: matches nothing
    m = metrics(macs=10, param_bytes=10)
    assert classify(m, LayerKind.FULLY_CONNECTED) is Family.UNCLASSIFIED
    assert nearest_family(m) in set(FAMILY_RANGES)

    # a clear F3-like point routes to F3
    assert nearest_family(metrics(2_000_000, 2_000_000)) is Family.F3
    # a clear F1-like point routes to F1
    assert nearest_family(metrics(100_000_000, 40_000)) is Family.F1


def test_histogram_pure_lstm_is_all_f3():
    layers = expand_lstm_layer("l", RecurrentShape(d=1024, h=1024, t=3), ())
    model = build_model("m", ModelClass.LSTM, layers)
    hist = family_histogram(model)
    assert set(hist) == {Family.F3}
    assert hist[Family.F3] == 24  # 8 gate MVMs x 3 timesteps; combines excluded


def test_histogram_empty_model():
    model = build_model("e", ModelClass.CNN, [])
    assert family_histogram(model) == Counter()
