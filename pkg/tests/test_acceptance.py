"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import json
import math
import random

import pytest

from edgesim.cost import (
    effective_parallelism,
    estimate,
    ridge_point,
    roofline_attainable,
)
from edgesim.energy import buffer_effectiveness, energy_roofline, layer_energy
from edgesim.engine import canonical_scenarios, compare_suites, simulate
from edgesim.families import Family, classify, family_histogram
from edgesim.hardware import canonical_suite
from edgesim.ir import (
    GateRole,
    LayerKind,
    ModelClass,
    MvmRole,
    RecurrentShape,
    build_model,
    conv_layer,
    expand_lstm_layer,
    load_model,
    lstm_gate,
)
from edgesim.metrics import layer_metrics, model_metrics
from edgesim.scheduler import (
    LOW_REUSE_THRESHOLD_MACS_PER_BYTE,
    canonical_routing,
    phase1,
    schedule,
)
from edgesim.synthetic import SyntheticSuiteSpec, generate_suite
from tick_oracle import tick_latency

SUITE = canonical_suite()
BASELINE = SUITE.get("Baseline")
PAVLOV = SUITE.get("Pavlov")
DOCS = generate_suite(SyntheticSuiteSpec())
MODELS = {doc["name"]: load_model(json.dumps(doc)) for doc in DOCS}


def ok(n, text):
    print(f"[criterion {n:2d}] PASS  {text}")


def test_criterion_1_roofline_exactness():
    intensities = [10 ** (-1 + 5 * i / 99) for i in range(100)]
    for ai in intensities:
        expected = min(BASELINE.peak_macs_per_s, BASELINE.mem_bandwidth_bytes_per_s * ai)
        got = roofline_attainable(ai, BASELINE)
        assert abs(got - expected) <= 1e-12 * expected
    assert ridge_point(BASELINE) == 32.0
    assert ridge_point(BASELINE) == LOW_REUSE_THRESHOLD_MACS_PER_BYTE
    ok(1, "roofline = min(peak, bw*AI) over 1e-1..1e4; Baseline ridge = 32 MAC/byte "
          "(64 FLOP/byte), equal to the scheduler threshold")


def test_criterion_2_lstm_bandwidth_bound():
    g = lstm_gate("g", gate=GateRole.INPUT, mvm=MvmRole.HIDDEN_MVM, d=1024, h=1024, t=1)
    m = layer_metrics(g)
    assert m.param_reuse == 1.0
    cost = estimate(g, m, BASELINE)
    assert cost.bottleneck.value == "memory"
    assert cost.utilization <= 32 / 1024 + 1e-15

    # run the whole model on Baseline (gate serialization is inherent to
    # the sequential execution model)
    model = MODELS["lstm_0"]
    from edgesim.scheduler import single_target_routing
    from edgesim.hardware import HardwareSuite
    solo = HardwareSuite((BASELINE,), SUITE.dram)
    base_plan = schedule(model, solo, single_target_routing("Baseline"))
    report = simulate(model, base_plan, solo)
    assert report.mean_utilization < 0.016
    ok(2, f"gate on Baseline: memory-bound, util {cost.utilization:.4%} <= 3.125%; "
          f"LSTM model mean util {report.mean_utilization:.4%} < 1.6%")


def test_criterion_3_gate_arithmetic():
    x = lstm_gate("x", gate=GateRole.INPUT, mvm=MvmRole.INPUT_MVM, d=1024, h=1024, t=1)
    h = lstm_gate("h", gate=GateRole.INPUT, mvm=MvmRole.HIDDEN_MVM, d=1024, h=1024, t=1)
    mx, mh = layer_metrics(x), layer_metrics(h)
    assert mx.param_bytes + mh.param_bytes == 2_097_152
    assert mx.param_reuse == 1.0 and mh.param_reuse == 1.0
    ok(3, "D=H=1024 gate holds exactly 2,097,152 parameter bytes at reuse exactly 1")


def test_criterion_4_pavlov_traffic_law():
    for t in (1, 2, 10, 64):
        for c in (1, 4):
            descs = expand_lstm_layer("l", RecurrentShape(d=512, h=512, t=t, c=c), ())
            gates = [d for d in descs if d.kind is LayerKind.LSTM_GATE]
            base = sum(estimate(g, layer_metrics(g), BASELINE).dram_param_bytes for g in gates)
            pav = sum(estimate(g, layer_metrics(g), PAVLOV).dram_param_bytes for g in gates)
            assert base == t * c * pav
    ok(4, "DRAM parameter traffic ratio Baseline/Pavlov = T*C exactly for "
          "T in {1,2,10,64}, C in {1,4}")


def test_criterion_5_buffer_effectiveness():
    frac = buffer_effectiveness(33.4 * 2**20, 4 * 2**20)
    assert abs(100 * frac - 11.98) <= 0.1
    ok(5, f"4 MB buffer over a 33.4 MB footprint caches {100 * frac:.2f}% (11.98 +- 0.1)")


def test_criterion_6_family_coverage():
    classified = total = 0
    for model in MODELS.values():
        hist = family_histogram(model)
        total += sum(hist.values())
        classified += sum(v for k, v in hist.items() if k is not Family.UNCLASSIFIED)
    assert total > 0
    coverage = classified / total
    assert coverage >= 0.97
    ok(6, f"{classified}/{total} parameterized layers ({coverage:.1%}) fall into F1..F5")


def test_criterion_7_scheduler_sanity():
    # pure LSTM -> everything on Pavlov, no communication
    lstm = build_model("pure", ModelClass.LSTM,
                       expand_lstm_layer("l", RecurrentShape(d=1024, h=1024, t=6), ()))
    plan = schedule(lstm, SUITE, canonical_routing())
    assert {a.destination for a in plan.assignments} == {"Pavlov"}
    assert plan.events == ()

    # homogeneous family-1 CNN -> everything on Pascal
    prev = ()
    layers = []
    for i in range(5):
        layers.append(conv_layer(f"c{i}", LayerKind.STANDARD_CONV, hi=66, wi=66,
                                 ci=16, co=48, kh=3, kw=3, predecessors=prev))
        prev = (f"c{i}",)
    cnn = build_model("f1cnn", ModelClass.CNN, layers)
    assert all(classify(layer_metrics(l), l.kind) is Family.F1 for l in cnn.layers)
    plan = schedule(cnn, SUITE, canonical_routing())
    assert {a.destination for a in plan.assignments} == {"Pascal"}

    # dest(i) in {ideal(i), dest(i-1)} over 1,000 randomized models
    rng = random.Random(2024)
    routing = canonical_routing()
    for _ in range(1000):
        model = _random_model(rng)
        mm = model_metrics(model)
        ideal = {c.layer_id: c.ideal for c in phase1(model, mm, routing)}
        plan = schedule(model, SUITE, routing)
        prev_dest = None
        for a in plan.assignments:
            allowed = {ideal[a.layer_id]} | ({prev_dest} if prev_dest else set())
            assert a.destination in allowed
            prev_dest = a.destination
    ok(7, "pure LSTM on Pavlov with zero events; F1 CNN on Pascal; "
          "dest(i) in {ideal(i), dest(i-1)} over 1,000 random models")


def _random_model(rng):
    layers = []
    prev = ()
    for i in range(rng.randint(2, 6)):
        lid = f"x{i}"
        pick = rng.random()
        if pick < 0.3:
            layers.append(conv_layer(lid, LayerKind.STANDARD_CONV,
                                     hi=rng.choice((18, 34, 66)), wi=34,
                                     ci=rng.choice((8, 64, 320)), co=rng.choice((24, 96)),
                                     kh=3, kw=3, predecessors=prev))
        elif pick < 0.55:
            layers.append(conv_layer(lid, LayerKind.POINTWISE_CONV,
                                     hi=rng.choice((7, 14, 21)), wi=14,
                                     ci=rng.choice((32, 256, 640)), co=rng.choice((64, 320)),
                                     predecessors=prev))
        elif pick < 0.7:
            layers.append(conv_layer(lid, LayerKind.DEPTHWISE_CONV,
                                     hi=rng.choice((10, 18, 26)), wi=18,
                                     ci=rng.choice((64, 256, 768)), kh=3, kw=3,
                                     predecessors=prev))
        elif pick < 0.9:
            layers.append(lstm_gate(lid, gate=GateRole.OUTPUT,
                                    mvm=rng.choice((MvmRole.INPUT_MVM, MvmRole.HIDDEN_MVM)),
                                    d=rng.choice((128, 512, 1536)),
                                    h=rng.choice((128, 512, 1536)),
                                    t=rng.randint(1, 6), predecessors=prev))
        else:
            layers.append(conv_layer(lid, LayerKind.FULLY_CONNECTED, hi=1, wi=1,
                                     ci=rng.choice((64, 512, 1280)),
                                     co=rng.choice((10, 100, 1000)), predecessors=prev))
        prev = (lid,)
    return build_model("rand", ModelClass.RCNN, layers)


def test_criterion_8_directional_heterogeneous_win():
    models = list(MODELS.values())
    table = compare_suites(models, canonical_scenarios(), "Baseline")
    mensa = next(r for r in table.rows if r.scenario == "Mensa-G")
    assert mensa.energy_efficiency_x >= 2.0
    assert mensa.throughput_x >= 2.0

    hb_lstm = next(r for r in compare_suites(MODELS["lstm_0"], canonical_scenarios(),
                                             "Baseline").rows if r.scenario == "Base+HB")
    hb_cnn = next(r for r in compare_suites(MODELS["cnn_0"], canonical_scenarios(),
                                            "Baseline").rows if r.scenario == "Base+HB")
    assert hb_lstm.throughput_x > hb_cnn.throughput_x
    ok(8, f"Mensa-G vs Baseline: {mensa.energy_efficiency_x:.1f}x energy efficiency, "
          f"{mensa.throughput_x:.1f}x throughput (both >= 2x); Base+HB helps the LSTM "
          f"model ({hb_lstm.throughput_x:.2f}x) more than the CNN ({hb_cnn.throughput_x:.2f}x)")


def test_criterion_9_tick_oracle_equivalence():
    rng = random.Random(99)
    accels = list(SUITE.accelerators)
    checked = 0
    while checked < 50:
        layer = _random_small_layer(rng)
        m = layer_metrics(layer)
        if m.macs > 10**5:
            continue
        accel = accels[checked % len(accels)]
        cost = estimate(layer, m, accel)
        oracle_s, tick_s = tick_latency(
            m.macs, effective_parallelism(layer, accel), cost.dram_bytes_total,
            accel.pe_count, accel.peak_macs_per_s, accel.mem_bandwidth_bytes_per_s)
        assert abs(cost.latency_s - oracle_s) <= tick_s + 1e-15
        checked += 1
    ok(9, "analytical latency within one tick of the brute-force tick simulator "
          "for 50 random layers with <= 1e5 MACs")


def _random_small_layer(rng):
    pick = rng.random()
    if pick < 0.25:
        s = rng.randint(1, 6)
        return conv_layer("x", LayerKind.POINTWISE_CONV, hi=s, wi=s,
                          ci=rng.randint(1, 32), co=rng.randint(1, 32))
    if pick < 0.5:
        ho, k = rng.randint(1, 4), rng.choice((1, 3))
        return conv_layer("x", LayerKind.STANDARD_CONV, hi=ho + k - 1, wi=ho + k - 1,
                          ci=rng.randint(1, 16), co=rng.randint(1, 16), kh=k, kw=k)
    if pick < 0.7:
        ho = rng.randint(1, 8)
        return conv_layer("x", LayerKind.DEPTHWISE_CONV, hi=ho + 2, wi=ho + 2,
                          ci=rng.randint(1, 64), kh=3, kw=3)
    if pick < 0.85:
        return conv_layer("x", LayerKind.FULLY_CONNECTED, hi=1, wi=1,
                          ci=rng.randint(1, 300), co=rng.randint(1, 300))
    return lstm_gate("x", gate=GateRole.INPUT, mvm=MvmRole.INPUT_MVM,
                     d=rng.randint(1, 128), h=rng.randint(1, 128),
                     t=rng.randint(1, 4), c=rng.choice((1, 2)))


def test_criterion_10_energy_model_algebra():
    # additivity is exact
    g = lstm_gate("g", gate=GateRole.INPUT, mvm=MvmRole.HIDDEN_MVM, d=512, h=512, t=4)
    m = layer_metrics(g)
    b = layer_energy(estimate(g, m, BASELINE), m, BASELINE)
    assert b.total == (b.pe_dynamic + b.buf_dynamic + b.noc + b.dram
                       + b.pe_static + b.buf_static)

    # asymptote: 625 GMAC/J at 1.6 pJ per MAC
    coeffs = BASELINE.energy
    assert math.isclose(energy_roofline(1e15, coeffs), 625e9, rel_tol=1e-9)
    grid = [10 ** (-1 + 5 * i / 99) for i in range(100)]
    values = [energy_roofline(ai, coeffs) for ai in grid]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(v <= 1 / coeffs.e_mac for v in values)

    # no simulated layer beats the energy roofline once statics are off
    checked = 0
    for scenario in canonical_scenarios():
        for model in MODELS.values():
            plan = schedule(model, scenario.suite, scenario.routing)
            report = simulate(model, plan, scenario.suite, include_statics=False)
            for row in report.layers:
                if row.metrics.macs == 0 or row.cost.dram_bytes_total == 0:
                    continue
                intensity = row.metrics.macs / row.cost.dram_bytes_total
                achieved = row.metrics.macs / row.energy.total
                accel = scenario.suite.get(row.accelerator)
                bound = energy_roofline(intensity, accel.energy)
                assert achieved <= bound * (1 + 1e-12)
                checked += 1
    assert checked > 100
    ok(10, f"breakdown additivity exact; energy roofline monotone with 625 GMAC/J "
           f"asymptote; {checked} simulated layers all under the roofline")
