"""Command-line front end.

Subcommands: characterize, cluster, roofline, schedule, simulate, compare,
generate. Exit codes: 0 ok, 1 validation/runtime failure, 2 usage error.
Numeric output uses '.' decimals and 9 significant digits; identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import engine, synthetic
from .cost import estimate, ridge_point, roofline_attainable
from .errors import EdgesimError
from .families import Family, classify, family_histogram, nearest_family
from .hardware import FLOPS_PER_MAC, HardwareSuite, canonical_suite, load_suite
from .ir import ModelGraph, load_model
from .metrics import model_metrics
from .scheduler import FamilyRouting, SchedulePlan, canonical_routing, schedule, single_target_routing


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _write_out(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]],
              trailer: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for line in trailer:
        buf.write(line + "\n")
    return buf.getvalue()


def _json_text(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_model_arg(path: str) -> ModelGraph:
    return load_model(Path(path).read_text())


def _load_suite_arg(token: str) -> HardwareSuite:
    if token == "canonical":
        return canonical_suite()
    return load_suite(Path(token).read_text())


def _routing_for(suite: HardwareSuite, routing_path: str | None) -> FamilyRouting:
    if routing_path:
        doc = json.loads(Path(routing_path).read_text())
        return FamilyRouting({Family(k): v for k, v in doc.items()})
    names = set(suite.names())
    if {"Pascal", "Pavlov", "Jacquard"} <= names:
        return canonical_routing()
    if len(names) == 1:
        return single_target_routing(next(iter(names)))
    raise EdgesimError("suite needs an explicit --routing file (family -> accelerator name)")


# ---------------------------------------------------------------------------
# subcommands


def cmd_characterize(args: argparse.Namespace) -> int:
    model = _load_model_arg(args.model)
    mm = model_metrics(model)
    if args.format == "json":
        payload = {
            "model": model.name,
            "total_macs": mm.total_macs,
            "total_param_bytes": mm.total_param_bytes,
            "layers": [
                {
                    "layer_id": row.layer_id,
                    "kind": row.kind.value,
                    "macs": row.metrics.macs,
                    "param_bytes": row.metrics.param_bytes,
                    "param_reuse": row.metrics.param_reuse,
                    "input_act_bytes": row.metrics.input_act_bytes,
                    "output_act_bytes": row.metrics.output_act_bytes,
                    "act_reuse": row.metrics.act_reuse,
                }
                for row in mm.rows
            ],
        }
        _write_out(args.out, _json_text(payload))
    else:
        rows = [
            (row.layer_id, row.kind.value, row.metrics.macs, row.metrics.param_bytes,
             row.metrics.param_reuse, row.metrics.input_act_bytes,
             row.metrics.output_act_bytes, row.metrics.act_reuse)
            for row in mm.rows
        ]
        _write_out(args.out, _csv_text(
            ("layer_id", "kind", "macs", "param_bytes", "param_reuse",
             "input_act_bytes", "output_act_bytes", "act_reuse"),
            rows,
            trailer=(f"# total_macs={mm.total_macs} total_param_bytes={mm.total_param_bytes}",),
        ))
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    model = _load_model_arg(args.model)
    mm = model_metrics(model)
    kinds = {layer.id: layer.kind for layer in model.layers}
    rows = []
    for row in mm.rows:
        if row.metrics.param_bytes == 0:
            continue
        family = classify(row.metrics, kinds[row.layer_id])
        routed = family if family is not Family.UNCLASSIFIED else nearest_family(row.metrics)
        rows.append((row.layer_id, family.value, routed.value))
    hist = family_histogram(model)
    if args.format == "json":
        payload = {
            "model": model.name,
            "layers": [{"layer_id": a, "family": b, "routed_family": c} for a, b, c in rows],
            "histogram": {fam.value: count for fam, count in sorted(hist.items(), key=lambda kv: kv[0].value)},
        }
        _write_out(args.out, _json_text(payload))
    else:
        trailer = [f"# histogram {fam.value}={count}"
                   for fam, count in sorted(hist.items(), key=lambda kv: kv[0].value)]
        _write_out(args.out, _csv_text(("layer_id", "family", "routed_family"), rows, trailer))
    return 0


def cmd_roofline(args: argparse.Namespace) -> int:
    suite = _load_suite_arg(args.hw)
    accel = suite.get(args.accel) if args.accel else suite.accelerators[0]
    points = [10 ** (-1 + 5 * i / (args.points - 1)) for i in range(args.points)]
    rows: list[tuple[Any, ...]] = [
        ("roofline", "", ai, roofline_attainable(ai, accel)) for ai in points
    ]
    if args.model:
        model = _load_model_arg(args.model)
        mm = model_metrics(model)
        for layer, row in zip(model.layers, mm.rows):
            cost = estimate(layer, row.metrics, accel)
            if row.metrics.macs == 0 or cost.dram_bytes_total == 0 or cost.latency_s == 0:
                continue
            ai = row.metrics.macs / cost.dram_bytes_total
            rows.append(("achieved", row.layer_id, ai, row.metrics.macs / cost.latency_s))
    ridge = ridge_point(accel)
    # the only surface where the MAC -> FLOP convention is applied
    trailer = (f"# accelerator={accel.name} ridge_macs_per_byte={_fmt(ridge)}"
               f" ridge_flops_per_byte={_fmt(ridge * FLOPS_PER_MAC)}",)
    _write_out(args.out, _csv_text(("series", "layer_id", "intensity_macs_per_byte", "macs_per_s"),
                                   rows, trailer))
    return 0


def _plan_payload(model: ModelGraph, plan: SchedulePlan) -> dict[str, Any]:
    return {
        "model": model.name,
        "assignments": [
            {
                "layer_id": a.layer_id,
                "family": a.family.value,
                "ideal": a.ideal,
                "destination": a.destination,
                "reason": a.reason.value,
            }
            for a in plan.assignments
        ],
        "communication_events": [
            {"producer": e.producer, "consumer": e.consumer, "bytes": e.bytes,
             "via_dram": e.via_dram}
            for e in plan.events
        ],
    }


def cmd_schedule(args: argparse.Namespace) -> int:
    model = _load_model_arg(args.model)
    suite = _load_suite_arg(args.hw)
    routing = _routing_for(suite, args.routing)
    plan = schedule(model, suite, routing)
    if args.format == "json":
        _write_out(args.out, _json_text(_plan_payload(model, plan)))
    else:
        rows = [(a.layer_id, a.family.value, a.ideal, a.destination, a.reason.value)
                for a in plan.assignments]
        trailer = [f"# event producer={e.producer} consumer={e.consumer} bytes={e.bytes} via_dram={str(e.via_dram).lower()}"
                   for e in plan.events]
        _write_out(args.out, _csv_text(("layer_id", "family", "ideal", "destination", "reason"),
                                       rows, trailer))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    model = _load_model_arg(args.model)
    suite = _load_suite_arg(args.hw)
    routing = _routing_for(suite, args.routing)
    plan = schedule(model, suite, routing)
    report = engine.simulate(model, plan, suite)
    if args.format == "json":
        payload = {
            "model": report.model_name,
            "total_macs": report.total_macs,
            "total_latency_s": report.total_latency_s,
            "throughput_macs_per_s": report.throughput_macs_per_s,
            "mean_utilization": report.mean_utilization,
            "energy_j": {
                "pe_dynamic": report.total_energy.pe_dynamic,
                "buf_dynamic": report.total_energy.buf_dynamic,
                "noc": report.total_energy.noc,
                "dram": report.total_energy.dram,
                "pe_static": report.total_energy.pe_static,
                "buf_static": report.total_energy.buf_static,
                "total": report.total_energy.total,
            },
            "per_accelerator": [
                {"name": s.name, "macs": s.macs, "busy_s": s.busy_s,
                 "utilization": s.utilization, "energy_j": s.energy.total}
                for s in report.per_accelerator
            ],
            "layers": [
                {"layer_id": r.layer_id, "accelerator": r.accelerator,
                 "macs": r.metrics.macs, "dram_param_bytes": r.cost.dram_param_bytes,
                 "dram_act_bytes": r.cost.dram_act_bytes, "noc_bytes": r.cost.noc_bytes,
                 "latency_s": r.cost.latency_s, "utilization": r.cost.utilization,
                 "bottleneck": r.cost.bottleneck.value, "energy_j": r.energy.total}
                for r in report.layers
            ],
            "communications": [
                {"producer": c.producer, "consumer": c.consumer, "bytes": c.bytes,
                 "latency_s": c.latency_s, "energy_j": c.energy_j}
                for c in report.communications
            ],
        }
        _write_out(args.out, _json_text(payload))
    else:
        rows = [
            (r.layer_id, r.accelerator, r.metrics.macs, r.cost.dram_param_bytes,
             r.cost.dram_act_bytes, r.cost.noc_bytes, r.cost.latency_s,
             r.cost.utilization, r.cost.bottleneck.value, r.energy.total)
            for r in report.layers
        ]
        trailer = [
            f"# total_latency_s={_fmt(report.total_latency_s)}"
            f" total_energy_j={_fmt(report.total_energy.total)}"
            f" mean_utilization={_fmt(report.mean_utilization)}"
            f" throughput_macs_per_s={_fmt(report.throughput_macs_per_s)}"
        ]
        _write_out(args.out, _csv_text(
            ("layer_id", "accelerator", "macs", "dram_param_bytes", "dram_act_bytes",
             "noc_bytes", "latency_s", "utilization", "bottleneck", "energy_j"),
            rows, trailer))
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    models = [_load_model_arg(path) for path in args.model]
    if args.hw == "canonical":
        scenarios = list(engine.canonical_scenarios())
    else:
        suite = _load_suite_arg(args.hw)
        scenarios = [engine.Scenario(a.name, HardwareSuite((a,), suite.dram),
                                     single_target_routing(a.name))
                     for a in suite.accelerators]
    table = engine.compare_suites(models, scenarios, args.baseline)
    if args.format == "json":
        payload = {
            "baseline": table.baseline,
            "rows": [
                {"scenario": r.scenario, "energy_j": r.energy_j, "latency_s": r.latency_s,
                 "throughput_macs_per_s": r.throughput_macs_per_s,
                 "mean_utilization": r.mean_utilization,
                 "energy_efficiency_x": r.energy_efficiency_x,
                 "throughput_x": r.throughput_x, "latency_x": r.latency_x}
                for r in table.rows
            ],
        }
        _write_out(args.out, _json_text(payload))
    else:
        rows = [(r.scenario, r.energy_j, r.latency_s, r.throughput_macs_per_s,
                 r.mean_utilization, r.energy_efficiency_x, r.throughput_x, r.latency_x)
                for r in table.rows]
        _write_out(args.out, _csv_text(
            ("scenario", "energy_j", "latency_s", "throughput_macs_per_s",
             "mean_utilization", "energy_efficiency_x", "throughput_x", "latency_x"),
            rows, trailer=(f"# baseline={table.baseline}",)))
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    spec = synthetic.SyntheticSuiteSpec(seed=args.seed)
    docs = synthetic.generate_suite(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for doc in docs:
        path = out_dir / f"{doc['name']}.json"
        path.write_text(_json_text(doc))
        print(path)
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgesim",
        description="Layer characterization, cost/energy modeling, and scheduling "
                    "for heterogeneous edge NN accelerators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, model: bool = True, hw: bool = False) -> None:
        if model:
            p.add_argument("--model", required=True, help="model document (JSON)")
        if hw:
            p.add_argument("--hw", default="canonical",
                           help="'canonical' or a hardware suite JSON file")
            p.add_argument("--routing", default=None,
                           help="optional family->accelerator JSON map")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("characterize", help="per-layer MACs, footprints, reuse")
    common(p)
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("cluster", help="classify layers into families")
    common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("roofline", help="attainable-throughput series and achieved points")
    p.add_argument("--model", default=None, help="optional model for achieved points")
    p.add_argument("--hw", default="canonical")
    p.add_argument("--accel", default=None, help="accelerator name (default: first)")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_roofline)

    p = sub.add_parser("schedule", help="two-phase layer-to-accelerator mapping")
    common(p, hw=True)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="run a schedule and report cost/energy")
    common(p, hw=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="scenario comparison normalized to a baseline")
    p.add_argument("--model", action="append", required=True,
                   help="model document; repeat for a multi-model aggregate")
    p.add_argument("--hw", default="canonical")
    p.add_argument("--baseline", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", help="write the seeded synthetic model suite")
    p.add_argument("--out", default="models")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EdgesimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
