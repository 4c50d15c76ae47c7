import json

import pytest

from edgesim.cli import main
from edgesim.synthetic import SyntheticSuiteSpec, generate_suite


@pytest.fixture()
def model_file(tmp_path):
    doc = generate_suite(SyntheticSuiteSpec())[0]
    path = tmp_path / "model.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture()
def lstm_file(tmp_path):
    doc = {"name": "tiny_lstm", "class": "LSTM",
           "layers": [{"id": "l0", "kind": "LstmLayer", "d": 256, "h": 256, "t": 3}]}
    path = tmp_path / "lstm.json"
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_characterize_csv_stdout(capsys, model_file):
    code, out, err = run(capsys, "characterize", "--model", model_file, "--out", "-")
    assert code == 0
    header = out.splitlines()[0]
    assert header == ("layer_id,kind,macs,param_bytes,param_reuse,"
                      "input_act_bytes,output_act_bytes,act_reuse")


def test_characterize_json(capsys, model_file):
    code, out, _ = run(capsys, "characterize", "--model", model_file, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["layers"] and payload["total_macs"] > 0


def test_outputs_byte_identical(capsys, model_file):
    _, first, _ = run(capsys, "characterize", "--model", model_file)
    _, second, _ = run(capsys, "characterize", "--model", model_file)
    assert first == second


def test_cluster_histogram(capsys, model_file):
    code, out, _ = run(capsys, "cluster", "--model", model_file)
    assert code == 0
    assert out.splitlines()[0] == "layer_id,family,routed_family"
    assert any(line.startswith("# histogram") for line in out.splitlines())


def test_roofline_series(capsys, model_file):
    code, out, _ = run(capsys, "roofline", "--hw", "canonical", "--accel", "Baseline",
                       "--model", model_file)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "series,layer_id,intensity_macs_per_byte,macs_per_s"
    roofline_rows = [l for l in lines if l.startswith("roofline,")]
    achieved_rows = [l for l in lines if l.startswith("achieved,")]
    assert len(roofline_rows) == 100
    assert achieved_rows
    assert any("ridge_macs_per_byte=32" in l for l in lines)


def test_schedule_json(capsys, lstm_file):
    code, out, _ = run(capsys, "schedule", "--model", lstm_file, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert {a["destination"] for a in payload["assignments"]} == {"Pavlov"}
    assert payload["communication_events"] == []


def test_simulate_csv_and_json(capsys, model_file):
    code, out, _ = run(capsys, "simulate", "--model", model_file)
    assert code == 0
    assert out.splitlines()[0].startswith("layer_id,accelerator,macs,")
    code, out, _ = run(capsys, "simulate", "--model", model_file, "--format", "json")
    payload = json.loads(out)
    assert payload["total_latency_s"] > 0
    assert payload["energy_j"]["total"] > 0


def test_compare_table(capsys, model_file, lstm_file):
    code, out, _ = run(capsys, "compare", "--model", model_file, "--model", lstm_file,
                       "--hw", "canonical", "--baseline", "Baseline")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("scenario,energy_j,latency_s,")
    assert any(line.startswith("Mensa-G,") for line in lines)


def test_generate_writes_suite(tmp_path, capsys):
    out_dir = tmp_path / "suite"
    code, out, _ = run(capsys, "generate", "--out", str(out_dir), "--seed", "5")
    assert code == 0
    files = sorted(p.name for p in out_dir.glob("*.json"))
    assert files == ["cnn_0.json", "cnn_1.json", "lstm_0.json", "rcnn_0.json",
                     "transducer_0.json"]
    first = (out_dir / "cnn_0.json").read_bytes()
    run(capsys, "generate", "--out", str(out_dir), "--seed", "5")
    assert (out_dir / "cnn_0.json").read_bytes() == first


def test_custom_hardware_file(tmp_path, capsys, lstm_file):
    import edgesim
    hw = tmp_path / "hw.json"
    hw.write_text(json.dumps(edgesim.serialize_suite(edgesim.canonical_suite())))
    code, out, _ = run(capsys, "compare", "--model", lstm_file, "--hw", str(hw),
                       "--baseline", "Baseline")
    assert code == 0
    assert out.splitlines()[1].startswith("Baseline,")

    routing = tmp_path / "routing.json"
    routing.write_text(json.dumps({f: "Pavlov" for f in ("F1", "F2", "F3", "F4", "F5")}))
    code, out, _ = run(capsys, "schedule", "--model", lstm_file, "--hw", str(hw),
                       "--routing", str(routing), "--format", "json")
    assert code == 0
    assert {a["destination"] for a in json.loads(out)["assignments"]} == {"Pavlov"}


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "characterize")[0] == 2          # missing --model
    assert run(capsys, "frobnicate")[0] == 2            # unknown subcommand
    assert run(capsys, "simulate", "--model", "x.json", "--format", "yaml")[0] == 2


def test_validation_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "m", "class": "CNN", "layers": [
        {"id": "a", "kind": "DepthwiseConv", "hi": 8, "wi": 8, "ci": 4, "co": 8,
         "kh": 3, "kw": 3}]}))
    code, _, err = run(capsys, "characterize", "--model", str(bad))
    assert code == 1
    assert "error:" in err and "\n" not in err.strip("\n") or err.count("\n") == 1

    code, _, err = run(capsys, "characterize", "--model", str(tmp_path / "missing.json"))
    assert code == 1


def test_compare_missing_baseline_exit_1(capsys, model_file):
    code, _, err = run(capsys, "compare", "--model", model_file,
                       "--hw", "canonical", "--baseline", "Nope")
    assert code == 1
    assert "baseline" in err
