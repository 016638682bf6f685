import csv
import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import platform_doc, trace_spec
from refsim.cli import main


@pytest.fixture
def inputs(tmp_path):
    (tmp_path / "p.json").write_text(json.dumps(platform_doc()))
    spec = trace_spec([{"phases": [(500, 2.0, 0.0), (500, 1.0, 0.01)]},
                       {"arrival_ms": 200, "phases": [(1500, 1.5, 0.002, 0.1)]}])
    (tmp_path / "s.json").write_text(json.dumps(spec))
    (tmp_path / "m.json").write_text(json.dumps({
        "policies": [{"name": "dvfs", "type": "simple_dvfs", "period_ms": 50},
                     {"name": "map", "type": "task_mapping", "period_ms": 500}],
        "models": [{"type": "ondemand", "period_ms": 50}]}))
    assert main(["gen-trace", "--spec", str(tmp_path / "s.json"), "--seed", "4",
                 "--out", str(tmp_path / "t.csv")]) == 0
    return tmp_path


def args(d, *extra):
    return ["run", "--platform", str(d / "p.json"), "--trace", str(d / "t.csv"),
            "--manager", str(d / "m.json"), *extra]


def test_run_writes_report(inputs, capsys):
    out = inputs / "r.csv"
    assert main(args(inputs, "--duration-ms", "1000", "--out", str(out))) == 0
    stdout = capsys.readouterr().out
    assert "total energy" in stdout and "mean IPS" in stdout and "migrations" in stdout
    rows = list(csv.DictReader(out.open()))
    assert sum(r["resource"] == "core0" for r in rows) == 100
    assert sum(r["resource"] == "system" for r in rows) == 100


def test_jsonl_format(inputs):
    out = inputs / "r.jsonl"
    assert main(args(inputs, "--duration-ms", "100", "--format", "jsonl", "--out", str(out))) == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(recs) == 10 * 11


def test_missing_trace_names_path(inputs, capsys):
    argv = args(inputs, "--duration-ms", "100")
    argv[argv.index("--trace") + 1] = str(inputs / "nope.csv")
    assert main(argv) == 1
    assert "nope.csv" in capsys.readouterr().err


def test_bad_duration(inputs):
    assert main(args(inputs, "--duration-ms", "105")) == 1


def test_policy_runtime_error_exit_2(inputs, capsys):
    # a 50 ms model cannot be stepped inside a 10 ms policy's horizon
    (inputs / "m.json").write_text(json.dumps({
        "policies": [{"name": "dvfs", "type": "simple_dvfs", "period_ms": 10}],
        "models": [{"type": "ondemand", "period_ms": 50}]}))
    assert main(args(inputs, "--duration-ms", "100", "--out", str(inputs / "r.csv"))) == 2
    assert "dvfs" in capsys.readouterr().err


def test_validate_ok(inputs, capsys):
    assert main(["validate", "--platform", str(inputs / "p.json"), "--trace", str(inputs / "t.csv"),
                 "--manager", str(inputs / "m.json")]) == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_validate_names_violations(inputs, capsys):
    text = (inputs / "t.csv").read_text().replace("ref_freq_ghz=2", "ref_freq_ghz=1.5")
    lines = text.splitlines()
    lines[3], lines[4] = lines[4], lines[3]
    (inputs / "bad.csv").write_text("\n".join(lines) + "\n")
    assert main(["validate", "--platform", str(inputs / "p.json"), "--trace", str(inputs / "bad.csv")]) == 1
    err = capsys.readouterr().err.splitlines()
    assert any("ref_freq_ghz" in line for line in err)
    assert any("non-monotone sample_index" in line for line in err)


def test_validate_bad_manager(inputs, capsys):
    (inputs / "m.json").write_text(json.dumps({"scenarios": [{"name": "x", "policies": ["ghost"]}]}))
    assert main(["validate", "--manager", str(inputs / "m.json")]) == 1
    assert "ghost" in capsys.readouterr().err


def test_gen_trace_spec_error(tmp_path, capsys):
    (tmp_path / "s.json").write_text(json.dumps(trace_spec([{"phases": [(100, 0.01, 0.0)]}])))
    assert main(["gen-trace", "--spec", str(tmp_path / "s.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_list_policies(capsys):
    assert main(["list-policies"]) == 0
    out = capsys.readouterr().out
    for name in ("simple_dvfs", "ondemand", "task_mapping", "gts"):
        assert name in out


phase = st.tuples(st.integers(1, 10).map(lambda k: k * 10), st.floats(0.2, 5.0),
                  st.floats(0.0, 0.02), st.sampled_from([0.0, 0.1]))


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.tuples(st.integers(0, 20).map(lambda k: k * 10),
                          st.lists(phase, min_size=1, max_size=3)), min_size=1, max_size=4),
       st.integers(0, 1000))
def test_gen_validate_run_pipeline(tmp_path_factory, tasks, seed):
    d = tmp_path_factory.mktemp("pipe")
    spec = trace_spec([{"arrival_ms": a, "phases": p} for a, p in tasks])
    (d / "s.json").write_text(json.dumps(spec))
    (d / "p.json").write_text(json.dumps(platform_doc()))
    (d / "m.json").write_text(json.dumps({"policies": [{"type": "simple_dvfs"}, {"type": "gts"}]}))
    assert main(["gen-trace", "--spec", str(d / "s.json"), "--seed", str(seed),
                 "--out", str(d / "t.csv")]) == 0
    assert main(["validate", "--platform", str(d / "p.json"), "--trace", str(d / "t.csv"),
                 "--manager", str(d / "m.json"), "--tick-ms", "10"]) == 0
    assert main(["run", "--platform", str(d / "p.json"), "--trace", str(d / "t.csv"),
                 "--manager", str(d / "m.json"), "--duration-ms", "200",
                 "--out", str(d / "r.csv")]) == 0
