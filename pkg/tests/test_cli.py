import csv
import io
import json

import pytest

from qmemchan.cli import CSV_COLUMNS, SweepConfig, UsageError, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_capacity():
    assert run("capacity", "--g", "1") == (0, "g=1 Q=1 C=1\n")
    assert run("capacity", "--lambda", "0.25") == (0, "g=0.5 Q=0.188721875541 C=1\n")
    assert run("capacity", "--g", "0") == (0, "g=0 Q=0 C=1\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["capacity"],
        ["capacity", "--g", "0.5", "--lambda", "0.25"],
        ["capacity", "--g", "1.5"],
        ["capacity", "--g", "abc"],
        ["nonsense"],
        [],
        ["rates", "--regime", "perfect"],
        ["rates", "--regime", "auto", "--intervals", "0.5,2"],
        ["attenuation-sweep", "--lambda", "0", "--output", "x.csv"],
        ["attenuation-sweep", "--tau", "0", "1", "5"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(*argv)[0] == 2


def test_sweep_csv_layout(tmp_path):
    path = tmp_path / "s.csv"
    code, msg = run("attenuation-sweep", "--lambda", "0.01", "--n", "1,5", "--tau", "0.02", "1", "50", "--output", str(path))
    assert code == 0
    with open(path) as fh:
        assert fh.readline().strip() == ",".join(CSV_COLUMNS)
    rows = read_csv(path)
    assert len(rows) == 100
    best = max(rows, key=lambda r: float(r["gamma"]))
    assert best["n"] == "1"
    assert 0.35 <= float(best["tau_over_tauE"]) <= 0.65
    assert 1.2 <= float(best["gamma"]) <= 1.4
    # 12 significant digits at most
    assert all(len(v.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 12 for r in rows for v in r.values())


def test_sweep_trivial_and_weak_coupling(tmp_path):
    path = tmp_path / "a.csv"
    assert run("attenuation-sweep", "--lambda", "0.01,0.5", "--n", "0", "--tau", "0.1", "1", "10", "--output", str(path))[0] == 0
    assert all(float(r["gamma"]) == 1.0 for r in read_csv(path))
    assert run("attenuation-sweep", "--lambda", "0.81", "--n", "1:10", "--tau", "0.02", "1", "50", "--output", str(path))[0] == 0
    assert max(float(r["gamma"]) for r in read_csv(path)) <= 1 + 1e-9


def test_sweep_is_byte_identical_and_job_independent(tmp_path):
    args = ["attenuation-sweep", "--lambda", "0.01,0.2", "--n", "1:3", "--tau", "0.05", "1", "12"]
    paths = [tmp_path / f"{k}.csv" for k in range(3)]
    run(*args, "--output", str(paths[0]))
    run(*args, "--output", str(paths[1]))
    run(*args, "--output", str(paths[2]), "--jobs", "2")
    data = [p.read_bytes() for p in paths]
    assert data[0] == data[1] == data[2]


def test_sweep_fixed_p(tmp_path):
    path = tmp_path / "p.csv"
    assert run("attenuation-sweep", "--lambda", "0.01", "--n", "1", "--tau", "0.5", "0.5", "1", "--p", "1", "--output", str(path))[0] == 0
    (row,) = read_csv(path)
    assert float(row["gamma"]) == pytest.approx(1 / 1.5)
    assert row["p_opt"] == "1"


def test_json_output_round_trips(tmp_path):
    cfg = {"lambda_values": [0.01], "n_values": [1, 2], "tau_over_tauE": [0.1, 1.0, 4], "format": "json",
           "output_path": str(tmp_path / "a.json")}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run("attenuation-sweep", "--config", str(cfg_path))[0] == 0
    first = json.loads((tmp_path / "a.json").read_text())
    assert len(first["records"]) == 8
    assert first["timestamp"] == ""
    rec = first["records"][0]
    assert set(rec) == {"inputs", "outputs", "tool_version", "timestamp"}
    # the output document is itself a valid config; flags override its fields
    assert run("attenuation-sweep", "--config", str(tmp_path / "a.json"), "--output", str(tmp_path / "b.json"))[0] == 0
    second = json.loads((tmp_path / "b.json").read_text())
    assert second["records"] == first["records"]
    assert SweepConfig.from_dict(first) == SweepConfig.from_dict(first["config"])


def test_config_validation():
    with pytest.raises(UsageError):
        SweepConfig.from_dict({"lambda_values": []})
    with pytest.raises(UsageError):
        SweepConfig.from_dict({"bogus": 1})
    with pytest.raises(UsageError):
        SweepConfig.from_dict({"n_values": [-1]})
    with pytest.raises(UsageError):
        SweepConfig.from_dict({"format": "xml"})


def test_unwritable_output(tmp_path):
    assert run("attenuation-sweep", "--lambda", "0.1", "--n", "1", "--tau", "0.5", "0.5", "1",
               "--output", str(tmp_path / "missing" / "x.csv"))[0] == 2


def test_rates_examples():
    code, out = run("rates", "--regime", "perfect", "--tau-s", "1")
    rep = json.loads(out)
    assert code == 0 and rep["r_q"] == 1 and rep["r_c"] == 1
    rep = json.loads(run("rates", "--intervals", "1", "--lambda", "0.25")[1])
    assert rep["regime"] == "memoryless"
    assert rep["r_q"] == pytest.approx(0.188722, abs=1e-6) and rep["r_c"] == 1
    rep = json.loads(run("rates", "--intervals", "0,0", "--tau-s", "0.5")[1])
    assert rep["regime"] == "perfect" and rep["r_q"] == 2
    rep = json.loads(run("rates", "--regime", "attenuation", "--lambda", "0.01", "--n", "1", "--tau", "0.5")[1])
    assert rep["r_c"] == pytest.approx(0.6667, abs=1e-4)
    rep = json.loads(run("rates", "--regime", "grouped", "--lambda", "0.25", "--intervals", "0.1", "--delta-t", "1")[1])
    assert rep["r_q"] <= rep["r_c"] <= rep["upper_bound"]


def test_validate_and_fault_injection():
    code, first = run("validate")
    assert code == 0
    assert run("validate")[1] == first
    code, out = run("validate", "--inject-fault", "eta-gt-1")
    assert code == 1
    assert "FAIL stationarity" in out


def test_markov_check():
    code, out = run("markov-check", "--instances", "10")
    assert code == 0 and out.startswith("PASS")


def test_version(capsys):
    assert run("--version")[0] == 0
