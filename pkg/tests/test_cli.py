import json

import numpy as np
import pytest

from mfdlab.cli import main
from mfdlab.config import ExperimentConfig, from_dict, load_config
from mfdlab.io import csv_body, read_csv, read_mfd_samples, write_csv
from mfdlab.network import ParameterError

FAST = ["--rows", "2", "--cols", "2", "--ell", "6", "--reps", "4", "--densities", "0.3,0.8"]


def test_config_roundtrip(tmp_path):
    cfg = ExperimentConfig()
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert load_config(path).to_json() == cfg.to_json()


def test_config_rejects_unknown_field():
    with pytest.raises(ParameterError) as exc:
        from_dict({"network": {"rowz": 3}})
    assert exc.value.field == "network.rowz"


@pytest.mark.parametrize(
    "patch,field",
    [({"reps": 1}, "reps"), ({"densities": [0.5, 0.2]}, "densities"), ({"policy": "fifo"}, "policy")],
)
def test_config_validation_names_field(patch, field):
    cfg = from_dict(patch)
    with pytest.raises(ParameterError) as exc:
        cfg.validate()
    assert exc.value.field == field


def test_csv_roundtrip(tmp_path):
    path = write_csv(tmp_path / "a.csv", ("x", "y"), [(1, 0.1), (2, np.float64(1 / 3))], ["hello"])
    header, rows = read_csv(path)
    assert header == ["hello"]
    assert float(rows[1]["y"]) == 1 / 3
    assert csv_body(path).splitlines()[0] == "x,y"


def test_cuts(tmp_path, capsys):
    assert main(["cuts", "--lambda", "1", "--delta", "0", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "cuts.csv")
    assert float(rows[0]["u0"]) == float(rows[0]["w0"]) == 4 / 3
    cfg = json.loads(next(h for h in header if h.startswith("config: "))[8:])
    assert cfg["network"]["lam"] == 1.0
    assert "seed: 0" in header


def test_invalid_config_exits_nonzero(tmp_path, capsys):
    assert main(["cuts", "--lambda", "-1", "--out", str(tmp_path)]) != 0
    assert "lambda" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"network": {"ell": 3}}')
    assert main(["cuts", "--config", str(bad)]) != 0
    assert "ell" in capsys.readouterr().err


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MFDLAB_SEED", "17")
    assert main(["cuts", "--out", str(tmp_path)]) == 0
    header, _ = read_csv(tmp_path / "cuts.csv")
    assert "seed: 17" in header


def test_mfd_writes_aggregate_and_samples(tmp_path):
    assert main(["mfd", "--policy", "lqf,rnd", "--out", str(tmp_path), *FAST]) == 0
    for pol in ("lqf", "rnd"):
        _, agg = read_csv(tmp_path / f"mfd_{pol}_aggregate.csv")
        assert [r["k"] for r in agg] == ["0.3", "0.8"]
        est = read_mfd_samples(tmp_path / f"mfd_{pol}_samples.csv")
        assert est.samples.shape == (2, 4)
        assert np.allclose(est.mean, [float(r["mean"]) for r in agg])


def test_supervised_then_neural_mfd_then_compare(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["train-supervised", "--out", out, *FAST]) == 0
    w = str(tmp_path / "supervised.weights")
    assert main(["mfd", "--policy", "neural", "--weights", w, "--out", out, *FAST]) == 0
    assert main(["mfd", "--policy", "lqf", "--out", out, *FAST]) == 0
    a, b = tmp_path / "mfd_neural_aggregate.csv", tmp_path / "mfd_lqf_aggregate.csv"
    assert main(["compare", str(a), str(b), "--out", out]) == 0
    _, rows = read_csv(tmp_path / "compare.csv")
    assert len(rows) == 2


def test_other_subcommands_run(tmp_path):
    out = str(tmp_path)
    assert main(["bernoulli", "--out", out, "--js", "1,3", *FAST]) == 0
    assert len(read_csv(tmp_path / "bernoulli_bands.csv")[1]) == 3 * 2 * 2
    assert main(["simulate", "--k", "0.4", "--steps", "20", "--dump", "--out", out, *FAST]) == 0
    assert len(read_csv(tmp_path / "simulate_lqf.csv")[1]) == 20
    assert main(["detect", "--policy", "rnd", "--k", "0.5", "--horizon", "80", "--out", out, *FAST]) == 0
    assert main(["train-rl", "--k", "0.2", "--iterations", "5", "--out", out, *FAST]) == 0
    assert len(read_csv(tmp_path / "drl_k0.2_trace.csv")[1]) == 5
    assert main(["random-search", "--trials", "2", "--search-reps", "2", "--out", out, *FAST]) == 0


def test_same_seed_same_bodies_serial_and_parallel(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["mfd", "--policy", "rnd", "--delta", "0.3", "--seed", "4", *FAST]
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b), "--jobs", "2"]) == 0
    for name in ("mfd_rnd_aggregate.csv", "mfd_rnd_samples.csv"):
        assert csv_body(a / name) == csv_body(b / name)
