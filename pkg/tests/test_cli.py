import csv
import io
import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from spinforge import cli
from spinforge.config import RunConfig, parse_n_list
from spinforge.errors import ConfigurationError


def test_config_round_trip():
    cfg = RunConfig(experiment="ate", s_star="5/2", C_z=None, seed=3, oracle=True, model="mn")
    assert RunConfig.from_text(cfg.to_text()) == cfg


@given(st.floats(0.1, 50), st.integers(1, 10**5), st.sampled_from(["0", "1", "3/2"]), st.booleans())
def test_config_round_trip_random(C_S, steps, s_star, oracle):
    cfg = RunConfig(C_S=C_S, steps=steps, s_star=s_star, oracle=oracle)
    assert RunConfig.from_text(cfg.to_text()) == cfg


def test_config_errors():
    with pytest.raises(ConfigurationError):
        RunConfig.from_text("nonsense = 1")
    with pytest.raises(ConfigurationError):
        RunConfig.from_text("steps = many")
    with pytest.raises(ConfigurationError):
        RunConfig(experiment="dance")


def test_n_list():
    assert parse_n_list("4..14") == [4, 6, 8, 10, 12, 14]
    assert parse_n_list("3..5:1") == [3, 4, 5]
    assert parse_n_list("8,10") == [8, 10]


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("s_star = 2\nC_S = 3.0\n")
    args = cli.build_parser().parse_args(["pite", "--config", str(path), "--c-s", "7.5"])
    cfg = cli.config_from_args(args)
    assert cfg.C_S == 7.5 and cfg.s_star == "2" and cfg.experiment == "pite"


def test_pite_output_is_reproducible(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["pite", "--s-star", "1", "--pite-steps", "40", "--sample-every", "10"]
    assert cli.main(base + ["--output", str(out1)]) == 0
    assert cli.main(base + ["--output", str(out2)]) == 0
    body = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("# config output")]
    assert body(out1) == body(out2)
    cfg = cli.read_config_header(out1)
    assert cfg.pite_steps == 40 and cfg.output == str(out1)


def test_bad_window_exit_code(capsys):
    assert cli.main(["pite", "--s-star", "0", "--c-z", "100"]) == 2
    assert "exit=2" in capsys.readouterr().err


def test_aliasing_exit_code():
    assert cli.main(["postselect", "--n", "4", "--s-star", "2", "--s-z-star", "2", "--c-s", "10"]) == 4


def test_postselect_prints_probabilities(capsys):
    assert cli.main(["postselect", "--s-star", "1", "--s-z-star", "0", "--c-s", "10"]) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert float(out["predicted_probability"]) == 0.5
    assert abs(float(out["realized_probability"]) - 0.5) < 1e-10


def test_spectrum_mn(tmp_path):
    out = tmp_path / "spec.csv"
    assert cli.main(["spectrum", "--model", "mn", "--energy-unit", "cm-1", "--output", str(out)]) == 0
    rows = list(csv.DictReader(l for l in out.read_text().splitlines() if not l.startswith("#")))
    assert float(rows[0]["s2"]) == pytest.approx(12.0)
    assert float(rows[0]["energy"]) == pytest.approx(-1187.5)


def test_scaling_writes_csv_and_json(tmp_path):
    out = tmp_path / "scaling.csv"
    assert cli.main(["scaling", "--n", "4..10", "--s-star", "0", "--output", str(out)]) == 0
    fits = json.loads(out.with_suffix(".json").read_text())["fits"]
    assert {f["series"] for f in fits} >= {"linear_terms", "quartic_terms"}


def test_empty_sweep(tmp_path):
    assert cli.sweep([], out_dir=tmp_path) == 0
    assert (tmp_path / "index.csv").read_text().strip() == ",".join(cli.INDEX_COLUMNS)


def test_sweep_parallel_equals_serial(tmp_path):
    base = RunConfig(experiment="pite", pite_steps=30, sample_every=10)
    cfgs = cli.grid_configs(base, ["s_star=0,1", "penalty=linear,quartic"])
    assert len(cfgs) == 4
    assert cli.sweep(cfgs, 1, tmp_path / "serial") == 0
    assert cli.sweep(cfgs, 2, tmp_path / "parallel") == 0
    for i in range(4):
        a = (tmp_path / "serial" / f"run_{i:03d}_pite.csv").read_text().splitlines()
        b = (tmp_path / "parallel" / f"run_{i:03d}_pite.csv").read_text().splitlines()
        strip = lambda lines: [l for l in lines if not l.startswith("# config output")]
        assert strip(a) == strip(b)


def test_sweep_path_collision(tmp_path):
    cfg = RunConfig(output=str(tmp_path / "same.csv"))
    with pytest.raises(ConfigurationError):
        cli.sweep([cfg, cfg], out_dir=tmp_path)


def test_sweep_records_failures(tmp_path):
    bad = RunConfig(s_star="0", C_z=100.0, pite_steps=5)
    assert cli.sweep([bad], out_dir=tmp_path) == 1
    row = next(csv.DictReader((tmp_path / "index.csv").open()))
    assert row["status"] == "failed" and row["exit_code"] == "2"
