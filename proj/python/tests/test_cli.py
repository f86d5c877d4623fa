import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

CLI = os.environ.get("QCB_CLI", "qcb")
SCHEMAS = Path(os.environ.get("QCB_SCHEMAS", Path(__file__).resolve().parents[2] / "schemas"))

SMALL = """
[model]
family = ising
L = 6
h_x = -1.05
h_z = 0.0
[curve]
t_start = 1000
t_end = 1100
dt = 10
[qspectrum]
sweep = 2, 3
[cvpbench]
dims = 3, 4
instances = 20
[rmt]
L = 4
n_loc = 20
trials = 4
four_point_samples = 500
"""


def run(tmp_path, *args, config=SMALL):
    cfg = tmp_path / "run.ini"
    cfg.write_text(config)
    return subprocess.run([CLI, *args, "--config", str(cfg)], capture_output=True, text=True)


def load_schema(name):
    return json.loads((SCHEMAS / name).read_text())


def test_curve_outputs_validate(tmp_path):
    out = tmp_path / "out"
    r = run(tmp_path, "curve", "--out", str(out))
    assert r.returncode == 0, r.stderr
    summary = json.loads((out / "summary.json").read_text())
    jsonschema.validate(summary, load_schema("summary.schema.json"))
    lines = (out / "curve.csv").read_text().splitlines()
    assert lines[0] == "# config_hash=" + summary["config_hash"]
    assert lines[1] == "t,C_bound,C_biinv"
    assert len(lines) == 2 + 11
    assert (out / "config.ini").exists()


def test_qspectrum_outputs_validate(tmp_path):
    out = tmp_path / "out"
    r = run(tmp_path, "qspectrum", "--out", str(out))
    assert r.returncode == 0, r.stderr
    summary = json.loads((out / "qspectrum.json").read_text())
    jsonschema.validate(summary, load_schema("qspectrum.schema.json"))
    assert (out / "qspectrum.csv").read_text().startswith("# config_hash=")


@pytest.mark.parametrize("cmd,files", [("charges", ["charges.json"]), ("rmt", ["rmt.json"]),
                                       ("cvpbench", ["cvpbench.csv", "cvpbench.json"])])
def test_other_commands(tmp_path, cmd, files):
    out = tmp_path / "out"
    r = run(tmp_path, cmd, "--out", str(out))
    assert r.returncode == 0, r.stderr
    for f in files:
        assert (out / f).stat().st_size > 0


def test_outputs_independent_of_threads_and_location(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(tmp_path, "curve", "--out", str(a), "--threads", "1").returncode == 0
    assert run(tmp_path, "curve", "--out", str(b), "--threads", "3").returncode == 0
    assert (a / "curve.csv").read_bytes() == (b / "curve.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_seed_changes_hash(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(tmp_path, "cvpbench", "--out", str(a), "--seed", "1").returncode == 0
    assert run(tmp_path, "cvpbench", "--out", str(b), "--seed", "2").returncode == 0
    ha = json.loads((a / "cvpbench.json").read_text())["config_hash"]
    hb = json.loads((b / "cvpbench.json").read_text())["config_hash"]
    assert ha != hb


def test_unknown_key_exits_1(tmp_path):
    r = run(tmp_path, "curve", "--out", str(tmp_path / "o"), config="[model]\nfamly = ising\n")
    assert r.returncode == 1
    assert "model.famly" in r.stderr


def test_bad_dims_exit_1(tmp_path):
    r = run(tmp_path, "cvpbench", "--out", str(tmp_path / "o"), config="[cvpbench]\ndims = 9\n")
    assert r.returncode == 1


def test_empty_sweep_exits_1(tmp_path):
    r = run(tmp_path, "qspectrum", "--out", str(tmp_path / "o"), config="[qspectrum]\nsweep =\n")
    assert r.returncode == 1


def test_unwritable_output_exits_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    r = run(tmp_path, "curve", "--out", str(blocker / "sub"))
    assert r.returncode == 3


def test_resource_guard_exits_3(tmp_path):
    r = run(tmp_path, "curve", "--out", str(tmp_path / "o"), config="[model]\nL = 13\n")
    assert r.returncode == 3


def test_missing_subcommand_exits_1():
    r = subprocess.run([CLI], capture_output=True, text=True)
    assert r.returncode == 1
