import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from eigensphere.cli import ConfigError, RunConfig, run
from eigensphere.field import load_field


def invoke(*args):
    return subprocess.run(
        [sys.executable, "-m", "eigensphere", *args], capture_output=True, text=True
    )


def test_constants_command():
    out = invoke("constants", "--q", "4", "--d", "2")
    assert out.returncode == 0
    row = list(csv.DictReader(out.stdout.splitlines()))[0]
    assert float(row["value"]) == pytest.approx(3.0 / (2.0 * math.pi**2), rel=1e-12)
    assert row["method"] == "closed-form"


def test_moments_command():
    out = invoke("moments", "--q", "2", "--d", "2", "--ell", "10")
    assert out.returncode == 0
    row = list(csv.DictReader(out.stdout.splitlines()))[0]
    assert float(row["value"]) == pytest.approx(1.0 / 21.0, abs=1e-9)


def test_clt_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["clt", "--q", "2", "--d", "2", "--ell", "8,16", "--reps", "200",
            "--grid-resolution", "64", "--seed", "7"]
    assert invoke(*args, "--out", str(a)).returncode == 0
    assert invoke(*args, "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "d,ell,q,resolution,replicates,seed,value,stderr,ks,w1,cum4"


def test_json_output(tmp_path):
    path = tmp_path / "m.json"
    out = invoke("moments", "--q", "3", "--d", "2", "--ell", "4,8", "--format", "json",
                 "--out", str(path))
    assert out.returncode == 0
    rows = json.loads(path.read_text())
    assert [r["ell"] for r in rows] == [4, 8]
    assert set(rows[0]) == {"d", "ell", "q", "value", "scaled", "target", "rel_err"}


def test_simulate_dump(tmp_path):
    base = tmp_path / "sim.csv"
    out = invoke("simulate", "--d", "2", "--ell", "8", "--grid-resolution", "16",
                 "--seed", "5", "--out", str(base))
    assert out.returncode == 0
    d, ell, values = load_field(str(base) + ".l8.field")
    assert (d, ell) == (2, 8)
    assert len(values) == 512
    rerun = tmp_path / "sim2.csv"
    invoke("simulate", "--d", "2", "--ell", "8", "--grid-resolution", "16",
           "--seed", "5", "--out", str(rerun))
    assert np.array_equal(load_field(str(rerun) + ".l8.field")[2], values)


def test_exit_code_config_error():
    out = invoke("moments", "--ell", "16,8")  # not increasing
    assert out.returncode == 2
    assert "error" in out.stderr


def test_exit_code_numeric_error():
    out = invoke("constants", "--q", "1", "--d", "2")
    assert out.returncode == 3


def test_exit_code_io_error(tmp_path):
    out = invoke("moments", "--ell", "4", "--out", str(tmp_path / "nope" / "f.csv"))
    assert out.returncode == 4


def test_unknown_command_exits_2():
    out = invoke("frobnicate")
    assert out.returncode == 2


def test_run_config_validation():
    with pytest.raises(ConfigError):
        run(RunConfig(command="moments", ell_list=[]))
    with pytest.raises(ConfigError):
        run(RunConfig(command="moments", d=1))
    with pytest.raises(ConfigError):
        run(RunConfig(command="moments", fmt="yaml"))


def test_defect_command_schema(tmp_path):
    path = tmp_path / "d.csv"
    out = invoke("defect", "--d", "2", "--ell", "16", "--reps", "200",
                 "--grid-resolution", "96", "--seed", "3", "--out", str(path))
    assert out.returncode == 0
    row = list(csv.DictReader(path.read_text().splitlines()))[0]
    assert float(row["value"]) == pytest.approx(16**2 * float(row["value"]) / 256.0)
    assert float(row["stderr"]) > 0
    scaled = float(row["value"])
    assert scaled > 32.0 / math.sqrt(27.0)


def test_excursion_command(tmp_path):
    path = tmp_path / "e.csv"
    out = invoke("excursion", "--z", "1.0", "--d", "2", "--ell", "8", "--reps", "300",
                 "--seed", "11", "--Q", "8", "--out", str(path))
    assert out.returncode == 0
    row = list(csv.DictReader(path.read_text().splitlines()))[0]
    target = float(row["target_mean"])
    assert target == pytest.approx(4.0 * math.pi * (1.0 - 0.8413447460685429), rel=1e-12)
    assert abs(float(row["value"]) - target) <= 4.0 * float(row["stderr"])
    # the truncated-expansion variance tracks the sampled variance closely
    assert float(row["variance"]) == pytest.approx(float(row["expansion_variance"]), rel=0.2)
