import csv
import json
import math
import os
import subprocess

import numpy as np
import pytest

import surfcl

CLI = os.environ.get("SURFCL_CLI")
needs_cli = pytest.mark.skipif(not CLI, reason="SURFCL_CLI is not set")


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def read_snapshot(path):
    """Parse the snapshot text format into (header, classes, values)."""
    header = {}
    with open(path) as f:
        assert f.readline().strip() == "surfcl-snapshot 1"
        for line in f:
            line = line.strip()
            if line == "data":
                break
            key, _, rest = line.partition(" ")
            header[key] = rest
        rows = [line.split() for line in f]
    classes = np.array([int(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    return header, classes, values


def test_catalog():
    ids = surfcl.experiment_ids()
    assert len(ids) == 11
    assert [i for i, _ in surfcl.list_experiments()] == ids


def test_geometry_and_pushforward():
    assert surfcl.signed_distance("circle(1)", [2.0, 0.0, 0.0]) == pytest.approx(1.0)
    assert surfcl.signed_distance("sphere", [0.0, 0.0, 0.0]) == pytest.approx(-1.0)
    assert np.allclose(surfcl.closest_point("circle(1)", [3.0, 4.0, 0.0]), [0.6, 0.8, 0.0])
    h = np.zeros((3, 3))
    h[1, 1] = 0.5
    m = surfcl.pushforward_matrix(1.0, h, 2)
    assert np.allclose(m[:2, :2], np.diag([1.0, 2.0]))
    with pytest.raises(surfcl.SurfclError):
        surfcl.signed_distance("cube", [0.0, 0.0, 0.0])


def test_norms_and_rates():
    e = surfcl.error_norms([0.5, -0.5], [0.0, 0.0], [1.0, 3.0])
    assert e == pytest.approx({"l1": 2.0, "l2": 1.0, "linf": 0.5})
    assert surfcl.convergence_rate([0.1, 0.05], [1e-2, 1.25e-3]) == pytest.approx(3.0)
    assert surfcl.convergence_rate([0.1], [1e-2]) is None


def test_run_experiment(tmp_path):
    out = tmp_path / "a1"
    r = surfcl.run_experiment({"experiment": "A1", "n": [41, 81], "order": 1, "out": str(out), "dump": "none"})
    assert len(r["errors"]) == 2
    assert r["rates"]["l1"] == pytest.approx(1.0, abs=0.2)
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["order"] == 1
    assert [run["n"] for run in report["runs"]] == [41, 81]


@needs_cli
def test_cli_outputs_for_plotting(tmp_path):
    out = tmp_path / "m1"
    subprocess.run(
        [CLI, "run", "M1", "--n", "41,81", "--snapshots", "3", "--dump", "all", "--out", str(out)],
        check=True,
        capture_output=True,
    )
    errors = read_csv(out / "errors.csv")
    assert errors[0] == ["dx", "n", "l1", "l2", "linf"]
    assert [int(row[1]) for row in errors[1:]] == [41, 81]
    rates = read_csv(out / "rates.csv")
    assert rates[0] == ["norm", "rate"]
    assert {row[0] for row in rates[1:]} == {"l1", "l2", "linf"}
    mass = read_csv(out / "n081" / "mass.csv")
    assert mass[0] == ["t", "mass"]
    times = [float(row[0]) for row in mass[1:]]
    assert times == pytest.approx([0.0, math.pi, 2 * math.pi])
    assert float(mass[1][1]) == pytest.approx(math.pi / 2, rel=0.02)

    header, classes, values = read_snapshot(out / "n081" / "snapshot_0002.txt")
    assert header["experiment"] == "M1"
    assert header["dims"] == "2"
    nx, ny = (int(v) for v in header["size"].split())
    assert classes.size == nx * ny
    assert float(header["time"]) == pytest.approx(2 * math.pi)
    assert set(np.unique(classes)) == {0, 1, 2}
    assert np.all(np.isnan(values[classes == 0]))
    assert np.all(np.isfinite(values[classes > 0]))
    # x varies fastest: the node at (1, 0) is on the circle, hence inner.
    ox, oy = (float(v) for v in header["origin"].split())
    dx = float(header["spacing"])
    i, j = round((1.0 - ox) / dx), round((0.0 - oy) / dx)
    assert classes[i + nx * j] == 1


@needs_cli
def test_cli_flags_and_errors(tmp_path):
    help_text = subprocess.run([CLI, "run", "--help"], check=True, capture_output=True, text=True).stdout
    for flag in ["--experiment", "--n", "--order", "--cfl", "--embedding", "--extension", "--t-final", "--snapshots",
                 "--out", "--config", "--weno-eps", "--sweep", "--sweep-order", "--dump"]:
        assert flag in help_text
    listing = subprocess.run([CLI, "list"], check=True, capture_output=True, text=True).stdout
    assert len(listing.strip().splitlines()) == 11
    bad = subprocess.run([CLI, "run", "A1", "--n", "21", "--out", str(tmp_path / "x")], capture_output=True, text=True)
    assert bad.returncode != 0
    assert "n must be at least 41" in bad.stderr
