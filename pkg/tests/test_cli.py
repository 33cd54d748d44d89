import json

import numpy as np
import pytest

from hardyx import gfn1
from hardyx.cli import main
from hardyx.grid import GridFunction, make_grid


def write(tmp_path, name, cfg):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


SMALL = {
    "id": "small",
    "experiment": "riesz-equiv",
    "m": 1,
    "grid": {"n": 1, "N": 64, "L": 8.0},
    "space": {"kind": "Lebesgue", "p": 1},
    "family": {"kind": "dilated-gaussians", "count": 3},
    "seed": 0,
}

OUTSIDE = {
    "id": "outside",
    "experiment": "riesz-equiv",
    "m": 1,
    "grid": {"n": 2, "N": 16, "L": 4.0},
    "space": {"kind": "Lebesgue", "p": 0.4},
    "family": {"kind": "dilated-gaussians", "count": 2, "min_width": 0.5, "max_width": 1.0},
}


def test_run_ok(tmp_path, capsys):
    cfg = write(tmp_path, "small.json", SMALL)
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 0
    csv = (tmp_path / "out" / "small.csv").read_text()
    assert csv.splitlines()[0] == "member_id,norm_a,norm_b,ratio" and len(csv.splitlines()) == 4
    summary = json.loads((tmp_path / "out" / "small.summary.json").read_text())
    assert summary["verified"] and summary["hypothesis"] == "in-hypothesis"


def test_run_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    cfg = write(tmp_path, "small.json", SMALL)
    assert main(["run", cfg, "--out", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("HARDYX_THREADS", "1")
    assert main(["run", cfg, "--out", str(tmp_path / "b")]) == 0
    for name in ("small.csv", "small.summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_hypothesis_exit_and_override(tmp_path, capsys):
    cfg = write(tmp_path, "outside.json", OUTSIDE)
    assert main(["run", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "hypothesis violated" in capsys.readouterr().err
    assert not (tmp_path / "o" / "outside.csv").exists() or \
        len((tmp_path / "o" / "outside.csv").read_text().splitlines()) <= 1
    assert main(["run", cfg, "--override-hypothesis", "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "outside.summary.json").read_text())
    assert summary["hypothesis"] == "out-of-hypothesis"
    assert len((tmp_path / "o" / "outside.csv").read_text().splitlines()) == 3


def test_range_check_boundary(tmp_path):
    cfg = write(tmp_path, "r.json", {
        "id": "r", "experiment": "range-check", "m": 1, "n": 2,
        "space": {"kind": "MixedHerz", "alpha": [-0.5, 0.0], "p": [2, 2], "q": [2, 2]}})
    assert main(["run", cfg, "--out", str(tmp_path)]) == 2
    cfg = write(tmp_path, "r2.json", {
        "id": "r2", "experiment": "range-check", "m": 1, "n": 1,
        "space": {"kind": "Lorentz", "p": 0.8, "r": 2}})
    assert main(["run", cfg, "--out", str(tmp_path)]) == 0


@pytest.mark.parametrize("bad", [
    "not json",
    json.dumps([1, 2]),
    json.dumps({"experiment": "nope"}),
    json.dumps({**SMALL, "seed": -1}),
    json.dumps({**SMALL, "grid": {"n": 1, "N": 63, "L": 8.0}}),
    json.dumps({**SMALL, "space": {"kind": "Orlicz"}}),
])
def test_bad_config(tmp_path, capsys, bad):
    p = tmp_path / "bad.json"
    p.write_text(bad)
    assert main(["run", str(p), "--out", str(tmp_path)]) == 1
    assert "hardyx: error" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert main(["run", str(tmp_path / "missing.json")]) == 1


def test_export_and_inspect(tmp_path, capsys):
    cfg = write(tmp_path, "small.json", SMALL)
    assert main(["export-family", cfg, "--out", str(tmp_path / "fam")]) == 0
    files = sorted((tmp_path / "fam").glob("*.gfn1"))
    assert len(files) == 3
    capsys.readouterr()
    assert main(["inspect", str(files[0])]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["N"] == 64 and info["n"] == 1 and info["kind"] == "real"
    # exported family round-trips through a "files" family
    rerun = dict(SMALL, id="files", family={"kind": "files", "paths": [str(f) for f in files]})
    cfg2 = write(tmp_path, "files.json", rerun)
    assert main(["run", cfg2, "--out", str(tmp_path / "f")]) == 0
    assert main(["run", cfg, "--out", str(tmp_path / "g")]) == 0
    a = (tmp_path / "f" / "files.csv").read_text()
    b = (tmp_path / "g" / "small.csv").read_text()
    assert a == b


def test_inspect_errors(tmp_path, capsys):
    bad = tmp_path / "bad.gfn1"
    bad.write_bytes(b"XXXX" + bytes(40))
    assert main(["inspect", str(bad)]) == 1
    g = make_grid(1, 16, 2.0)
    good = gfn1.export_field(GridFunction(g, np.arange(16.0)), tmp_path / "ok.gfn1")
    data = good.read_bytes()
    trunc = tmp_path / "trunc.gfn1"
    trunc.write_bytes(data[:-8])
    assert main(["inspect", str(trunc)]) == 1
    assert "grid file" in capsys.readouterr().err
