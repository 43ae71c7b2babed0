import os
import re

import numpy as np
import pytest

from kinlr.cli import _pad_rank, main, parse_config
from kinlr.diagnostics import read_csv
from kinlr.errors import ConfigError
from kinlr.lowrank import to_full
from kinlr.vlasov import ProblemSpec, initial_condition, make_grids


def _write_cfg(tmp_path, name="run.cfg", **keys):
    lines = [f"{k} = {v}" for k, v in keys.items()]
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def _base(tmp_path, **extra):
    keys = dict(problem="landau", nx=16, nv=16, dt=0.05, tfinal=0.25,
                integrator="sat_euler", truncation="tolerance", theta="1e-8",
                out_csv=str(tmp_path / "diag.csv"))
    keys.update(extra)
    return _write_cfg(tmp_path, **keys)


def test_parse_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(
        "# a comment line\n"
        "problem = landau   # trailing comment\n"
        "\n"
        "nx = 32\n"
        "theta = 1e-6\n"
    )
    cfg = parse_config(str(path))
    assert cfg == {"problem": "landau", "nx": 32, "theta": 1e-6}

    path.write_text("nx = 32\nwhatever = 1\n")
    with pytest.raises(ConfigError, match="unknown key 'whatever'"):
        parse_config(str(path))
    path.write_text("nx = 32\nnx = 64\n")
    with pytest.raises(ConfigError, match="duplicate key"):
        parse_config(str(path))
    path.write_text("nx = lots\n")
    with pytest.raises(ConfigError, match="bad value 'lots'"):
        parse_config(str(path))
    path.write_text("just some words\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config(str(path))
    with pytest.raises(ConfigError, match="cannot read config"):
        parse_config(str(tmp_path / "missing.cfg"))


def test_run_writes_diagnostics(tmp_path):
    cfg = _base(tmp_path)
    assert main(["run", cfg]) == 0
    recs = read_csv(tmp_path / "diag.csv")
    assert len(recs) == 6  # initial record plus five steps
    assert recs[0].t == 0.0
    assert recs[-1].t == pytest.approx(0.25)
    assert recs[0].mass == pytest.approx(4.0 * np.pi, rel=1e-6)
    assert all(r.rank >= 1 for r in recs)


def test_run_is_deterministic(tmp_path):
    cfg = _base(tmp_path)
    main(["run", cfg])
    first = (tmp_path / "diag.csv").read_bytes()
    main(["run", cfg])
    assert (tmp_path / "diag.csv").read_bytes() == first


def test_run_config_errors(tmp_path):
    bad = _base(tmp_path, integrator="leapfrog")
    assert main(["run", bad]) == 2
    bad = _base(tmp_path, tfinal=0.126)  # not an integer multiple of dt
    assert main(["run", bad]) == 2
    bad = _base(tmp_path, scheme="spectral")
    assert main(["run", bad]) == 2
    bad = _base(tmp_path, dt=-0.1)
    assert main(["run", bad]) == 2
    # fixed-rank integrators must not carry a tolerance truncation
    bad = _base(tmp_path, integrator="ps_lie", rank=2)
    assert main(["run", bad]) == 2
    # adaptive integrators need the truncation key
    keys = dict(problem="landau", nx=16, nv=16, dt=0.05, tfinal=0.1,
                integrator="sat_euler", out_csv=str(tmp_path / "d.csv"))
    assert main(["run", _write_cfg(tmp_path, **keys)]) == 2


def test_error_reporting_on_stderr(tmp_path, capsys):
    bad = _base(tmp_path, integrator="leapfrog")
    assert main(["run", bad]) == 2
    err = capsys.readouterr().err
    assert err.startswith("kinlr: error:")
    assert "leapfrog" in err


def test_run_zero_tfinal(tmp_path):
    cfg = _base(tmp_path, tfinal=0.0)
    assert main(["run", cfg]) == 0
    recs = read_csv(tmp_path / "diag.csv")
    assert len(recs) == 1 and recs[0].t == 0.0


def test_fixed_rank_run_pads_state(tmp_path):
    cfg = _base(tmp_path, integrator="ps_lie", truncation="fixed", rank=3,
                substep="rk4", scheme="centered", dt=0.01, tfinal=0.05)
    assert main(["run", cfg]) == 0
    recs = read_csv(tmp_path / "diag.csv")
    assert all(r.rank == 3 for r in recs)


def test_dense_run(tmp_path):
    cfg = _base(tmp_path, integrator="dense_rk4", dt=0.01, tfinal=0.05)
    assert main(["run", cfg]) == 0
    recs = read_csv(tmp_path / "diag.csv")
    assert len(recs) == 6
    # the upwind stencils telescope: mass survives to roundoff
    assert recs[-1].mass == pytest.approx(recs[0].mass, rel=1e-12)


def test_snapshots_and_compare(tmp_path, capsys):
    snap_a = tmp_path / "snaps_a"
    cfg = _base(tmp_path, snapshot_every=2, out_snap_dir=str(snap_a))
    assert main(["run", cfg]) == 0
    names = sorted(os.listdir(snap_a))
    assert len(names) == 3  # steps 0, 2, 4
    assert names[0] == "state_00000000_t0.txt"
    assert all(re.match(r"state_\d{8}_t[0-9.eE+-]+\.txt$", n) for n in names)

    # self-comparison is exact
    assert main(["compare", str(snap_a), str(snap_a)]) == 0
    out = capsys.readouterr().out
    assert "max rel_fro=0.000000e+00" in out

    # a different run disagrees, and --tol turns that into a nonzero exit
    snap_b = tmp_path / "snaps_b"
    cfg_b = _base(tmp_path, name="runb.cfg", snapshot_every=2,
                  out_snap_dir=str(snap_b), theta="1e-2")
    assert main(["run", cfg_b]) == 0
    assert main(["compare", str(snap_a), str(snap_b), "--tol", "1e-12"]) == 1
    assert main(["compare", str(snap_a), str(snap_b), "--norm", "max",
                 "--tol", "1.0"]) == 0

    # snapshot_every without a directory is a config error
    bad = _base(tmp_path, snapshot_every=2)
    assert main(["run", bad]) == 2


def test_compare_rejects_mismatched_sets(tmp_path, capsys):
    snap = tmp_path / "s"
    cfg = _base(tmp_path, snapshot_every=2, out_snap_dir=str(snap))
    main(["run", cfg])
    empty = tmp_path / "none"
    empty.mkdir()
    assert main(["compare", str(snap), str(empty)]) == 2
    assert "no snapshot files" in capsys.readouterr().err


def test_rankscan(tmp_path):
    out = tmp_path / "scan.csv"
    cfg = _write_cfg(tmp_path, problem="free_stream", nx=16, nv=16, dt=0.05,
                     tfinal=0.5, integrator="dense_euler",
                     snapshot_every=2, out_csv=str(tmp_path / "ignored.csv"))
    assert main(["rankscan", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,rank_f,rank_E_energy"
    rows = [ln.split(",") for ln in lines[1:]]
    assert float(rows[0][0]) == 0.0
    # the pure-mode initial condition is rank 1; it splits into two
    # products under streaming; E stays identically zero -> rank 1
    assert rows[0][1] == "1"
    assert all(r[1] == "2" for r in rows[1:])
    assert all(r[2] == "1" for r in rows)


def test_pad_rank():
    p = ProblemSpec(kind="landau", alpha=0.01, k=0.5)
    grids = make_grids(p, 16, 16)
    s = initial_condition(p, grids)
    padded = _pad_rank(s, 4, seed=0)
    assert padded.rank == 4
    assert padded.orthonormality_residual() < 1e-12
    np.testing.assert_allclose(to_full(padded), to_full(s), atol=1e-14)
    # deterministic in the seed
    again = _pad_rank(s, 4, seed=0)
    np.testing.assert_array_equal(again.U, padded.U)
    with pytest.raises(ConfigError, match="exceeds requested rank"):
        _pad_rank(padded, 2, seed=0)


def test_thread_limit_env(tmp_path, monkeypatch):
    monkeypatch.setenv("KINLR_THREADS", "one")
    assert main(["run", _base(tmp_path)]) == 2
    monkeypatch.setenv("KINLR_THREADS", "1")
    assert main(["run", _base(tmp_path)]) == 0
