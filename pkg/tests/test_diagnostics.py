import numpy as np
import numpy.testing as npt
import pytest

from kinlr.diagnostics import DiagRecord, observe, observe_dense, read_csv, write_csv
from kinlr.lowrank import LowRankState, orthonormalize, to_full
from kinlr.vlasov import (ProblemSpec, efield_neutralized, initial_condition,
                          make_grids)


def _state(r=3, seed=12):
    p = ProblemSpec(kind="landau", alpha=0.05, k=0.5)
    grids = make_grids(p, 32, 48)
    rng = np.random.default_rng(seed)
    s0 = initial_condition(p, grids)
    u, ru = orthonormalize(
        np.column_stack([s0.U[:, 0], rng.standard_normal((32, r - 1))]), grids.xg)
    v, rv = orthonormalize(
        np.column_stack([s0.V[:, 0], rng.standard_normal((48, r - 1))]), grids.vg)
    S = np.zeros((r, r))
    S[:1, :1] = ru[:1, :1] @ s0.S @ rv[:1, :1].T
    S += np.diag(np.concatenate([[0.0], np.logspace(-3, -5, r - 1)]))
    return LowRankState(u, S, v, grids)


def test_observe_matches_dense_sums():
    s = _state()
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    # random pad directions carry a little net charge, so observe through
    # the drift-tolerant field closure (what long runs record anyway)
    rec = observe(s, 1.5, efield_fn=efield_neutralized)
    F = to_full(s)
    cell = xg.delta * vg.delta
    v = vg.nodes
    assert rec.t == 1.5
    assert rec.mass == pytest.approx(cell * np.sum(F), rel=1e-12)
    assert rec.momentum == pytest.approx(cell * np.sum(F * v[None, :]), rel=1e-9)
    assert rec.e_kin == pytest.approx(0.5 * cell * np.sum(F * v[None, :] ** 2),
                                      rel=1e-12)
    E = efield_neutralized(s)
    assert rec.e_ele == pytest.approx(0.5 * xg.delta * np.sum(E * E), rel=1e-12)
    assert rec.e_tot == pytest.approx(rec.e_kin + rec.e_ele, rel=1e-14)
    assert rec.rank == s.rank == len(rec.sv)
    # singular values are the weighted singular values of the assembled state
    sv_ref = np.linalg.svd(np.sqrt(cell) * F, compute_uv=False)
    npt.assert_allclose(rec.sv, sv_ref[: s.rank], rtol=1e-10, atol=1e-14)


def test_observe_dense_agrees_with_factored():
    s = _state()
    E = efield_neutralized(s)
    a = observe(s, 0.3, efield_fn=efield_neutralized)
    b = observe_dense(to_full(s), s.grids, 0.3, E)
    assert b.mass == pytest.approx(a.mass, rel=1e-12)
    assert b.momentum == pytest.approx(a.momentum, rel=1e-9)
    assert b.e_kin == pytest.approx(a.e_kin, rel=1e-12)
    assert b.e_ele == pytest.approx(a.e_ele, rel=1e-12)
    npt.assert_allclose(b.sv[: a.rank], a.sv, rtol=1e-9, atol=1e-14)


def test_csv_roundtrip_with_ragged_ranks(tmp_path):
    recs = [
        DiagRecord(0.0, 1.0, 0.0, 0.5, 0.25, 0.75, 1, (2.0,)),
        DiagRecord(0.1, 1.0 + 1e-16, -1e-17, 0.5, 0.2, 0.7, 3,
                   (2.0, 0.37281, 1.2e-9)),
        DiagRecord(0.2, 0.99, 1e-5, 0.49, 0.21, 0.7, 2, (1.9, 0.001)),
    ]
    path = tmp_path / "diag.csv"
    write_csv(recs, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,mass,momentum,e_kin,e_ele,e_tot,rank,sv0,sv1,sv2"
    # rank-1 row pads the missing sv fields with empty strings
    assert lines[1].endswith(",,")

    back = read_csv(path)
    assert len(back) == 3
    for orig, got in zip(recs, back):
        # 17 significant digits reproduce doubles exactly
        assert got.t == orig.t
        assert got.mass == orig.mass
        assert got.momentum == orig.momentum
        assert got.e_tot == orig.e_tot
        assert got.rank == orig.rank
        assert got.sv == orig.sv


def test_csv_errors(tmp_path):
    with pytest.raises(ValueError, match="no records"):
        write_csv([], tmp_path / "x.csv")

    bad = tmp_path / "bad.csv"
    bad.write_text("time,mass\n0,1\n")
    with pytest.raises(ValueError, match="unexpected header"):
        read_csv(bad)

    bad.write_text("t,mass,momentum,e_kin,e_ele,e_tot,rank,sv0\n1,2,3\n")
    with pytest.raises(ValueError, match="line 2: expected 8 fields"):
        read_csv(bad)

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty diagnostics"):
        read_csv(empty)
