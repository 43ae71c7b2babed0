import numpy as np
import numpy.testing as npt
import pytest

from kinlr.errors import ResourceError
from kinlr.grid import solve_efield
from kinlr.lowrank import to_full
from kinlr.reference import dense_efield, dense_rhs, rank_profile, run_dense
from kinlr.vlasov import ProblemSpec, initial_condition, make_grids, maxwellian


def _exact_free_stream(p, grids, t):
    X = grids.xg.nodes[:, None]
    V = grids.vg.nodes[None, :]
    return p.alpha * np.cos(p.k * (X - V * t)) * maxwellian(grids.vg.nodes)[None, :]


def test_dense_efield():
    p = ProblemSpec(kind="landau", alpha=0.05, k=0.5)
    grids = make_grids(p, 64, 64)
    F = to_full(initial_condition(p, grids))
    rho = 1.0 - grids.vg.delta * np.sum(F, axis=1)
    npt.assert_allclose(dense_efield(F, grids),
                        solve_efield(rho - rho.mean(), grids.xg), atol=1e-15)
    npt.assert_array_equal(dense_efield(F, grids, free_stream=True), np.zeros(64))


def test_dense_rhs_centered_on_exact_mode():
    # free streaming: df/dt = -v df/dx; for f = a cos(k(x - vt)) M the exact
    # spatial derivative is analytic, and the centered stencil converges at
    # second order to it
    p = ProblemSpec(kind="free_stream", alpha=1.0, k=0.5)
    errs = []
    for nx in (32, 64, 128):
        grids = make_grids(p, nx, 64)
        F = _exact_free_stream(p, grids, 0.7)
        X = grids.xg.nodes[:, None]
        V = grids.vg.nodes[None, :]
        exact = (p.alpha * p.k * np.sin(p.k * (X - V * 0.7)) * V
                 * maxwellian(grids.vg.nodes)[None, :])
        got = dense_rhs(F, np.zeros(nx), grids, "centered")
        errs.append(np.max(np.abs(got - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.15)

    with pytest.raises(ValueError, match="unknown scheme"):
        dense_rhs(F, np.zeros(nx), grids, "spectral")


def test_run_dense_validation():
    p = ProblemSpec(kind="landau", k=0.5)
    grids = make_grids(p, 16, 16)
    F = to_full(initial_condition(p, grids))
    with pytest.raises(ValueError, match="unknown dense method"):
        run_dense(F, p, grids, 1e-3, 1, method="ab2")
    with pytest.raises(ValueError, match="does not match grids"):
        run_dense(F[:8], p, grids, 1e-3, 1)
    big = make_grids(p, 8192, 8192)
    with pytest.raises(ResourceError, match="exceeds cap"):
        run_dense(np.zeros((2, 2)), p, big, 1e-3, 1)


def test_run_dense_callback_and_immutability():
    p = ProblemSpec(kind="landau", k=0.5)
    grids = make_grids(p, 16, 16)
    F0 = to_full(initial_condition(p, grids))
    keep = F0.copy()
    seen = []
    out = run_dense(F0, p, grids, 1e-3, 4, method="euler",
                    on_step=lambda step, t, F: seen.append((step, t)))
    npt.assert_array_equal(F0, keep)  # input not clobbered
    assert seen == [(1, 1e-3), (2, 2e-3), (3, pytest.approx(3e-3)), (4, 4e-3)]
    assert out.shape == grids.shape


def test_run_dense_methods_agree_on_smooth_problem():
    # all methods approximate the same dynamics: rk4 vs rk2 vs euler vs sl
    # drift apart by no more than their truncation errors
    p = ProblemSpec(kind="landau", alpha=0.01, k=0.5)
    grids = make_grids(p, 32, 32)
    F0 = to_full(initial_condition(p, grids))
    dt, nsteps = 1e-3, 50
    ref = run_dense(F0, p, grids, dt, nsteps, method="rk4")
    scale = np.linalg.norm(ref)
    for method, tol in (("rk2", 1e-8), ("euler", 1e-4)):
        diff = np.linalg.norm(run_dense(F0, p, grids, dt, nsteps, method=method) - ref)
        assert diff / scale < tol


def test_free_streaming_follows_exact_solution():
    p = ProblemSpec(kind="free_stream", alpha=1.0, k=0.5)
    errs = []
    for nx, nv in ((32, 64), (64, 128)):
        grids = make_grids(p, nx, nv)
        F0 = _exact_free_stream(p, grids, 0.0)
        T = 0.5
        F = run_dense(F0, p, grids, 1e-3, int(T / 1e-3), method="rk4",
                      scheme="centered")
        errs.append(np.max(np.abs(F - _exact_free_stream(p, grids, T))))
    # spatial error dominates; halving both steps cuts it ~4x
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)


def test_sl_maximum_principle():
    # linear-interpolation transport cannot create new extrema when E = 0
    p = ProblemSpec(kind="free_stream", alpha=1.0, k=0.5)
    grids = make_grids(p, 32, 64)
    F = _exact_free_stream(p, grids, 0.0)
    hi, lo = F.max(), F.min()
    dt = grids.xg.delta / np.max(np.abs(grids.vg.nodes))
    F = run_dense(F, p, grids, dt, 100, method="sl")
    assert F.max() <= hi + 1e-14
    assert F.min() >= lo - 1e-14


def test_rank_profile():
    rng = np.random.default_rng(44)
    a, b = rng.standard_normal(30), rng.standard_normal(20)
    c, d = rng.standard_normal(30), rng.standard_normal(20)
    assert rank_profile(np.outer(a, b)) == 1
    F2 = np.outer(a, b) + np.outer(c, d)
    assert rank_profile(F2) == 2
    # a tiny third component disappears below the tolerance
    F3 = F2 + 1e-6 * np.outer(rng.standard_normal(30), rng.standard_normal(20))
    assert rank_profile(F3, tol=0.0) == 3
    assert rank_profile(F3, tol=1e-3, norm="fro") == 2
    assert rank_profile(F3, tol=1e-3, norm="max") == 2
    assert rank_profile(np.zeros((8, 8))) == 1
    with pytest.raises(ValueError, match="norm must be"):
        rank_profile(F2, tol=1e-3, norm="nuc")
