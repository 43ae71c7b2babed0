"""Command-line front end: `kinlr run|compare|rankscan`.

Runs are described by flat `key = value` config files (one key per line,
`#` comments allowed). Unknown keys are hard errors; the full key set is
documented in the README. KINLR_THREADS, if set, caps the linear-algebra
thread pools so identical configs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import re
import sys

import numpy as np

from . import io as kio
from .diagnostics import observe, observe_dense, write_csv
from .dlr import SchemeConfig, step_bug, step_bug_augmented, step_ps_lie, step_ps_strang
from .errors import CflError, ConfigError, KinlrError
from .lowrank import LowRankState, TruncationPolicy, from_full, orthonormalize, to_full
from .reference import dense_efield, rank_profile, run_dense
from .sat import step_sat_euler, step_sat_rk, step_sl_split
from .vlasov import (ProblemSpec, efield_neutralized, efield_zero, initial_condition,
                     make_grids)

_KEY_TYPES = {
    "problem": str,
    "alpha": float,
    "k": float,
    "periods": int,
    "nx": int,
    "nv": int,
    "vmax": float,
    "dt": float,
    "tfinal": float,
    "integrator": str,
    "rank": int,
    "truncation": str,
    "theta": float,
    "r_max": int,
    "scheme": str,
    "substep": str,
    "snapshot_every": int,
    "out_csv": str,
    "out_snap_dir": str,
    "seed": int,
}

_INTEGRATORS = (
    "ps_lie", "ps_strang", "bug", "bug_aug",
    "sat_euler", "sat_rk2", "sat_rk4", "sl",
    "dense_euler", "dense_rk4", "dense_sl",
)
_FIXED_RANK_INTEGRATORS = ("ps_lie", "ps_strang", "bug")
_SCHEMES = {"upwind": "upwind_characteristic", "centered": "centered"}
_SNAP_RE = re.compile(r"state_(\d+)_t(.+)\.txt$")


def parse_config(path) -> dict:
    cfg = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in cfg:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            cfg[key] = _KEY_TYPES[key](value)
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: bad value {value!r} for {key!r}"
            ) from None
    return cfg


def _require(cfg, key):
    if key not in cfg:
        raise ConfigError(f"config key {key!r} is required")
    return cfg[key]


def _build_policy(cfg, integrator) -> TruncationPolicy | None:
    trunc = cfg.get("truncation")
    if integrator.startswith("dense_"):
        return None
    if integrator in _FIXED_RANK_INTEGRATORS:
        if trunc not in (None, "fixed"):
            raise ConfigError(
                f"integrator {integrator!r} runs at fixed rank; "
                f"truncation={trunc!r} is inconsistent"
            )
        return TruncationPolicy(mode="fixed_rank", rank=_require(cfg, "rank"),
                                r_max=cfg.get("r_max"))
    if trunc is None:
        raise ConfigError(f"integrator {integrator!r} needs the truncation key")
    if trunc == "fixed":
        return TruncationPolicy(mode="fixed_rank", rank=_require(cfg, "rank"),
                                r_max=cfg.get("r_max"))
    if trunc in ("tolerance", "conservative"):
        return TruncationPolicy(mode=trunc, theta=_require(cfg, "theta"),
                                r_max=cfg.get("r_max"))
    raise ConfigError(f"unknown truncation {trunc!r}")


def _setup(cfg):
    problem = _require(cfg, "problem")
    integrator = _require(cfg, "integrator")
    if integrator not in _INTEGRATORS:
        raise ConfigError(f"unknown integrator {integrator!r}")
    scheme_key = cfg.get("scheme", "upwind")
    if scheme_key not in _SCHEMES:
        raise ConfigError(f"scheme must be upwind or centered, got {scheme_key!r}")
    substep = cfg.get("substep", "rk4")
    if substep not in ("euler", "rk4"):
        raise ConfigError(f"substep must be euler or rk4, got {substep!r}")
    alpha = cfg.get("alpha", 1.0 if problem == "free_stream" else 0.01)
    p = ProblemSpec(kind=problem, alpha=alpha, k=cfg.get("k", 0.5))
    grids = make_grids(p, cfg.get("nx", 64), cfg.get("nv", 64),
                       cfg.get("vmax"), cfg.get("periods", 1))
    dt = _require(cfg, "dt")
    tfinal = _require(cfg, "tfinal")
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if tfinal < 0.0:
        raise ConfigError(f"tfinal must be nonnegative, got {tfinal}")
    nsteps = int(round(tfinal / dt))
    if abs(nsteps * dt - tfinal) > 1e-9 * max(dt, tfinal):
        raise ConfigError(f"tfinal={tfinal} is not an integer multiple of dt={dt}")
    return p, grids, integrator, _SCHEMES[scheme_key], substep, dt, nsteps


def _pad_rank(s: LowRankState, r: int, seed: int) -> LowRankState:
    """Embed a state into rank r with seeded deterministic complement columns."""
    if s.rank == r:
        return s
    if s.rank > r:
        raise ConfigError(f"initial rank {s.rank} exceeds requested rank {r}")
    xg, vg = s.grids.xg, s.grids.vg
    rng = np.random.default_rng(seed)
    u, _ = orthonormalize(
        np.hstack([s.U, rng.standard_normal((xg.n, r - s.rank))]), xg)
    v, _ = orthonormalize(
        np.hstack([s.V, rng.standard_normal((vg.n, r - s.rank))]), vg)
    core = (xg.delta * (u.T @ s.U)) @ s.S @ (vg.delta * (v.T @ s.V)).T
    return LowRankState(u, core, v, s.grids)


def _snapshot_path(outdir, step, t):
    return os.path.join(outdir, f"state_{step:08d}_t{t:.17g}.txt")


def run_cmd(config_path) -> int:
    cfg = parse_config(config_path)
    p, grids, integrator, scheme, substep, dt, nsteps = _setup(cfg)
    policy = _build_policy(cfg, integrator)
    # long runs use the mean-neutralized closure: identical field, but the
    # zero-mode guard does not trip on integrator mass drift
    field = efield_zero if p.kind == "free_stream" else efield_neutralized
    snap_every = cfg.get("snapshot_every", 0)
    snap_dir = cfg.get("out_snap_dir")
    if snap_every > 0 and snap_dir is None:
        raise ConfigError("snapshot_every > 0 needs out_snap_dir")
    if snap_dir is not None:
        os.makedirs(snap_dir, exist_ok=True)
    out_csv = cfg.get("out_csv", "diagnostics.csv")
    exact = TruncationPolicy(mode="tolerance", theta=0.0)

    records = []
    state0 = initial_condition(p, grids)

    if integrator.startswith("dense_"):
        F = to_full(state0)
        free = p.kind == "free_stream"

        def snap_dense(step, t, G):
            records.append(observe_dense(G, grids, t, dense_efield(G, grids, free)))
            if snap_dir is not None and snap_every > 0 and step % snap_every == 0:
                kio.write_state(_snapshot_path(snap_dir, step, t),
                                from_full(G, grids, exact))

        snap_dense(0, 0.0, F)
        run_dense(F, p, grids, dt, nsteps, method=integrator[len("dense_"):],
                  scheme=scheme, on_step=snap_dense)
        write_csv(records, out_csv)
        return 0

    cfg_scheme = SchemeConfig(space_scheme=scheme, substep_solver=substep,
                              efield_fn=field)
    state = state0
    if integrator in _FIXED_RANK_INTEGRATORS:
        state = _pad_rank(state, _require(cfg, "rank"), cfg.get("seed", 0))

    def stepper(s):
        if integrator == "ps_lie":
            return step_ps_lie(s, dt, cfg_scheme)
        if integrator == "ps_strang":
            return step_ps_strang(s, dt, cfg_scheme)
        if integrator == "bug":
            return step_bug(s, dt, cfg_scheme)
        if integrator == "bug_aug":
            return step_bug_augmented(s, dt, cfg_scheme, policy)
        if integrator == "sat_euler":
            return step_sat_euler(s, dt, policy, scheme, efield_fn=field)
        if integrator == "sat_rk2":
            return step_sat_rk(s, dt, 2, policy, scheme, efield_fn=field)
        if integrator == "sat_rk4":
            return step_sat_rk(s, dt, 4, policy, scheme, efield_fn=field)
        return step_sl_split(s, dt, policy, efield_fn=field)

    def snap(step, t, s):
        records.append(observe(s, t, efield_fn=field))
        if snap_dir is not None and snap_every > 0 and step % snap_every == 0:
            kio.write_state(_snapshot_path(snap_dir, step, t), s)

    snap(0, 0.0, state)
    for step in range(1, nsteps + 1):
        try:
            state = stepper(state)
        except CflError as e:
            raise CflError(f"step {step}: {e}") from None
        snap(step, step * dt, state)
    write_csv(records, out_csv)
    return 0


def _load_snap_dir(path):
    if os.path.isfile(path):
        entries = [(0, None, path)]
    else:
        entries = []
        for name in sorted(os.listdir(path)):
            m = _SNAP_RE.match(name)
            if m:
                entries.append((int(m.group(1)), float(m.group(2)),
                                os.path.join(path, name)))
        if not entries:
            raise KinlrError(f"{path}: no snapshot files found")
        entries.sort()
    out = []
    for step, t, fname in entries:
        nx, nv, u, s, v = kio.read_state_raw(fname)
        out.append((t, nx, nv, u @ s @ v.T))
    return out


def compare_cmd(path_a, path_b, norm="fro", tol=None) -> int:
    snaps_a = _load_snap_dir(path_a)
    snaps_b = _load_snap_dir(path_b)
    if len(snaps_a) != len(snaps_b):
        raise KinlrError(
            f"snapshot counts differ: {len(snaps_a)} vs {len(snaps_b)}")
    worst = 0.0
    for (ta, nxa, nva, A), (tb, nxb, nvb, B) in zip(snaps_a, snaps_b):
        if (nxa, nva) != (nxb, nvb):
            raise KinlrError(f"grids differ: {nxa}x{nva} vs {nxb}x{nvb}")
        if ta is not None and tb is not None and abs(ta - tb) > 1e-12:
            raise KinlrError(f"snapshot times differ: {ta!r} vs {tb!r}")
        if norm == "fro":
            denom = max(np.linalg.norm(A), np.linalg.norm(B), 1e-300)
            diff = np.linalg.norm(A - B) / denom
        else:
            denom = max(np.max(np.abs(A)), np.max(np.abs(B)), 1e-300)
            diff = np.max(np.abs(A - B)) / denom
        worst = max(worst, diff)
        label = "" if ta is None else f"t={ta:.6g} "
        print(f"{label}rel_{norm}={diff:.6e}")
    print(f"max rel_{norm}={worst:.6e}")
    if tol is not None and worst > tol:
        return 1
    return 0


def rankscan_cmd(config_path, tol=1e-2, norm="max", out=None) -> int:
    cfg = parse_config(config_path)
    p, grids, integrator, scheme, _, dt, nsteps = _setup(cfg)
    method = integrator[len("dense_"):] if integrator.startswith("dense_") else "rk4"
    snap_every = cfg.get("snapshot_every", 1) or 1
    out = out or cfg.get("out_csv", "rankscan.csv")
    free = p.kind == "free_stream"
    F0 = to_full(initial_condition(p, grids))
    ee_history = []
    rows = []

    def scan(step, t, F):
        if step % snap_every and step != nsteps:
            return
        E = dense_efield(F, grids, free)
        ee_history.append(0.5 * E * E)
        rank_f = rank_profile(F, tol, norm)
        rank_e = rank_profile(np.column_stack(ee_history), tol, norm)
        rows.append(f"{t:.17g},{rank_f},{rank_e}")

    scan(0, 0.0, F0)
    run_dense(F0, p, grids, dt, nsteps, method=method, scheme=scheme, on_step=scan)
    with open(out, "w") as fh:
        fh.write("t,rank_f,rank_E_energy\n")
        fh.write("\n".join(rows) + "\n")
    return 0


def _thread_limit():
    raw = os.environ.get("KINLR_THREADS")
    if not raw:
        return contextlib.nullcontext()
    try:
        limit = int(raw)
    except ValueError:
        raise ConfigError(f"KINLR_THREADS must be an integer, got {raw!r}") from None
    try:
        from threadpoolctl import threadpool_limits
        return threadpool_limits(limits=limit)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(limit)
        return contextlib.nullcontext()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kinlr", description="low-rank Vlasov-Poisson solver suite")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance a problem and write diagnostics")
    p_run.add_argument("config", help="flat key=value config file")

    p_cmp = sub.add_parser("compare", help="diff two snapshot directories")
    p_cmp.add_argument("path_a")
    p_cmp.add_argument("path_b")
    p_cmp.add_argument("--norm", choices=("fro", "max"), default="fro")
    p_cmp.add_argument("--tol", type=float, default=None,
                       help="exit nonzero if any relative difference exceeds this")

    p_scan = sub.add_parser("rankscan", help="rank profile of a dense run")
    p_scan.add_argument("config")
    p_scan.add_argument("--tol", type=float, default=1e-2)
    p_scan.add_argument("--norm", choices=("fro", "max"), default="max")
    p_scan.add_argument("--out", default=None, help="output CSV (default: out_csv)")

    args = parser.parse_args(argv)
    try:
        with _thread_limit():
            if args.command == "run":
                return run_cmd(args.config)
            if args.command == "compare":
                return compare_cmd(args.path_a, args.path_b, args.norm, args.tol)
            return rankscan_cmd(args.config, args.tol, args.norm, args.out)
    except KinlrError as e:
        print(f"kinlr: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
