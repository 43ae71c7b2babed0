"""Step-and-truncate integrators: explicit full-operator steps on factored sums.

A step applies the discretized Vlasov right-hand side directly to the
factored representation -- every stencil/coefficient application maps a
rank-r state to a short sum of factored terms -- and then rounds the sum
back down per the truncation policy. No Galerkin projection is involved,
so with theta=0 these steps agree with the dense solver to roundoff.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .dlr import check_cfl
from .errors import CflError
from .grid import diff_centered, diff_upwind, shift
from .lowrank import (
    FactoredSum,
    LowRankState,
    TruncationPolicy,
    conservative_truncate,
    round_sum,
)
from .vlasov import efield


def _factors(obj):
    if isinstance(obj, FactoredSum):
        return obj.U_cat, obj.S_blk, obj.V_cat
    return obj.U, obj.S, obj.V


def sat_rhs_terms(state, E: np.ndarray, scheme: str = "upwind_characteristic"):
    """Discrete RHS of a factored state as a list of (U, S, V) terms.

    Upwind emits four groups (split transport and force fluxes), centered
    two. Works on LowRankState and FactoredSum alike.
    """
    u, s, v = _factors(state)
    xg, vg = state.grids.xg, state.grids.vg
    vv = vg.nodes
    if scheme == "centered":
        return [
            (diff_centered(u, xg), -s, vv[:, None] * v),
            (E[:, None] * u, s, diff_centered(v, vg)),
        ]
    if scheme != "upwind_characteristic":
        raise ValueError(f"unknown scheme {scheme!r}")
    vp, vm = np.maximum(vv, 0.0), np.minimum(vv, 0.0)
    ep, em = np.maximum(E, 0.0), np.minimum(E, 0.0)
    # +E dv f advects with characteristic speed -E, so E>0 pulls from above
    # (forward difference); mirrors the semi-Lagrangian foot v + E dt
    return [
        (diff_upwind(u, xg, "plus"), -s, vp[:, None] * v),
        (diff_upwind(u, xg, "minus"), -s, vm[:, None] * v),
        (ep[:, None] * u, s, diff_upwind(v, vg, "minus")),
        (em[:, None] * u, s, diff_upwind(v, vg, "plus")),
    ]


def _apply_policy(fs: FactoredSum, policy: TruncationPolicy) -> LowRankState:
    if policy.mode == "conservative":
        exact = TruncationPolicy(mode="tolerance", theta=0.0)
        return conservative_truncate(round_sum(fs, exact), policy)
    return round_sum(fs, policy)


def _scaled(terms, c: float):
    return [(u, c * s, v) for u, s, v in terms]


def step_sat_euler(s: LowRankState, dt: float, policy: TruncationPolicy,
                   scheme: str = "upwind_characteristic", efield_fn=efield,
                   cfl_guard: float = 0.9) -> LowRankState:
    """Forward Euler on the factored sum, then one rounding."""
    E = efield_fn(s)
    check_cfl(dt, s.grids, E, cfl_guard)
    terms = [(s.U, s.S, s.V)] + _scaled(sat_rhs_terms(s, E, scheme), dt)
    return _apply_policy(FactoredSum.from_terms(terms, s.grids), policy)


def step_sat_rk(s: LowRankState, dt: float, stages: int,
                policy: TruncationPolicy, scheme: str = "upwind_characteristic",
                truncate_stages: bool = False, efield_fn=efield,
                cfl_guard: float = 0.9) -> LowRankState:
    """Explicit RK2 (midpoint) or classical RK4 over factored sums.

    The field is refreshed from every stage state. Stage values stay exact
    factored sums unless truncate_stages is set, in which case each stage
    is rounded with the per-stage budget theta/stages.
    """
    if stages not in (2, 4):
        raise ValueError(f"stages must be 2 or 4, got {stages}")
    E = efield_fn(s)
    check_cfl(dt, s.grids, E, cfl_guard)
    grids = s.grids
    stage_policy = None
    if truncate_stages and policy.mode != "fixed_rank":
        stage_policy = replace(policy, theta=policy.theta / stages)
    elif truncate_stages:
        stage_policy = policy

    base = [(s.U, s.S, s.V)]

    def stage_state(terms):
        fs = FactoredSum.from_terms(terms, grids)
        if stage_policy is not None:
            st = _apply_policy(fs, stage_policy)
            return FactoredSum.from_state(st)
        return fs

    def rhs_of(fs):
        return sat_rhs_terms(fs, efield_fn(fs), scheme)

    k1 = rhs_of(FactoredSum.from_terms(base, grids))
    if stages == 2:
        mid = stage_state(base + _scaled(k1, 0.5 * dt))
        k2 = rhs_of(mid)
        final = base + _scaled(k2, dt)
    else:
        s2 = stage_state(base + _scaled(k1, 0.5 * dt))
        k2 = rhs_of(s2)
        s3 = stage_state(base + _scaled(k2, 0.5 * dt))
        k3 = rhs_of(s3)
        s4 = stage_state(base + _scaled(k3, dt))
        k4 = rhs_of(s4)
        final = (
            base
            + _scaled(k1, dt / 6.0)
            + _scaled(k2, dt / 3.0)
            + _scaled(k3, dt / 3.0)
            + _scaled(k4, dt / 6.0)
        )
    return _apply_policy(FactoredSum.from_terms(final, grids), policy)


def step_sl_split(s: LowRankState, dt: float, policy: TruncationPolicy,
                  efield_fn=efield) -> LowRankState:
    """Split semi-Lagrangian step with linear interpolation.

    x-advection along the backward characteristics, rounding, field refresh
    from the intermediate state, then the mirrored v-advection. Valid only
    while the foot of each characteristic stays within one cell.
    """
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    v = vg.nodes

    nu = dt * v / xg.delta
    if np.max(np.abs(nu)) > 1.0 + 1e-12:
        raise CflError(
            f"|dt v| up to {np.max(np.abs(dt * v)):.6g} exceeds dx={xg.delta:.6g}; "
            "linear interpolation invalid"
        )
    terms = [
        (s.U, s.S, (1.0 - np.abs(nu))[:, None] * s.V),
        (shift(s.U, xg, 1), s.S, np.maximum(nu, 0.0)[:, None] * s.V),
        (shift(s.U, xg, -1), s.S, np.maximum(-nu, 0.0)[:, None] * s.V),
    ]
    mid = _apply_policy(FactoredSum.from_terms(terms, grids), policy)

    E = efield_fn(mid)
    mu = dt * E / vg.delta
    if np.max(np.abs(mu)) > 1.0 + 1e-12:
        raise CflError(
            f"|dt E| up to {np.max(np.abs(dt * E)):.6g} exceeds dv={vg.delta:.6g}; "
            "linear interpolation invalid"
        )
    terms = [
        ((1.0 - np.abs(mu))[:, None] * mid.U, mid.S, mid.V),
        (np.maximum(mu, 0.0)[:, None] * mid.U, mid.S, shift(mid.V, vg, -1)),
        (np.maximum(-mu, 0.0)[:, None] * mid.U, mid.S, shift(mid.V, vg, 1)),
    ]
    return _apply_policy(FactoredSum.from_terms(terms, grids), policy)
