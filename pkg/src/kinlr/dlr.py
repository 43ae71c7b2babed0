"""Dynamical low-rank steppers: projector splitting and the BUG family.

All steppers share the substep building blocks k_rhs / l_rhs / s_rhs, the
Galerkin right-hand sides of the factored equations

    dK/dt = -D_x[K] A1^T + diag(E) K A2^T          (K = U S)
    dS/dt = -C1 S A1^T + C2 S A2^T
    dL/dt = -diag(v) L C1^T + D_v[L] C2^T          (L = V S^T)

with the coefficient matrices of vlasov.projected_coeffs. The electric
field is frozen at the step start (Strang refreshes it at the midpoint).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CflError
from .grid import Grid1D, PhaseGrid, diff_centered, diff_upwind
from .lowrank import LowRankState, TruncationPolicy, conservative_truncate, orthonormalize, truncate
from .vlasov import ProjectedCoeffs, efield, projected_coeffs

SCHEMES = ("centered", "upwind_characteristic")
SUBSTEP_SOLVERS = ("euler", "rk4")


@dataclass(frozen=True)
class SchemeConfig:
    """Spatial scheme, substep ODE solver and CFL guard for the steppers."""

    space_scheme: str = "centered"
    substep_solver: str = "rk4"
    cfl_guard: float = 0.9
    efield_fn: Callable = field(default=efield)

    def __post_init__(self):
        if self.space_scheme not in SCHEMES:
            raise ValueError(f"unknown space scheme {self.space_scheme!r}")
        if self.substep_solver not in SUBSTEP_SOLVERS:
            raise ValueError(f"unknown substep solver {self.substep_solver!r}")
        if not 0.0 < self.cfl_guard <= 1.0:
            raise ValueError(f"cfl_guard must lie in (0, 1], got {self.cfl_guard}")


def cfl_limit(grids: PhaseGrid, E: np.ndarray, guard: float) -> float:
    """Largest admissible dt: guard * min(dx / max|v|, dv / max|E|)."""
    vmax = np.max(np.abs(grids.vg.nodes))
    limit = grids.xg.delta / vmax
    emax = np.max(np.abs(E))
    if emax > 1e-14:
        limit = min(limit, grids.vg.delta / emax)
    return guard * limit


def check_cfl(dt: float, grids: PhaseGrid, E: np.ndarray, guard: float):
    limit = cfl_limit(grids, E, guard)
    if dt > limit:
        raise CflError(f"dt={dt:.6g} exceeds CFL guard limit {limit:.6g}")


def integrate_substep(y0: np.ndarray, rhs, dt: float, solver: str) -> np.ndarray:
    """Advance the matrix ODE y' = rhs(y) by one explicit Euler or RK4 step."""
    if solver == "euler":
        return y0 + dt * rhs(y0)
    k1 = rhs(y0)
    k2 = rhs(y0 + 0.5 * dt * k1)
    k3 = rhs(y0 + 0.5 * dt * k2)
    k4 = rhs(y0 + dt * k3)
    return y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _diff_characteristic(Y: np.ndarray, g: Grid1D, coeff: np.ndarray,
                         flip_speed: bool) -> np.ndarray:
    """Upwinded derivative contraction D[Y] coeff^T in the eigenframe of coeff.

    coeff is symmetric; its eigenmodes are transported with speed +lambda
    (flip_speed=False, K equation) or -lambda (flip_speed=True, L equation).
    Each rotated column is differenced on its own upwind side; zero-speed
    ties go to the plus side.
    """
    lam, t = np.linalg.eigh(coeff)
    yr = Y @ t
    speeds = -lam if flip_speed else lam
    dyr = np.empty_like(yr)
    plus = speeds >= 0.0
    if np.any(plus):
        dyr[:, plus] = diff_upwind(yr[:, plus], g, "plus")
    if np.any(~plus):
        dyr[:, ~plus] = diff_upwind(yr[:, ~plus], g, "minus")
    return (dyr * lam) @ t.T


def k_rhs(K: np.ndarray, co: ProjectedCoeffs, E: np.ndarray, xg: Grid1D,
          scheme: str = "centered") -> np.ndarray:
    """Right-hand side of the K equation in the frozen V basis."""
    if scheme == "centered":
        transport = diff_centered(K, xg) @ co.A1.T
    else:
        transport = _diff_characteristic(K, xg, co.A1, flip_speed=False)
    return -transport + (E[:, None] * K) @ co.A2.T


def l_rhs(L: np.ndarray, co: ProjectedCoeffs, v: np.ndarray, vg: Grid1D,
          scheme: str = "centered") -> np.ndarray:
    """Right-hand side of the L equation in the frozen U basis."""
    if scheme == "centered":
        force = diff_centered(L, vg) @ co.C2.T
    else:
        # transport speed of the C2 eigenmode lambda is -lambda here
        force = _diff_characteristic(L, vg, co.C2, flip_speed=True)
    return -(v[:, None] * L) @ co.C1.T + force


def s_rhs(S: np.ndarray, co: ProjectedCoeffs) -> np.ndarray:
    """Galerkin S equation; uses the flux-split Grams when they are present."""
    if co.split is None:
        return -co.C1 @ S @ co.A1.T + co.C2 @ S @ co.A2.T
    sp = co.split
    # force flux pairs opposite sides: +E dv f advects with speed -E
    return (
        -sp["C1p"] @ S @ sp["A1p"].T
        - sp["C1m"] @ S @ sp["A1m"].T
        + sp["C2p"] @ S @ sp["A2m"].T
        + sp["C2m"] @ S @ sp["A2p"].T
    )


def step_ps_lie(s: LowRankState, dt: float, cfg: SchemeConfig) -> LowRankState:
    """First-order Lie projector splitting: K forward, S backward, L forward."""
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    E = cfg.efield_fn(s)
    check_cfl(dt, grids, E, cfg.cfl_guard)
    scheme = cfg.space_scheme
    solver = cfg.substep_solver

    # K step
    co = projected_coeffs(s.U, s.V, E, grids)
    K = s.U @ s.S
    K = integrate_substep(K, lambda y: k_rhs(y, co, E, xg, scheme), dt, solver)
    U1, S1 = orthonormalize(K, xg)

    # S step, integrated backward in time
    co = projected_coeffs(U1, s.V, E, grids)
    S2 = integrate_substep(S1, lambda y: -s_rhs(y, co), dt, solver)

    # L step
    L = s.V @ S2.T
    L = integrate_substep(L, lambda y: l_rhs(y, co, vg.nodes, vg, scheme), dt, solver)
    V1, S3t = orthonormalize(L, vg)
    return LowRankState(U1, S3t.T, V1, grids)


def _half_ksl(s: LowRankState, E: np.ndarray, h: float,
              cfg: SchemeConfig) -> LowRankState:
    """Half sweep K -> S backward -> L with a frozen field."""
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    scheme = cfg.space_scheme
    solver = cfg.substep_solver
    co = projected_coeffs(s.U, s.V, E, grids)
    K = integrate_substep(s.U @ s.S, lambda y: k_rhs(y, co, E, xg, scheme), h, solver)
    U1, S1 = orthonormalize(K, xg)
    co = projected_coeffs(U1, s.V, E, grids)
    S2 = integrate_substep(S1, lambda y: -s_rhs(y, co), h, solver)
    L = integrate_substep(s.V @ S2.T, lambda y: l_rhs(y, co, vg.nodes, vg, scheme),
                          h, solver)
    V1, S3t = orthonormalize(L, vg)
    return LowRankState(U1, S3t.T, V1, grids)


def _half_lsk(s: LowRankState, E: np.ndarray, h: float,
              cfg: SchemeConfig) -> LowRankState:
    """Adjoint half sweep L -> S backward -> K with a frozen field."""
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    scheme = cfg.space_scheme
    solver = cfg.substep_solver
    co = projected_coeffs(s.U, s.V, E, grids)
    L = integrate_substep(s.V @ s.S.T, lambda y: l_rhs(y, co, vg.nodes, vg, scheme),
                          h, solver)
    V1, S1t = orthonormalize(L, vg)
    co = projected_coeffs(s.U, V1, E, grids)
    S2 = integrate_substep(S1t.T, lambda y: -s_rhs(y, co), h, solver)
    K = integrate_substep(s.U @ S2, lambda y: k_rhs(y, co, E, xg, scheme), h, solver)
    U1, S3 = orthonormalize(K, xg)
    return LowRankState(U1, S3, V1, grids)


def step_ps_strang(s: LowRankState, dt: float, cfg: SchemeConfig) -> LowRankState:
    """Strang projector splitting: half KSL, then the adjoint half LSK.

    The field must be frozen at its midpoint value in BOTH halves, or the
    composition loses its symmetry and the scheme drops to first order (the
    frozen field lags each half-interval midpoint by dt/4 with the same sign,
    so the defects add instead of cancelling).  A predictor half sweep with
    E(t_n) supplies the intermediate state whose field is the midpoint value.
    """
    E = cfg.efield_fn(s)
    check_cfl(dt, s.grids, E, cfg.cfl_guard)
    h = 0.5 * dt
    mid = _half_ksl(s, E, h, cfg)          # predictor, only its field is kept
    Em = cfg.efield_fn(mid)
    return _half_lsk(_half_ksl(s, Em, h, cfg), Em, h, cfg)


def step_bug(s: LowRankState, dt: float, cfg: SchemeConfig) -> LowRankState:
    """Fixed-rank BUG step: independent K/L basis updates, forward S step."""
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    E = cfg.efield_fn(s)
    check_cfl(dt, grids, E, cfg.cfl_guard)
    scheme = cfg.space_scheme
    solver = cfg.substep_solver
    split = scheme == "upwind_characteristic"

    # K and L predictors start from the same data with frozen opposite bases
    co = projected_coeffs(s.U, s.V, E, grids)
    K = integrate_substep(s.U @ s.S, lambda y: k_rhs(y, co, E, xg, scheme), dt, solver)
    L = integrate_substep(s.V @ s.S.T, lambda y: l_rhs(y, co, vg.nodes, vg, scheme),
                          dt, solver)
    Uh, _ = orthonormalize(K, xg)   # only the bases survive
    Vh, _ = orthonormalize(L, vg)

    # Galerkin S step in the new bases, forward in time
    m = xg.delta * (Uh.T @ s.U)
    n = vg.delta * (Vh.T @ s.V)
    co = projected_coeffs(Uh, Vh, E, grids, with_split=split)
    S1 = integrate_substep(m @ s.S @ n.T, lambda y: s_rhs(y, co), dt, solver)
    return LowRankState(Uh, S1, Vh, grids)


def step_bug_augmented(s: LowRankState, dt: float, cfg: SchemeConfig,
                       policy: TruncationPolicy, return_info: bool = False):
    """Rank-adaptive BUG step: augment bases to width 2r, S step, truncate."""
    grids = s.grids
    xg, vg = grids.xg, grids.vg
    E = cfg.efield_fn(s)
    check_cfl(dt, grids, E, cfg.cfl_guard)
    scheme = cfg.space_scheme
    solver = cfg.substep_solver
    split = scheme == "upwind_characteristic"

    co = projected_coeffs(s.U, s.V, E, grids)
    K = integrate_substep(s.U @ s.S, lambda y: k_rhs(y, co, E, xg, scheme), dt, solver)
    L = integrate_substep(s.V @ s.S.T, lambda y: l_rhs(y, co, vg.nodes, vg, scheme),
                          dt, solver)

    # augmentation: old bases are kept alongside the predicted ones
    Uh, _ = orthonormalize(np.hstack([K, s.U]), xg)
    Vh, _ = orthonormalize(np.hstack([L, s.V]), vg)

    m = xg.delta * (Uh.T @ s.U)
    n = vg.delta * (Vh.T @ s.V)
    co = projected_coeffs(Uh, Vh, E, grids, with_split=split)
    S1 = integrate_substep(m @ s.S @ n.T, lambda y: s_rhs(y, co), dt, solver)
    wide = LowRankState(Uh, S1, Vh, grids)

    if policy.mode == "conservative":
        out = conservative_truncate(wide, policy)
    else:
        out = truncate(wide, policy)
    if not return_info:
        return out
    sv_pre = np.linalg.svd(S1, compute_uv=False)
    return out, {"sv_pre": sv_pre, "rank": out.rank}
