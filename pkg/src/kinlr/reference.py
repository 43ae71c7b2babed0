"""Dense full-grid reference solvers and rank diagnostics.

These mirror the factored steppers stencil-for-stencil on the full Nx x Nv
matrix; they exist to validate the low-rank paths and to measure how much
rank a solution actually needs.
"""

from __future__ import annotations

import numpy as np

from .errors import CflError, ResourceError
from .grid import PhaseGrid, diff_centered, diff_upwind, solve_efield
from .lowrank import DENSE_CAP
from .vlasov import ProblemSpec

METHODS = ("euler", "rk2", "rk4", "sl")


def dense_efield(F: np.ndarray, grids: PhaseGrid, free_stream: bool = False):
    if free_stream:
        return np.zeros(grids.xg.n)
    rho = 1.0 - grids.vg.delta * np.sum(F, axis=1)
    # neutralize the (roundoff-level) mean so the zero-mode guard cannot
    # trip at field nulls, where max|rho| itself drops to roundoff scale
    return solve_efield(rho - rho.mean(), grids.xg)


def dense_rhs(F: np.ndarray, E: np.ndarray, grids: PhaseGrid,
              scheme: str = "upwind_characteristic") -> np.ndarray:
    """-v dF/dx + E dF/dv with the same stencils as sat_rhs_terms."""
    xg, vg = grids.xg, grids.vg
    v = vg.nodes
    if scheme == "centered":
        out = -diff_centered(F, xg) * v[None, :]
        out += E[:, None] * diff_centered(F.T, vg).T
        return out
    if scheme != "upwind_characteristic":
        raise ValueError(f"unknown scheme {scheme!r}")
    vp, vm = np.maximum(v, 0.0), np.minimum(v, 0.0)
    ep, em = np.maximum(E, 0.0), np.minimum(E, 0.0)
    out = -diff_upwind(F, xg, "plus") * vp[None, :]
    out -= diff_upwind(F, xg, "minus") * vm[None, :]
    # force term +E dv f: speed -E, stable side opposes the sign of E
    out += ep[:, None] * diff_upwind(F.T, vg, "minus").T
    out += em[:, None] * diff_upwind(F.T, vg, "plus").T
    return out


def _sl_x_half(F, dt, grids):
    xg, vg = grids.xg, grids.vg
    nu = dt * vg.nodes / xg.delta
    if np.max(np.abs(nu)) > 1.0 + 1e-12:
        raise CflError("|dt v| exceeds dx; linear interpolation invalid")
    return (
        F * (1.0 - np.abs(nu))[None, :]
        + np.roll(F, 1, axis=0) * np.maximum(nu, 0.0)[None, :]
        + np.roll(F, -1, axis=0) * np.maximum(-nu, 0.0)[None, :]
    )


def _sl_v_half(F, dt, E, grids):
    vg = grids.vg
    mu = dt * E / vg.delta
    if np.max(np.abs(mu)) > 1.0 + 1e-12:
        raise CflError("|dt E| exceeds dv; linear interpolation invalid")
    return (
        F * (1.0 - np.abs(mu))[:, None]
        + np.roll(F, -1, axis=1) * np.maximum(mu, 0.0)[:, None]
        + np.roll(F, 1, axis=1) * np.maximum(-mu, 0.0)[:, None]
    )


def run_dense(F0: np.ndarray, p: ProblemSpec, grids: PhaseGrid, dt: float,
              nsteps: int, method: str = "rk4",
              scheme: str = "upwind_characteristic", on_step=None) -> np.ndarray:
    """Advance the dense matrix nsteps; on_step(step, t, F) is called after each.

    The field is recomputed from the current state once per Euler/SL step
    and per stage for the RK methods (between the advection halves for SL).
    """
    nx, nv = grids.shape
    if nx * nv > DENSE_CAP:
        raise ResourceError(f"dense {nx}x{nv} run exceeds cap of {DENSE_CAP} entries")
    if F0.shape != (nx, nv):
        raise ValueError(f"initial matrix {F0.shape} does not match grids {nx}x{nv}")
    if method not in METHODS:
        raise ValueError(f"unknown dense method {method!r}")
    free = p.kind == "free_stream"
    F = F0.copy()

    def rhs(G):
        return dense_rhs(G, dense_efield(G, grids, free), grids, scheme)

    for step in range(1, nsteps + 1):
        if method == "euler":
            F = F + dt * rhs(F)
        elif method == "rk2":
            F = F + dt * rhs(F + 0.5 * dt * rhs(F))
        elif method == "rk4":
            k1 = rhs(F)
            k2 = rhs(F + 0.5 * dt * k1)
            k3 = rhs(F + 0.5 * dt * k2)
            k4 = rhs(F + dt * k3)
            F = F + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            F = _sl_x_half(F, dt, grids)
            F = _sl_v_half(F, dt, dense_efield(F, grids, free), grids)
        if on_step is not None:
            on_step(step, step * dt, F)
    return F


def rank_profile(F: np.ndarray, tol: float = 0.0, norm: str = "fro") -> int:
    """Smallest rank whose best truncation reaches the normalized tolerance.

    tol=0 returns the numerical rank (singular values above 1e-13 of the
    largest); the zero matrix profiles as rank 1.
    """
    if norm not in ("fro", "max"):
        raise ValueError(f"norm must be 'fro' or 'max', got {norm!r}")
    p, sv, qt = np.linalg.svd(F, full_matrices=False)
    if sv[0] == 0.0:
        return 1
    if tol == 0.0:
        return max(int(np.sum(sv > 1e-13 * sv[0])), 1)
    if norm == "fro":
        total = np.sqrt(np.sum(sv * sv))
        tail = np.sqrt(np.concatenate([np.cumsum((sv * sv)[::-1])[::-1], [0.0]]))
        return max(int(np.searchsorted(-tail, -tol * total)), 1)
    scale = np.max(np.abs(F))
    approx = np.zeros_like(F)
    for r in range(1, len(sv) + 1):
        approx += sv[r - 1] * np.outer(p[:, r - 1], qt[r - 1])
        if np.max(np.abs(F - approx)) <= tol * scale:
            return r
    return len(sv)
