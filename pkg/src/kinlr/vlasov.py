"""Problem definitions and the Vlasov-Poisson coupling.

The evolution law used throughout is

    df/dt = -v df/dx + E(x) df/dv,        -phi'' = rho,  E = -phi',

with rho(x) = 1 - int f dv (neutralizing ion background). All shipped
initial conditions are exactly rank 1: a single x-profile times a single
v-profile built from the unit Maxwellian M(v) = exp(-v^2/2)/sqrt(2 pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import Grid1D, PhaseGrid, diff_centered, diff_upwind, solve_efield
from .lowrank import FactoredSum, LowRankState

KINDS = ("landau", "two_stream", "bump_on_tail", "free_stream")


def maxwellian(v: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * v * v) / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class ProblemSpec:
    """A named test problem with its perturbation parameters.

    kind : one of landau | two_stream | bump_on_tail | free_stream
    alpha : perturbation amplitude
    k : perturbation wavenumber; the x-domain must hold an integer number
        of wavelengths, Lx = 2 pi m / k
    v0 : stream speed (two_stream)
    beta, vb, sigb : bump weight, drift and width (bump_on_tail)
    """

    kind: str
    alpha: float = 0.01
    k: float = 0.5
    v0: float = 2.4
    beta: float = 0.1
    vb: float = 4.5
    sigb: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown problem kind {self.kind!r}")
        if self.k <= 0.0:
            raise ConfigError(f"wavenumber must be positive, got k={self.k}")

    def equilibrium(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "two_stream":
            return 0.5 * (maxwellian(v - self.v0) + maxwellian(v + self.v0))
        if self.kind == "bump_on_tail":
            bump = maxwellian((v - self.vb) / self.sigb) / self.sigb
            return (1.0 - self.beta) * maxwellian(v) + self.beta * bump
        return maxwellian(v)

    def default_vmax(self) -> float:
        return 10.0 if self.kind in ("two_stream", "bump_on_tail") else 8.0


def make_grids(p: ProblemSpec, nx: int, nv: int, vmax: float | None = None,
               periods: int = 1) -> PhaseGrid:
    """Phase grid holding `periods` wavelengths of p.k with symmetric v-box."""
    if periods < 1:
        raise ConfigError(f"periods must be >= 1, got {periods}")
    if vmax is None:
        vmax = p.default_vmax()
    lx = 2.0 * np.pi * periods / p.k
    return PhaseGrid(Grid1D(nx, 0.0, lx), Grid1D(nv, -vmax, vmax))


def initial_condition(p: ProblemSpec, grids: PhaseGrid) -> LowRankState:
    """Rank-1 initial state of the given problem on the given grids."""
    xg, vg = grids.xg, grids.vg
    ratio = p.k * xg.length / (2.0 * np.pi)
    if np.abs(ratio - np.round(ratio)) > 1e-9 or np.round(ratio) < 1:
        raise ConfigError(
            f"x-domain length {xg.length:.6g} is not an integer number of "
            f"wavelengths of k={p.k}"
        )
    feq = p.equilibrium(vg.nodes)
    tail = max(p.equilibrium(np.array([vg.a]))[0], p.equilibrium(np.array([vg.b]))[0])
    if tail > 1e-12:
        raise ConfigError(
            f"vmax={vg.b} too small: equilibrium tail {tail:.3e} at the boundary "
            "exceeds 1e-12"
        )
    if p.kind == "free_stream":
        # pure mode: stays exactly rank 2 under free streaming for t > 0
        xprof = p.alpha * np.cos(p.k * xg.nodes)
    else:
        xprof = 1.0 + p.alpha * np.cos(p.k * xg.nodes)
    # normalize both factors against the rectangle-rule inner products
    cu = np.linalg.norm(xprof) * np.sqrt(xg.delta)
    cv = np.linalg.norm(feq) * np.sqrt(vg.delta)
    if cu == 0.0 or cv == 0.0:
        u = np.full((xg.n, 1), 1.0 / np.sqrt(xg.length))
        v = np.full((vg.n, 1), 1.0 / np.sqrt(vg.length))
        return LowRankState(u, np.zeros((1, 1)), v, grids)
    u = (xprof / cu)[:, None]
    v = (feq / cv)[:, None]
    return LowRankState(u, np.array([[cu * cv]]), v, grids)


def charge_density(s) -> np.ndarray:
    """rho = 1 - int f dv from the factored state (LowRankState or FactoredSum)."""
    if isinstance(s, FactoredSum):
        u, core, v = s.U_cat, s.S_blk, s.V_cat
    else:
        u, core, v = s.U, s.S, s.V
    m0 = s.grids.vg.delta * np.sum(v, axis=0)
    return 1.0 - u @ (core @ m0)


def efield(s) -> np.ndarray:
    """Self-consistent electric field of the factored state."""
    return solve_efield(charge_density(s), s.grids.xg)


def efield_neutralized(s) -> np.ndarray:
    """Drift-tolerant field closure: neutralize the mean charge, then solve.

    The periodic Poisson solve discards the zero mode anyway, so this returns
    the same field as efield whenever the solvability check passes; it differs
    only in tolerating the small mean-charge drift that non-conservative
    integrators accumulate over long runs.
    """
    rho = charge_density(s)
    return solve_efield(rho - rho.mean(), s.grids.xg)


def efield_zero(s) -> np.ndarray:
    """Field closure for free-streaming runs: E identically zero."""
    return np.zeros(s.grids.xg.n)


@dataclass(frozen=True)
class ProjectedCoeffs:
    """Galerkin coefficient matrices of the current bases.

    A1 = V^T W_v diag(v) V and C2 = U^T W_x diag(E) U are symmetric;
    A2 = V^T W_v D_v V and C1 = U^T W_x D_x U use the centered difference
    and are antisymmetric up to roundoff. The optional split quartets
    (plus/minus flux parts, same definitions with v/E signs split and
    one-sided differences) feed the upwind S-step of the BUG family.
    """

    A1: np.ndarray
    A2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    split: dict | None = None


def projected_coeffs(U: np.ndarray, V: np.ndarray, E: np.ndarray,
                     grids: PhaseGrid, with_split: bool = False) -> ProjectedCoeffs:
    """Assemble the four r x r coefficient matrices (plus flux-split parts)."""
    xg, vg = grids.xg, grids.vg
    v = vg.nodes
    a1 = vg.delta * (V.T * v) @ V
    a1 = 0.5 * (a1 + a1.T)
    a2 = vg.delta * V.T @ diff_centered(V, vg)
    c1 = xg.delta * U.T @ diff_centered(U, xg)
    c2 = xg.delta * (U.T * E) @ U
    c2 = 0.5 * (c2 + c2.T)
    split = None
    if with_split:
        vp, vm = np.maximum(v, 0.0), np.minimum(v, 0.0)
        ep, em = np.maximum(E, 0.0), np.minimum(E, 0.0)
        split = {
            "A1p": vg.delta * (V.T * vp) @ V,
            "A1m": vg.delta * (V.T * vm) @ V,
            "A2p": vg.delta * V.T @ diff_upwind(V, vg, "plus"),
            "A2m": vg.delta * V.T @ diff_upwind(V, vg, "minus"),
            "C1p": xg.delta * U.T @ diff_upwind(U, xg, "plus"),
            "C1m": xg.delta * U.T @ diff_upwind(U, xg, "minus"),
            "C2p": xg.delta * (U.T * ep) @ U,
            "C2m": xg.delta * (U.T * em) @ U,
        }
    return ProjectedCoeffs(a1, a2, c1, c2, split)
