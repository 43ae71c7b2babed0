"""Uniform periodic grids and the discrete operators built on them.

Everything downstream (factored states, projected coefficient matrices,
steppers) is phrased in terms of the handful of primitives defined here:
rectangle-rule inner products, one-sided and centered periodic differences,
periodic shifts and the FFT Poisson solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolvabilityError


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [a, b) with n nodes; the right endpoint is excluded.

    Parameters
    ----------
    n : int
        Number of nodes, at least 4.
    a, b : float
        Domain endpoints, b > a.
    """

    n: int
    a: float
    b: float

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"grid needs at least 4 nodes, got n={self.n}")
        if not self.b > self.a:
            raise ValueError(f"empty domain: a={self.a}, b={self.b}")

    @property
    def delta(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.delta * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching numpy's FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.delta)


@dataclass(frozen=True)
class PhaseGrid:
    """Tensor phase-space grid: xg in space, vg in velocity (vg symmetric about 0)."""

    xg: Grid1D
    vg: Grid1D

    def __post_init__(self):
        if self.vg.a != -self.vg.b:
            raise ValueError(
                f"velocity grid must be symmetric: a={self.vg.a}, b={self.vg.b}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.xg.n, self.vg.n)


def _check_len(u: np.ndarray, g: Grid1D):
    if u.shape[0] != g.n:
        raise ValueError(f"vector length {u.shape[0]} does not match grid n={g.n}")


def inner(u: np.ndarray, w: np.ndarray, g: Grid1D) -> float:
    """Rectangle-rule inner product delta * sum(u * w)."""
    _check_len(u, g)
    _check_len(w, g)
    return g.delta * float(np.dot(u, w))


def diff_upwind(u: np.ndarray, g: Grid1D, side: str) -> np.ndarray:
    """One-sided periodic difference along axis 0.

    side="plus" is the backward difference (u_k - u_{k-1})/delta, the upwind
    stencil for positive advection speed; side="minus" is the forward
    difference (u_{k+1} - u_k)/delta.
    """
    _check_len(u, g)
    if side == "plus":
        return (u - np.roll(u, 1, axis=0)) / g.delta
    if side == "minus":
        return (np.roll(u, -1, axis=0) - u) / g.delta
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def diff_centered(u: np.ndarray, g: Grid1D) -> np.ndarray:
    """Second-order centered periodic difference (u_{k+1} - u_{k-1})/(2 delta)."""
    _check_len(u, g)
    return (np.roll(u, -1, axis=0) - np.roll(u, 1, axis=0)) / (2.0 * g.delta)


def shift(u: np.ndarray, g: Grid1D, offset: int) -> np.ndarray:
    """Periodic index shift: result_k = u_{k-offset} (offset=+1 pulls the left neighbor)."""
    _check_len(u, g)
    return np.roll(u, offset, axis=0)


def solve_efield(rho: np.ndarray, g: Grid1D) -> np.ndarray:
    """Electric field of -phi'' = rho on the periodic grid, E = -phi'.

    Solved in Fourier space: Ehat(kappa) = rhohat(kappa)/(i kappa), zero mode
    dropped. rho must have (numerically) zero mean, otherwise the periodic
    problem has no solution.
    """
    _check_len(rho, g)
    scale = np.max(np.abs(rho))
    mean = np.abs(np.mean(rho))
    if scale > 0.0 and mean > 1e-10 * scale:
        raise SolvabilityError(
            f"rho has nonzero mean {mean:.3e} (relative {mean / scale:.3e}); "
            "periodic Poisson problem unsolvable"
        )
    rho_hat = np.fft.fft(rho)
    kappa = g.wavenumbers
    e_hat = np.zeros_like(rho_hat)
    e_hat[1:] = rho_hat[1:] / (1j * kappa[1:])
    return np.real(np.fft.ifft(e_hat))
