"""Factored low-rank states on phase-space grids and their compression ops.

A state f(x_k, v_l) ~ U S V^T carries factors that are orthonormal with
respect to the rectangle-rule inner products, i.e. U^T (dx U) = I and
V^T (dv V) = I. All rounding/truncation below works in that weighted
geometry by scaling columns with sqrt(delta) so that plain QR/SVD kernels
apply unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ResourceError
from .grid import Grid1D, PhaseGrid

# Hard cap on dense materialization (number of entries of the full matrix).
DENSE_CAP = 2**24

# Relative threshold below which a QR diagonal counts as rank-deficient.
_QR_DEFICIENT_RTOL = 1e-13

# Floor applied to the Maxwellian weight of the conservative truncation.
_WEIGHT_FLOOR = 1e-16


@dataclass(frozen=True)
class TruncationPolicy:
    """How to choose the retained rank when compressing.

    mode="fixed_rank" keeps exactly `rank` (bounded by what is available),
    mode="tolerance" keeps the smallest r' whose discarded singular values
    satisfy sum(sigma_j^2, j > r') <= theta^2 (exact ties are discarded),
    mode="conservative" applies the tolerance rule to the moment-free
    remainder only (see conservative_truncate). r_max, if set, caps the
    retained rank in every mode; the rank never drops below 1.
    """

    mode: str
    rank: int | None = None
    theta: float | None = None
    r_max: int | None = None

    def __post_init__(self):
        if self.mode not in ("fixed_rank", "tolerance", "conservative"):
            raise ValueError(f"unknown truncation mode {self.mode!r}")
        if self.mode == "fixed_rank":
            if self.rank is None or self.rank < 1:
                raise ValueError("fixed_rank mode needs rank >= 1")
        else:
            if self.theta is None or self.theta < 0.0:
                raise ValueError(f"{self.mode} mode needs theta >= 0")
        if self.r_max is not None and self.r_max < 1:
            raise ValueError("r_max must be >= 1")


@dataclass(frozen=True)
class LowRankState:
    """Weighted-orthonormal factorization U S V^T of a phase-space density."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    grids: PhaseGrid

    def __post_init__(self):
        nx, nv = self.grids.shape
        r = self.S.shape[0]
        if self.U.shape != (nx, r) or self.S.shape != (r, r) or self.V.shape != (nv, r):
            raise ValueError(
                f"inconsistent factor shapes U{self.U.shape} S{self.S.shape} "
                f"V{self.V.shape} on {nx}x{nv} grids"
            )

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def orthonormality_residual(self) -> float:
        """max-norm deviation of U^T (dx U) and V^T (dv V) from the identity."""
        gu = self.grids.xg.delta * (self.U.T @ self.U)
        gv = self.grids.vg.delta * (self.V.T @ self.V)
        r = self.rank
        eye = np.eye(r)
        return max(np.max(np.abs(gu - eye)), np.max(np.abs(gv - eye)))


@dataclass(frozen=True)
class FactoredSum:
    """Sum of factored terms kept as concatenated factors and a block core.

    Represents sum_t U_t S_t V_t^T as U_cat S_blk V_cat^T where U_cat/V_cat
    stack the term factors column-wise and S_blk is block diagonal. The
    columns need not be orthonormal; round_sum restores that.
    """

    U_cat: np.ndarray
    S_blk: np.ndarray
    V_cat: np.ndarray
    grids: PhaseGrid

    @property
    def width(self) -> int:
        return self.S_blk.shape[0]

    @classmethod
    def from_terms(cls, terms, grids: PhaseGrid) -> "FactoredSum":
        """Build from a list of (U, S, V) triples; S blocks may be rectangular."""
        if not terms:
            raise ValueError("FactoredSum needs at least one term")
        us, ss, vs = zip(*terms)
        mu = sum(u.shape[1] for u in us)
        mv = sum(v.shape[1] for v in vs)
        s_blk = np.zeros((mu, mv))
        iu = iv = 0
        for u, s, v in terms:
            s_blk[iu : iu + u.shape[1], iv : iv + v.shape[1]] = s
            iu += u.shape[1]
            iv += v.shape[1]
        return cls(np.hstack(us), s_blk, np.hstack(vs), grids)

    @classmethod
    def from_state(cls, s: LowRankState) -> "FactoredSum":
        return cls(s.U, s.S, s.V, s.grids)


def orthonormalize(A: np.ndarray, g: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    """Weighted QR: A = Q R with Q^T (delta Q) = I and R upper triangular.

    Rank-deficient input is completed: columns that are (numerically, below
    1e-13 relative) dependent on their predecessors get replacement
    directions orthogonal to the whole column span, and their R rows are
    zero, so A = Q R still holds exactly.
    """
    n, m = A.shape
    if n != g.n:
        raise ValueError(f"factor has {n} rows, grid has n={g.n}")
    if m > n:
        raise ValueError(f"cannot orthonormalize {m} columns in dimension {n}")
    scale = np.sqrt(g.delta)
    b = scale * A
    tiny = _QR_DEFICIENT_RTOL * max(np.linalg.norm(b), 1e-300)
    q = np.zeros((n, m))
    r = np.zeros((m, m))
    deficient = []
    for j in range(m):
        w = b[:, j].copy()
        # Gram-Schmidt with one reorthogonalization pass
        for _ in range(2):
            proj = q[:, :j].T @ w
            r[:j, j] += proj
            w -= q[:, :j] @ proj
        nrm = np.linalg.norm(w)
        if nrm <= tiny:
            deficient.append(j)
        else:
            q[:, j] = w / nrm
            r[j, j] = nrm
    for j in deficient:
        # complete with a canonical direction outside the column span;
        # the corresponding R row stays zero
        for i in range(n):
            w = np.zeros(n)
            w[i] = 1.0
            for _ in range(2):
                w -= q @ (q.T @ w)
            nrm = np.linalg.norm(w)
            if nrm > 0.5:
                q[:, j] = w / nrm
                break
    return q / scale, r


def _wqr(A: np.ndarray, g: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    # sqrt-weight scaling turns the delta-weighted QR into a plain one;
    # no deficiency handling here -- rounding relies on A = Q R exactly,
    # and the core SVD deals with dependent columns by itself
    scale = np.sqrt(g.delta)
    qh, r = np.linalg.qr(scale * A, mode="reduced")
    return qh / scale, r


def round_sum(fs: FactoredSum, policy: TruncationPolicy) -> LowRankState:
    """Recompress a FactoredSum into an orthonormal LowRankState.

    Two weighted QRs reduce the problem to an SVD of the small core
    Rx S_blk Rv^T, whose singular values are the weighted singular values of
    the assembled matrix; the policy then picks the retained rank.
    """
    qx, rx = _wqr(fs.U_cat, fs.grids.xg)
    qv, rv = _wqr(fs.V_cat, fs.grids.vg)
    core = rx @ fs.S_blk @ rv.T
    p, sv, qt = np.linalg.svd(core, full_matrices=False)
    k = _kept_rank(sv, policy)
    u = qx @ p[:, :k]
    v = qv @ qt[:k, :].T
    return LowRankState(u, np.diag(sv[:k]), v, fs.grids)


def truncate(s: LowRankState, policy: TruncationPolicy) -> LowRankState:
    """Optimal (Eckart-Young) truncation of an already-orthonormal state."""
    p, sv, qt = np.linalg.svd(s.S)
    k = _kept_rank(sv, policy)
    return LowRankState(s.U @ p[:, :k], np.diag(sv[:k]), s.V @ qt[:k, :].T, s.grids)


def conservative_truncate(s: LowRankState, policy: TruncationPolicy) -> LowRankState:
    """Truncate while preserving the discrete moments 0, 1 and 2 exactly.

    The v-factors are split against span{w, v w, v^2 w} (w a floored
    Maxwellian) using the 1/w-weighted inner product; that subspace carries
    all of the state's mass/momentum/kinetic-energy content, and the
    remainder has identically vanishing moments. Only the remainder is
    truncated, so the moments survive to roundoff.
    """
    vg = s.grids.vg
    v = vg.nodes
    w = np.maximum(np.exp(-0.5 * v * v), _WEIGHT_FLOOR)
    t_raw = np.column_stack([w, v * w, v * v * w])
    # <a,b>_{1/w} = dv sum a b / w reduces to the plain weighted product of a/sqrt(w)
    sqw = np.sqrt(w)
    qb, _ = _wqr(t_raw / sqw[:, None], vg)
    t = qb * sqw[:, None]
    # coefficients of each V column against the orthonormal triple
    coef = vg.delta * ((t / w[:, None]).T @ s.V)
    v_rem = s.V - t @ coef
    cons_term = (s.U, s.S @ coef.T, t)

    # truncate the moment-free remainder alone; it may vanish entirely.
    # r_max caps the TOTAL output rank, so the remainder budget shrinks by
    # the width of the conserved block
    rem_policy = policy
    if policy.r_max is not None:
        rem_policy = replace(policy, r_max=max(policy.r_max - t.shape[1], 0))
    qx, rx = _wqr(s.U, s.grids.xg)
    qv, rv = _wqr(v_rem, vg)
    p, sv, qt = np.linalg.svd(rx @ s.S @ rv.T, full_matrices=False)
    k = _kept_rank(sv, rem_policy, floor=0)
    terms = [cons_term]
    if k > 0:
        terms.append((qx @ p[:, :k], np.diag(sv[:k]), qv @ qt[:k, :].T))

    exact = TruncationPolicy(mode="tolerance", theta=0.0)
    return round_sum(FactoredSum.from_terms(terms, s.grids), exact)


def _kept_rank(sv: np.ndarray, policy: TruncationPolicy, floor: int = 1) -> int:
    m = len(sv)
    if policy.mode == "fixed_rank":
        k = min(policy.rank, m)
    else:
        # smallest r' with sum of discarded sigma^2 <= theta^2; ties discarded
        tail = np.concatenate([np.cumsum((sv * sv)[::-1])[::-1], [0.0]])
        k = int(np.searchsorted(-tail, -policy.theta**2))
    if policy.r_max is not None:
        k = min(k, policy.r_max)
    return max(k, min(floor, m))


def to_full(s: LowRankState) -> np.ndarray:
    """Materialize the dense matrix; refuses above the DENSE_CAP entry count."""
    nx, nv = s.grids.shape
    if nx * nv > DENSE_CAP:
        raise ResourceError(f"dense {nx}x{nv} matrix exceeds cap of {DENSE_CAP} entries")
    return s.U @ s.S @ s.V.T

def from_full(F: np.ndarray, grids: PhaseGrid, policy: TruncationPolicy) -> LowRankState:
    """Weighted SVD of a dense matrix, truncated per policy."""
    nx, nv = grids.shape
    if F.shape != (nx, nv):
        raise ValueError(f"matrix shape {F.shape} does not match grids {nx}x{nv}")
    su = np.sqrt(grids.xg.delta)
    sw = np.sqrt(grids.vg.delta)
    p, sv, qt = np.linalg.svd(su * sw * F)
    k = _kept_rank(sv, policy)
    return LowRankState(p[:, :k] / su, np.diag(sv[:k]), qt[:k, :].T / sw, grids)


def moments(s: LowRankState) -> tuple[float, float, float]:
    """Discrete (mass, momentum, kinetic energy), all via factored contractions."""
    xg, vg = s.grids.xg, s.grids.vg
    ux = xg.delta * np.sum(s.U, axis=0)
    v = vg.nodes
    m0 = vg.delta * np.sum(s.V, axis=0)
    m1 = vg.delta * (v @ s.V)
    m2 = vg.delta * ((v * v) @ s.V)
    mass = float(ux @ s.S @ m0)
    momentum = float(ux @ s.S @ m1)
    e_kin = 0.5 * float(ux @ s.S @ m2)
    return mass, momentum, e_kin
