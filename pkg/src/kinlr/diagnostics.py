"""Scalar run diagnostics and their CSV on-disk form.

CSV contract: header "t,mass,momentum,e_kin,e_ele,e_tot,rank,sv0,...,sv{K-1}"
where K is the maximum rank among the records; rows carry 17-significant-
digit decimals and rows of lower rank leave the excess sv fields empty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PhaseGrid
from .lowrank import LowRankState, moments
from .vlasov import efield


@dataclass(frozen=True)
class DiagRecord:
    t: float
    mass: float
    momentum: float
    e_kin: float
    e_ele: float
    e_tot: float
    rank: int
    sv: tuple

    @property
    def fields(self):
        return (self.t, self.mass, self.momentum, self.e_kin, self.e_ele,
                self.e_tot)


def observe(s: LowRankState, t: float, efield_fn=efield) -> DiagRecord:
    """Conserved quantities, electric energy and the singular value set."""
    mass, momentum, e_kin = moments(s)
    E = efield_fn(s)
    e_ele = 0.5 * s.grids.xg.delta * float(np.dot(E, E))
    sv = np.linalg.svd(s.S, compute_uv=False)
    return DiagRecord(t, mass, momentum, e_kin, e_ele, e_kin + e_ele,
                      len(sv), tuple(float(x) for x in sv))


def observe_dense(F: np.ndarray, grids: PhaseGrid, t: float,
                  E: np.ndarray) -> DiagRecord:
    """Dense-state counterpart; sv are the weighted singular values of F."""
    xg, vg = grids.xg, grids.vg
    v = vg.nodes
    cell = xg.delta * vg.delta
    mass = cell * float(np.sum(F))
    momentum = cell * float(np.sum(F * v[None, :]))
    e_kin = 0.5 * cell * float(np.sum(F * (v * v)[None, :]))
    e_ele = 0.5 * xg.delta * float(np.dot(E, E))
    sv = np.linalg.svd(np.sqrt(xg.delta * vg.delta) * F, compute_uv=False)
    rank = max(int(np.sum(sv > 1e-13 * sv[0])), 1) if sv[0] > 0.0 else 1
    return DiagRecord(t, mass, momentum, e_kin, e_ele, e_kin + e_ele,
                      rank, tuple(float(x) for x in sv))


def write_csv(records, path):
    if not records:
        raise ValueError("no records to write")
    kmax = max(len(rec.sv) for rec in records)
    header = "t,mass,momentum,e_kin,e_ele,e_tot,rank," + ",".join(
        f"sv{j}" for j in range(kmax)
    )
    lines = [header]
    for rec in records:
        cols = [f"{x:.17g}" for x in rec.fields]
        cols.append(str(rec.rank))
        cols += [f"{x:.17g}" for x in rec.sv]
        cols += [""] * (kmax - len(rec.sv))
        lines.append(",".join(cols))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty diagnostics file")
    cols = lines[0].split(",")
    fixed = ["t", "mass", "momentum", "e_kin", "e_ele", "e_tot", "rank"]
    if cols[: len(fixed)] != fixed or any(
        c != f"sv{j}" for j, c in enumerate(cols[len(fixed):])
    ):
        raise ValueError(f"{path}: line 1: unexpected header {lines[0]!r}")
    kmax = len(cols) - len(fixed)
    records = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(cols):
            raise ValueError(f"{path}: line {i}: expected {len(cols)} fields")
        vals = [float(p) for p in parts[:6]]
        rank = int(parts[6])
        sv = tuple(float(p) for p in parts[7 : 7 + kmax] if p != "")
        records.append(DiagRecord(*vals, rank, sv))
    return records
