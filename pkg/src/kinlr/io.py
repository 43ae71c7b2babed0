"""Plain-text matrix and state snapshots.

A matrix block is a line "rows cols" followed by `rows` lines of
space-separated 17-significant-digit decimals (lossless for doubles).
A state snapshot is the header line "kinlr-lrstate v1 Nx Nv r" followed by
the U, S and V blocks separated by single blank lines.
"""

from __future__ import annotations

import numpy as np

from .grid import PhaseGrid
from .lowrank import LowRankState

_MAGIC = "kinlr-lrstate"
_VERSION = "v1"


def format_matrix(A: np.ndarray) -> str:
    A = np.atleast_2d(A)
    rows, cols = A.shape
    lines = [f"{rows} {cols}"]
    for row in A:
        lines.append(" ".join(f"{x:.17g}" for x in row))
    return "\n".join(lines)


def _parse_matrix(lines, start):
    """Parse one matrix block starting at line index `start` (0-based)."""
    header = lines[start].split()
    if len(header) != 2:
        raise ValueError(f"line {start + 1}: expected 'rows cols', got {lines[start]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"line {start + 1}: non-integer matrix dimensions") from None
    if rows < 0 or cols < 0 or start + 1 + rows > len(lines):
        raise ValueError(f"line {start + 1}: matrix block extends past end of file")
    data = np.empty((rows, cols))
    for i in range(rows):
        parts = lines[start + 1 + i].split()
        if len(parts) != cols:
            raise ValueError(
                f"line {start + 2 + i}: expected {cols} entries, got {len(parts)}"
            )
        data[i] = [float(p) for p in parts]
    return data, start + 1 + rows


def write_state(path, s: LowRankState):
    nx, nv = s.grids.shape
    blocks = [
        f"{_MAGIC} {_VERSION} {nx} {nv} {s.rank}",
        format_matrix(s.U),
        "",
        format_matrix(s.S),
        "",
        format_matrix(s.V),
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(blocks) + "\n")


def read_state_raw(path):
    """Read a snapshot without grid context; returns (nx, nv, U, S, V)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty snapshot file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != _MAGIC or head[1] != _VERSION:
        raise ValueError(f"{path}: line 1: bad header {lines[0]!r}")
    nx, nv, r = int(head[2]), int(head[3]), int(head[4])

    def expect_blank(pos):
        if pos >= len(lines) or lines[pos] != "":
            raise ValueError(f"{path}: line {pos + 1}: expected blank separator")

    u, pos = _parse_matrix(lines, 1)
    expect_blank(pos)
    s, pos = _parse_matrix(lines, pos + 1)
    expect_blank(pos)
    v, pos = _parse_matrix(lines, pos + 1)
    if u.shape != (nx, r) or s.shape != (r, r) or v.shape != (nv, r):
        raise ValueError(
            f"{path}: block shapes U{u.shape} S{s.shape} V{v.shape} "
            f"disagree with header {nx} {nv} {r}"
        )
    return nx, nv, u, s, v


def read_state(path, grids: PhaseGrid) -> LowRankState:
    nx, nv, u, s, v = read_state_raw(path)
    if (nx, nv) != grids.shape:
        raise ValueError(f"{path}: snapshot is {nx}x{nv}, grids are {grids.shape}")
    return LowRankState(u, s, v, grids)
