import numpy as np
import numpy.testing as npt
import pytest

from kinlr.io import format_matrix, read_state, read_state_raw, write_state
from kinlr.lowrank import LowRankState, orthonormalize
from kinlr.vlasov import ProblemSpec, initial_condition, make_grids


def _state(seed=3):
    p = ProblemSpec(kind="landau", alpha=0.01, k=0.5)
    grids = make_grids(p, 16, 24)
    rng = np.random.default_rng(seed)
    u, _ = orthonormalize(rng.standard_normal((16, 3)), grids.xg)
    v, _ = orthonormalize(rng.standard_normal((24, 3)), grids.vg)
    return LowRankState(u, np.diag([1.0, 0.1, 1e-7]), v, grids), grids


def test_format_matrix():
    out = format_matrix(np.array([[1.0, 0.5], [-2.0, 1e-17]]))
    lines = out.splitlines()
    assert lines[0] == "2 2"
    assert lines[1].split() == ["1", "0.5"]
    # a 1-d vector formats as a single row
    out = format_matrix(np.array([0.1, 0.2, 0.3]))
    assert out.splitlines()[0] == "1 3"


def test_state_roundtrip_is_lossless(tmp_path):
    s, grids = _state()
    path = tmp_path / "snap.txt"
    write_state(path, s)

    head = path.read_text().splitlines()[0]
    assert head == "kinlr-lrstate v1 16 24 3"

    nx, nv, u, core, v = read_state_raw(path)
    assert (nx, nv) == (16, 24)
    npt.assert_array_equal(u, s.U)
    npt.assert_array_equal(core, s.S)
    npt.assert_array_equal(v, s.V)

    back = read_state(path, grids)
    npt.assert_array_equal(back.U, s.U)
    assert back.rank == 3


def test_read_state_errors(tmp_path):
    s, grids = _state()
    path = tmp_path / "snap.txt"
    write_state(path, s)

    other = make_grids(ProblemSpec(kind="landau", k=0.5), 32, 24)
    with pytest.raises(ValueError, match="snapshot is 16x24"):
        read_state(path, other)

    bad = tmp_path / "bad.txt"
    bad.write_text("")
    with pytest.raises(ValueError, match="empty snapshot"):
        read_state_raw(bad)

    bad.write_text("some-other-format v1 4 4 1\n")
    with pytest.raises(ValueError, match="bad header"):
        read_state_raw(bad)

    # truncated matrix block
    lines = path.read_text().splitlines()
    bad.write_text("\n".join(lines[:5]) + "\n")
    with pytest.raises(ValueError, match="extends past end"):
        read_state_raw(bad)

    # wrong entry count inside a row
    lines2 = list(lines)
    lines2[2] = "1.0 2.0"
    bad.write_text("\n".join(lines2) + "\n")
    with pytest.raises(ValueError, match="expected 3 entries"):
        read_state_raw(bad)

    # header promises a different rank than the blocks deliver
    lines3 = list(lines)
    lines3[0] = "kinlr-lrstate v1 16 24 2"
    bad.write_text("\n".join(lines3) + "\n")
    with pytest.raises(ValueError, match="disagree with header"):
        read_state_raw(bad)

    # missing blank separator between blocks
    lines4 = [ln for ln in lines if ln != ""]
    bad.write_text("\n".join(lines4) + "\n")
    with pytest.raises(ValueError, match="expected blank separator"):
        read_state_raw(bad)


def test_exact_double_precision_roundtrip(tmp_path):
    s, grids = _state()
    # adversarial values: many digits, denormals-adjacent, negatives
    rng = np.random.default_rng(99)
    core = rng.standard_normal((3, 3)) * np.array([1e17, 1.0, 1e-13])
    s = LowRankState(s.U, core, s.V, grids)
    path = tmp_path / "snap.txt"
    write_state(path, s)
    _, _, _, got, _ = read_state_raw(path)
    npt.assert_array_equal(got, core)
