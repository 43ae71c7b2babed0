"""Free streaming: exact solution, measured error, and rank structure.

With the field switched off, the perturbation alpha*cos(k x) M(v) is
transported exactly to alpha*cos(k(x - v t)) M(v).  That solution is
rank 1 at t=0 and exactly rank 2 afterwards (the cosine splits into two
separable terms), which makes it a good end-to-end check: the script
advances the semi-Lagrangian splitting, compares with the formula, and
reports the rank the truncation actually keeps.
"""

import numpy as np

from kinlr import (ProblemSpec, TruncationPolicy, efield_zero, from_full,
                   initial_condition, make_grids, maxwellian, step_sl_split,
                   to_full)


def exact(p, grids, t):
    X = grids.xg.nodes[:, None]
    V = grids.vg.nodes[None, :]
    return p.alpha * np.cos(p.k * (X - V * t)) * maxwellian(grids.vg.nodes)[None, :]


def main() -> None:
    p = ProblemSpec(kind="free_stream", alpha=0.01, k=0.5)
    grids = make_grids(p, 64, 256)
    s = initial_condition(p, grids)
    policy = TruncationPolicy(mode="tolerance", theta=1e-10)
    dt = 0.02  # the linear interpolation needs |v dt| <= dx

    print(f"{'t':>5} {'rel err':>10} {'rank kept':>9} {'rank of formula':>15}")
    t = 0.0
    for _ in range(4):
        for _ in range(50):
            s = step_sl_split(s, dt, policy, efield_fn=efield_zero)
            t += dt
        F = exact(p, grids, t)
        err = np.linalg.norm(to_full(s) - F) / np.linalg.norm(F)
        rank_formula = from_full(F, grids, policy).rank
        print(f"{t:5.2f} {err:10.2e} {s.rank:9d} {rank_formula:15d}")

    print("\nthe solution is rank 2 for all t > 0; the interpolation error"
          "\nabove is the linear semi-Lagrangian transport, not the rank cut")


if __name__ == "__main__":
    main()
