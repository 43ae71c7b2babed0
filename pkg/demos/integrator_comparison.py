"""Accuracy comparison of the fixed-rank integrators.

Advances the same padded rank-3 Landau state with Lie splitting, Strang
splitting and the fixed-rank BUG step at a sequence of step sizes, and
measures the error of each against a small-step reference computed with
the same method.  The printed orders should come out near 1, 2 and 1.
"""

import numpy as np

from kinlr import (LowRankState, ProblemSpec, SchemeConfig, efield_neutralized,
                   initial_condition, make_grids, orthonormalize, step_bug,
                   step_ps_lie, step_ps_strang, to_full)


def padded_state(p, grids):
    s0 = initial_condition(p, grids)
    x, v = grids.xg.nodes, grids.vg.nodes
    M = p.equilibrium(v)
    U = np.column_stack([s0.U[:, 0], np.cos(p.k * x), np.sin(p.k * x)])
    V = np.column_stack([s0.V[:, 0], v * M, (v**2 - 1.0) * M])
    u, ru = orthonormalize(U, grids.xg)
    w, rv = orthonormalize(V, grids.vg)
    S = np.zeros((3, 3))
    S[:1, :1] = ru[:1, :1] @ s0.S @ rv[:1, :1].T
    return LowRankState(u, S, w, grids)


def main() -> None:
    p = ProblemSpec(kind="landau", alpha=0.01, k=0.5)
    grids = make_grids(p, 32, 32)
    s0 = padded_state(p, grids)
    cfg = SchemeConfig(space_scheme="centered", substep_solver="rk4",
                       efield_fn=efield_neutralized)
    steppers = {"ps_lie": step_ps_lie, "ps_strang": step_ps_strang,
                "bug": step_bug}
    T = 0.4
    dts = np.array([4e-3, 2e-3, 1e-3])

    print(f"{'integrator':<10} " + " ".join(f"err(dt={dt:g})" for dt in dts)
          + "  order")
    for name, stepper in steppers.items():
        def advance(dt):
            s = s0
            for _ in range(int(round(T / dt))):
                s = stepper(s, dt, cfg)
            return to_full(s)

        ref = advance(1.25e-4)
        errs = [np.linalg.norm(advance(dt) - ref) / np.linalg.norm(ref)
                for dt in dts]
        order = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        print(f"{name:<10} " + " ".join(f"{e:12.3e}" for e in errs)
              + f"  {order:5.2f}")


if __name__ == "__main__":
    main()
