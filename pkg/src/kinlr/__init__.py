"""Low-rank solvers for the 1d1v Vlasov-Poisson equation."""

from .errors import CflError, ConfigError, KinlrError, ResourceError, SolvabilityError
from .grid import Grid1D, PhaseGrid, diff_centered, diff_upwind, inner, shift, solve_efield
from .lowrank import (
    FactoredSum,
    LowRankState,
    TruncationPolicy,
    conservative_truncate,
    from_full,
    moments,
    orthonormalize,
    round_sum,
    to_full,
    truncate,
)
from .vlasov import (
    ProblemSpec,
    ProjectedCoeffs,
    charge_density,
    efield,
    efield_neutralized,
    efield_zero,
    initial_condition,
    make_grids,
    maxwellian,
    projected_coeffs,
)
from .dlr import (
    SchemeConfig,
    k_rhs,
    l_rhs,
    s_rhs,
    step_bug,
    step_bug_augmented,
    step_ps_lie,
    step_ps_strang,
)
from .sat import sat_rhs_terms, step_sat_euler, step_sat_rk, step_sl_split
from .reference import dense_efield, dense_rhs, rank_profile, run_dense
from .diagnostics import DiagRecord, observe, observe_dense, read_csv, write_csv

__version__ = "0.1.0"
