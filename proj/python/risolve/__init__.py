"""Solver and verification harness for rate-independent quasistatic evolutions.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from ._risolve import (  # noqa: F401
    SolverError,
    ScalarTrajectory,
    Mesh,
    FemSpace,
    ProblemSpec,
    Trajectory,
    __version__,
    check_admissibility,
    discrete_sobolev_ratio,
    energy_balance_residual,
    error_l2h1_vs_reference,
    exact_solution,
    fit_rate,
    make_space,
    pde_reference_problem,
    poincare_constant,
    problem_from_json,
    refine,
    run,
    run_scalar_global,
    run_scalar_local,
    sample_exact,
    scalar_pde_reference,
    stability_check,
    step_global,
    step_local,
    uniqueness_probe,
    unit_interval,
    unit_square,
)
