"""Bregman proximal-type methods over separable Legendre kernels.

Python bindings for the C++ core: kernels and divergences, the plain and
extended update mappings, stationarity measures, spurious-stationary-point
detection, and the finite-step trap experiments.
"""

from ._core import (  # noqa: F401
    ConfigError,
    ConstraintSet,
    ConstructionError,
    DegenerateReductionError,
    DimensionError,
    DomainError,
    KernelSpec,
    NonCompactError,
    PreconditionError,
    ProblemInstance,
    RangeError,
    SolverError,
    TooLargeError,
    TrapConfig,
    UnderflowError,
    UnknownInstanceError,
    UnsupportedCombinationError,
    bregman_update,
    bregman_vec,
    builtin,
    check_assumptions,
    classify,
    closed_form_eg_step,
    detect,
    extended_update,
    find_spurious_candidates,
    init_entropy_trap,
    init_poly_trap,
    make_problem,
    measure_R,
    measure_R_ext,
    random_polytope_instance,
    run,
    run_trap,
    search_trap_start,
    subdifferential_residual,
)

__version__ = "0.1.0"
