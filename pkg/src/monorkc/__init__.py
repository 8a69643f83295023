"""Second-order Runge-Kutta-Chebyshev methods with monotonic stability
polynomials: coefficient construction, stepping, and adaptive integration."""

from .chebyshev import cheb_T, cheb_T_complex, cheb_T_prime, cheb_T_second
from .driver import (
    IntegrationReport,
    NonFiniteState,
    SolverAbort,
    SolverConfig,
    StageLimitExceeded,
    StepSizeUnderflow,
    estimate_spectral_radius,
    initial_step_size,
    integrate,
    select_stage_count,
    step_size_update,
)
from .stepper import StepFailure, error_norm, estimate_error, mono_step
from .tableau import (
    MethodTableau,
    build_tableau,
    error_constant,
    eval_stability,
    eval_stability_direct,
    get_tableau,
    monotonicity_scan,
    rkc2_reference_polynomial,
    solve_w0,
    stability_region_grid,
)

__version__ = "0.1.0"
