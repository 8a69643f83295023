"""Adaptive integration with the monotonic RKC method.

Per step the driver picks the smallest stage count whose monotonicity
interval covers ``h * rho`` (``rho`` being the spectral radius of the
Jacobian), takes one step, and adjusts ``h`` from the local error estimate.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .stepper import StepFailure, error_norm, estimate_error, mono_step
from .tableau import get_tableau

__all__ = [
    "SolverConfig",
    "IntegrationReport",
    "RhoEstimate",
    "SolverAbort",
    "StepSizeUnderflow",
    "NonFiniteState",
    "StageLimitExceeded",
    "StageLimitError",
    "estimate_spectral_radius",
    "select_stage_count",
    "predicted_stage_count",
    "initial_step_size",
    "step_size_update",
    "integrate",
]

logger = logging.getLogger(__name__)

# least-squares fit s ~ a + b * rho**c over computed methods
FIT_A = -0.8306782178712795
FIT_B = 1.8547887825836553
FIT_C = 0.533871357807877

RHO_SAFETY = 1.2
UROUND = np.finfo(float).eps


class SolverAbort(RuntimeError):
    """Integration stopped before reaching the end point.

    ``x`` is where it stopped and ``report`` holds the counters so far.
    """

    def __init__(self, message, x, report=None):
        super().__init__(f"{message} at x={x:.6g}")
        self.x = x
        self.report = report


class StepSizeUnderflow(SolverAbort):
    pass


class NonFiniteState(SolverAbort):
    pass


class StageLimitExceeded(SolverAbort):
    pass


class StageLimitError(ValueError):
    """``h * rho`` is beyond the monotonicity interval of ``s_max`` stages."""


@dataclass
class SolverConfig:
    atol: object = 1e-6
    rtol: object = 1e-6
    h_init: Optional[float] = None
    s_max: int = 2000
    rho_period: int = 25
    safety: float = 0.8
    fac_min: float = 0.1
    fac_max: float = 10.0
    uround: float = UROUND
    use_rho_bound: bool = True
    record_steps: bool = False

    def __post_init__(self):
        if np.any(np.asarray(self.atol) <= 0) or np.any(np.asarray(self.rtol) <= 0):
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.fac_min < 1.0 < self.fac_max:
            raise ValueError("need 0 < fac_min < 1 < fac_max")
        if not 0.0 < self.safety < 1.0:
            raise ValueError("need 0 < safety < 1")
        if self.s_max < 3:
            raise ValueError("s_max must be at least 3")
        if self.rho_period < 1:
            raise ValueError("rho_period must be positive")
        if self.h_init is not None and self.h_init <= 0:
            raise ValueError("h_init must be positive")


@dataclass
class IntegrationReport:
    x_final: float
    y_final: np.ndarray
    n_f: int = 0
    n_accepted: int = 0
    n_rejected: int = 0
    n_rho: int = 0
    s_max_used: int = 0
    elapsed: float = 0.0
    # breakdown of n_f: initial evaluations, step stages, power iterations
    n_f_init: int = 0
    n_f_steps: int = 0
    n_f_rho: int = 0
    steps: list = field(default_factory=list)


class StepRecord(NamedTuple):
    x: float
    h: float
    s: int
    rho: float
    err: float
    accepted: bool


class RhoEstimate(NamedTuple):
    rho: float
    eigvec: np.ndarray
    raw: float
    n_evals: int
    converged: bool


def _fallback_direction(n):
    return np.random.default_rng(12345).standard_normal(n)


def estimate_spectral_radius(f, x, y, fy, seed=None, uround=UROUND,
                             max_iter=50, rtol=0.01, safety=RHO_SAFETY):
    """Jacobian-free nonlinear power iteration for the spectral radius of
    ``df/dy`` at ``(x, y)``.

    The iterate is kept at distance ``sqrt(uround) * |y|`` from ``y`` (or
    ``sqrt(uround)`` if ``y = 0``) so that ``f(x, v) - f(x, y)`` approximates
    a Jacobian-vector product. Iteration stops once successive estimates agree
    to ``rtol`` relative, or after ``max_iter`` evaluations.

    Returns a :class:`RhoEstimate` whose ``rho`` is the converged value
    inflated by ``safety`` and whose ``eigvec`` is the last direction, usable
    as ``seed`` next time.
    """
    y = np.asarray(y, dtype=float)
    fy = np.asarray(fy, dtype=float)
    ynrm = np.linalg.norm(y)
    dynrm = math.sqrt(uround) * (ynrm if ynrm > 0.0 else 1.0)

    direction = None if seed is None else np.asarray(seed, dtype=float)
    if direction is None or not np.linalg.norm(direction) > 0.0:
        direction = _fallback_direction(y.size).reshape(y.shape)
    v = y + direction * (dynrm / np.linalg.norm(direction))

    sigma = 0.0
    n = 0
    for it in range(max_iter):
        diff = np.asarray(f(x, v), dtype=float) - fy
        n += 1
        dfnrm = np.linalg.norm(diff)
        if not np.isfinite(dfnrm):
            raise ArithmeticError("non-finite value during spectral radius estimation")
        if dfnrm == 0.0:
            if it == 0:
                return RhoEstimate(0.0, direction, 0.0, n, True)
            # lost the direction; keep what was found
            break
        sigma_old, sigma = sigma, dfnrm / dynrm
        direction = diff / dfnrm
        if it > 0 and abs(sigma - sigma_old) <= rtol * sigma:
            return RhoEstimate(safety * sigma, direction, sigma, n, True)
        v = y + direction * dynrm
    return RhoEstimate(safety * sigma, direction, sigma, n, False)


def predicted_stage_count(z):
    """Stage count from the fitted model ``s = a + b z^c``, unrounded."""
    return FIT_A + FIT_B * z**FIT_C


def select_stage_count(z, s_max=2000):
    """Smallest ``s >= 3`` with ``rho_s >= z``.

    The fitted model gives the starting guess; it is then corrected against
    the actual tableaus. Raises :class:`StageLimitError` if even ``s_max``
    stages do not cover ``z``.
    """
    if z < 0 or not np.isfinite(z):
        raise ValueError(f"z must be finite and non-negative, got {z}")
    if z > get_tableau(s_max).rho:
        raise StageLimitError(f"z={z:.6g} exceeds rho_s for s_max={s_max}")
    s = min(max(3, int(round(predicted_stage_count(z)))), s_max)
    while get_tableau(s).rho < z:
        s += 1
    while s > 3 and get_tableau(s - 1).rho >= z:
        s -= 1
    return s


def initial_step_size(f, x0, y0, f0, x_end, rho0, atol, rtol, uround=UROUND):
    """Starting step from the stiffness bound and a curvature probe.

    ``h = min(span/10, 1/rho0)``, then an explicit Euler trial step gives a
    curvature estimate ``|f(x0 + h, y0 + h f0) - f0| / h`` (weighted RMS) and
    ``h`` is limited to ``sqrt(2 / curvature)``. Costs one evaluation of ``f``.
    """
    span = abs(x_end - x0)
    h = span / 10.0
    if rho0 * h > 1.0:
        h = 1.0 / rho0
    y0 = np.asarray(y0, dtype=float)
    f0 = np.asarray(f0, dtype=float)
    f_probe = np.asarray(f(x0 + h, y0 + h * f0), dtype=float)
    scale = atol + rtol * np.abs(y0)
    curv = float(np.sqrt(np.mean(((f_probe - f0) / scale) ** 2))) / h
    if curv > 0.0:
        h = min(h, math.sqrt(2.0 / curv))
    guard = 10.0 * uround * max(abs(x0), span)
    return max(h, guard)


def step_size_update(err_now, err_prev, h_now, h_prev, safety=0.8,
                     fac_min=0.1, fac_max=10.0):
    """Step-size factor for an order-2 method driven by an order-1 estimate.

    Without history (first step, or after a rejection) this is
    ``safety * err_now^(-1/2)``. With the previous accepted step available
    the predictive form is used::

        fac = safety * (h_now / h_prev) * err_prev^(1/2) / err_now

    The result is clamped to ``[fac_min, fac_max]``; ``err_now = 0`` maps to
    ``fac_max``.
    """
    if err_now <= 0.0:
        return fac_max
    if err_prev is None or h_prev is None or err_prev <= 0.0:
        fac = safety / math.sqrt(err_now)
    else:
        fac = safety * (h_now / h_prev) * math.sqrt(err_prev) / err_now
    return min(fac_max, max(fac_min, fac))


def integrate(f, problem, config=None):
    """Integrate ``problem`` from ``x0`` to ``x_end``.

    ``f`` is the right-hand side ``f(x, y)``; pass ``None`` to use
    ``problem.rhs``. Returns an :class:`IntegrationReport`. Integration in
    the negative direction is not supported.

    Raises
    ------
    StepSizeUnderflow, NonFiniteState, StageLimitExceeded
        Subclasses of :class:`SolverAbort`, each carrying the stop location.
    """
    config = config or SolverConfig()
    f = f or problem.rhs
    t_start = time.perf_counter()
    x0, x_end = float(problem.x0), float(problem.x_end)
    if not x_end > x0:
        raise ValueError("integration span must satisfy x_end > x0")
    atol, rtol = config.atol, config.rtol
    uround = config.uround

    x = x0
    y = np.array(problem.y0, dtype=float)
    rep = IntegrationReport(x_final=x, y_final=y)

    def abort(cls, msg):
        rep.x_final, rep.y_final = x, y
        rep.n_f = rep.n_f_init + rep.n_f_steps + rep.n_f_rho
        rep.elapsed = time.perf_counter() - t_start
        raise cls(msg, x, rep)

    fy = np.asarray(f(x, y), dtype=float)
    rep.n_f_init += 1
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(fy))):
        abort(NonFiniteState, "non-finite initial state or derivative")

    rho_bound = problem.rho_bound if config.use_rho_bound else None
    eigvec = None

    def spectral_radius():
        nonlocal eigvec
        if rho_bound is not None:
            return float(rho_bound(x, y))
        est = estimate_spectral_radius(f, x, y, fy, seed=eigvec, uround=uround)
        rep.n_rho += 1
        rep.n_f_rho += est.n_evals
        eigvec = est.eigvec
        if not est.converged:
            logger.debug("spectral radius iteration unconverged at x=%g", x)
        return est.rho

    rho = spectral_radius()
    if config.h_init is not None:
        h = config.h_init
    else:
        h = initial_step_size(f, x, y, fy, x_end, rho, atol, rtol, uround)
        rep.n_f_init += 1

    err_prev = None
    h_prev = None
    last_rejected = False
    failures = 0
    since_rho = 0
    need_rho = False
    s_cap_rho = get_tableau(config.s_max).rho

    while x < x_end:
        if need_rho:
            rho = spectral_radius()
            need_rho = False
            since_rho = 0
        elif rho_bound is not None:
            rho = float(rho_bound(x, y))

        # stability limit of the largest allowed method
        if h * rho > s_cap_rho:
            h = s_cap_rho / rho * (1.0 - 1e-12)
        if h < 10.0 * uround * max(abs(x), 1.0):
            if rho > 0 and s_cap_rho / rho < 10.0 * uround * max(abs(x), 1.0):
                abort(StageLimitExceeded, f"s_max={config.s_max} insufficient")
            if failures:
                abort(NonFiniteState, "non-finite stages persist as h shrinks")
            abort(StepSizeUnderflow, f"step size {h:.3e} underflow")
        if 1.1 * h >= x_end - x:
            h = x_end - x
            last = True
        else:
            last = False

        s = select_stage_count(h * rho, config.s_max)
        tab = get_tableau(s)
        try:
            # overflow in a failing step is reported through StepFailure
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                out = mono_step(f, x, y, fy, h, tab)
            rep.n_f_steps += out.f_evals
        except StepFailure as exc:
            rep.n_f_steps += exc.f_evals
            rep.n_rejected += 1
            failures += 1
            if failures > 10:
                abort(NonFiniteState, f"repeated non-finite stage {exc.stage}")
            h *= config.fac_min
            need_rho = rho_bound is None
            last_rejected = True
            continue
        failures = 0

        err = error_norm(estimate_error(y, out.y1, out.f1, h), y, out.y1, atol, rtol)
        accepted = err <= 1.0
        if config.record_steps:
            rep.steps.append(StepRecord(x, h, s, rho, err, accepted))

        if accepted:
            x = x_end if last else x + h
            y, fy = out.y1, out.f1
            rep.n_accepted += 1
            rep.s_max_used = max(rep.s_max_used, s)
            since_rho += 1
            fac = step_size_update(err, err_prev, h, h_prev, config.safety,
                                   config.fac_min, config.fac_max)
            if last_rejected:
                fac = min(fac, 1.0)
            err_prev, h_prev = err, h
            last_rejected = False
            h *= fac
            if rho_bound is None and since_rho >= config.rho_period:
                need_rho = True
        else:
            rep.n_rejected += 1
            fac = step_size_update(err, None, h, None, config.safety,
                                   config.fac_min, config.fac_max)
            h *= fac
            last_rejected = True
            if err > 10.0 and rho_bound is None:
                need_rho = True

    rep.x_final, rep.y_final = x, y
    rep.n_f = rep.n_f_init + rep.n_f_steps + rep.n_f_rho
    rep.elapsed = time.perf_counter() - t_start
    return rep
