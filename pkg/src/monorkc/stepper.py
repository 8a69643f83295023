"""One step of the monotonic RKC scheme and its local error estimate."""

from dataclasses import dataclass

import numpy as np

__all__ = ["StepFailure", "StepOutput", "mono_step", "estimate_error", "error_norm"]


class StepFailure(ArithmeticError):
    """A stage produced non-finite values. ``stage`` is the offending index."""

    def __init__(self, stage, x, f_evals=0):
        super().__init__(f"non-finite value in stage {stage} of step at x={x}")
        self.stage = stage
        self.x = x
        self.f_evals = f_evals


@dataclass
class StepOutput:
    y1: np.ndarray
    y_embedded: np.ndarray
    f_evals: int
    f1: np.ndarray = None


def mono_step(f, x0, y0, f0, h, tab, with_estimate=True):
    """Advance ``y0`` by one step of size ``h`` with the ``tab.s``-stage method.

    Stages follow the recurrence

        Y_1 = y0 + h b_1 w1 F_0
        Y_j = (1 - mu_j - nu_j) y0 + mu_j Y_{j-1} + nu_j Y_{j-2}
              + h mu~_j (F_{j-1} - b_{j-1} F_0)

    and the result is ``y1 = (1 - g - d) y0 + g Y_s + d Y_{s-2} + h b_{s-1} F_0``
    with ``g = gamma_s / b_s`` and ``d = delta_s / b_{s-2}``. Only the two most
    recent stages are kept, plus snapshots of ``Y_{s-2}`` and ``Y_{s-1}``, so
    memory does not grow with ``s``.

    ``f0`` must equal ``f(x0, y0)``; it is not re-evaluated. When
    ``with_estimate`` is true, ``f(x0 + h, y1)`` is evaluated as well and
    returned in ``StepOutput.f1`` for the error estimate and for reuse as the
    next step's ``f0``.

    Raises
    ------
    StepFailure
        If a stage becomes non-finite.
    """
    s = tab.s
    b, mu, nu, mt, c = tab.b, tab.mu, tab.nu, tab.mu_tilde, tab.c
    y0 = np.asarray(y0, dtype=float)
    f0 = np.asarray(f0, dtype=float)

    y_prev2 = y0
    y_prev = y0 + (h * b[1] * tab.w1) * f0
    if not np.all(np.isfinite(y_prev)):
        raise StepFailure(1, x0)
    y_sm2 = y_prev if s == 3 else None
    y_sm1 = None
    nfev = 0
    for j in range(2, s + 1):
        fj = np.asarray(f(x0 + c[j - 1] * h, y_prev), dtype=float)
        nfev += 1
        y_j = ((1.0 - mu[j] - nu[j]) * y0 + mu[j] * y_prev + nu[j] * y_prev2
               + (h * mt[j]) * (fj - b[j - 1] * f0))
        if not np.all(np.isfinite(y_j)):
            raise StepFailure(j, x0, nfev)
        if j == s - 2:
            y_sm2 = y_j
        elif j == s - 1:
            y_sm1 = y_j
        y_prev2, y_prev = y_prev, y_j

    g, d = tab.final_weights
    y1 = (1.0 - g - d) * y0 + g * y_prev + d * y_sm2 + (h * b[s - 1]) * f0
    if not np.all(np.isfinite(y1)):
        raise StepFailure(s + 1, x0, nfev)
    out = StepOutput(y1=y1, y_embedded=y_sm1, f_evals=nfev)
    if with_estimate:
        out.f1 = np.asarray(f(x0 + h, y1), dtype=float)
        out.f_evals += 1
        if not np.all(np.isfinite(out.f1)):
            raise StepFailure(s + 1, x0, out.f_evals)
    return out


def estimate_error(y0, y1, f1, h):
    """Local error estimate ``(y0 - y1 + h f(x0 + h, y1)) / 10``.

    For smooth solutions this behaves like ``h^2 y'' / 20``.
    """
    return 0.1 * (np.asarray(y0) - np.asarray(y1) + h * np.asarray(f1))


def error_norm(est, y0, y1, atol, rtol):
    """Weighted RMS norm of ``est``; a step is acceptable when this is <= 1.

    Each component is scaled by ``atol + rtol * max(|y0|, |y1|)``; ``atol``
    and ``rtol`` may be scalars or per-component arrays.
    """
    est = np.asarray(est, dtype=float)
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((est / scale) ** 2)))
