"""Coefficients and stability analysis of the monotonic second-order
Runge-Kutta-Chebyshev family.

For ``s`` stages the method derivative ``R_s'(x)`` is a shifted, scaled
Chebyshev polynomial ``b_{s-1} (1 + T_{s-1}(w0 + w1 x))``. The shift ``w0``
is the root of a scalar equation obtained from the order conditions
``R(0) = R'(0) = R''(0) = 1``; everything else follows in closed form.

The root is sought in ``a = arccosh(w0)`` so that every ``T_k(w0)`` becomes
``cosh(k a)``. For ``s = 2000`` the shift is ``w0 - 1 ~ 3e-5`` and this keeps
the problem well conditioned in plain double precision.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from .chebyshev import (
    cheb_T,
    cheb_T_complex,
    cheb_T_prime,
    cheb_T_prime_cosh,
    cheb_T_second,
    cheb_T_second_cosh,
)

__all__ = [
    "ConvergenceError",
    "MethodTableau",
    "StabilitySample",
    "ScanReport",
    "w0_residual",
    "solve_w0",
    "solve_a",
    "build_tableau",
    "get_tableau",
    "eval_stability",
    "eval_stability_direct",
    "error_constant",
    "monotonicity_scan",
    "stability_interval",
    "stability_region_grid",
    "rkc2_reference_polynomial",
    "rkc2_error_constant",
    "RKC2_DAMPING",
]

RKC2_DAMPING = 2.0 / 13.0

_RESIDUAL_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """The coefficient equation could not be solved to tolerance."""


def _check_stages(s):
    if int(s) != s or s < 3:
        raise ValueError(f"stage count must be an integer >= 3, got {s!r}")
    return int(s)


# -- the scalar equation for w0 ------------------------------------------------

def _residual_terms(a, s):
    """Both sides of the w0 equation at ``w0 = cosh(a)``, divided by
    ``1 + T_{s-1}(w0)`` to keep them O(1)."""
    m = s - 1
    sa = math.sinh(a)
    sma = math.sinh(m * a)
    norm = 1.0 + math.cosh(m * a)
    # T_s/(2s) - T_{s-2}/(2(s-2)) rewritten with
    # cosh(s a) - cosh((s-2) a) = 2 sinh((s-1) a) sinh(a) to avoid cancellation
    lhs = (1.0 + (-1) ** s / (s * (s - 2)) + math.cosh(a)
           + sma * sa / s - math.cosh((s - 2) * a) / (s * (s - 2)))
    rhs = norm * norm * sa / (m * sma)
    return lhs / norm, rhs / norm


def w0_residual(a, s):
    """Scaled residual of the w0 equation in the ``a = arccosh(w0)`` form.

    Positive for small ``a``, negative for large ``a``; the root is ``a``.
    """
    lhs, rhs = _residual_terms(a, s)
    return lhs - rhs


def _residual_derivative(a, s):
    # d/da of (lhs - rhs) / norm, assembled from the unscaled pieces
    m = s - 1
    sa, ca = math.sinh(a), math.cosh(a)
    sma, cma = math.sinh(m * a), math.cosh(m * a)
    norm = 1.0 + cma
    dnorm = m * sma
    lhs = (1.0 + (-1) ** s / (s * (s - 2)) + ca
           + sma * sa / s - math.cosh((s - 2) * a) / (s * (s - 2)))
    dlhs = (sa + (m * cma * sa + sma * ca) / s
            - math.sinh((s - 2) * a) / s)
    # rhs / norm = norm * sa / (m * sma)
    q = norm * sa / (m * sma)
    dq = (dnorm * sa + norm * ca) / (m * sma) - q * m * cma / sma
    return (dlhs * norm - lhs * dnorm) / norm**2 - dq


def solve_a(s, maxiter=200):
    """Root ``a > 0`` of the w0 equation for ``s`` stages.

    A bracket ``[eps, 3/(s-1)]`` is expanded geometrically until the residual
    changes sign, then refined by Newton steps that fall back to bisection
    whenever an iterate would leave the bracket or stall.
    """
    s = _check_stages(s)
    lo = 1e-8
    hi = 3.0 / (s - 1)
    f_lo = w0_residual(lo, s)
    f_hi = w0_residual(hi, s)
    expansions = 0
    while f_lo * f_hi > 0:
        hi *= 2.0
        expansions += 1
        if expansions > 60 or (s - 1) * hi > 700.0:
            raise ConvergenceError(f"no sign change found for s={s}")
        f_hi = w0_residual(hi, s)
    if f_lo < 0:
        raise ConvergenceError(f"unexpected residual sign at a->0 for s={s}")

    a = 0.5 * (lo + hi)
    prev_width = hi - lo
    for _ in range(maxiter):
        f = w0_residual(a, s)
        if f == 0.0:
            return a
        if f > 0:
            lo = a
        else:
            hi = a
        df = _residual_derivative(a, s)
        step = f / df if df != 0.0 else math.inf
        a_new = a - step
        if not (lo < a_new < hi) or abs(step) > 0.5 * prev_width:
            a_new = 0.5 * (lo + hi)
            step = a - a_new
        prev_width = abs(step)
        if abs(step) <= 4.0 * np.finfo(float).eps * a_new:
            a = a_new
            break
        a = a_new
    else:
        raise ConvergenceError(f"w0 iteration did not converge for s={s}")

    res = abs(w0_residual(a, s))
    if res > _RESIDUAL_TOL:
        raise ConvergenceError(
            f"w0 residual {res:.3e} exceeds {_RESIDUAL_TOL:g} for s={s}")
    return a


def solve_w0(s):
    """Chebyshev shift ``w0 > 1`` for the ``s``-stage monotonic method."""
    return math.cosh(solve_a(s))


# -- tableau -----------------------------------------------------------------

@dataclass(frozen=True)
class MethodTableau:
    """All coefficients of the ``s``-stage monotonic method.

    ``b`` has entries ``b_0 .. b_s``; ``mu``, ``nu`` and ``mu_tilde`` are
    indexed by stage ``j`` and hold NaN at ``j = 0, 1`` where they are not
    defined. ``c`` holds the abscissae ``c_0 .. c_{s-1}``.
    """

    s: int
    w0: float
    a: float
    w1: float
    b: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    mu_tilde: np.ndarray
    gamma_s: float
    delta_s: float
    alpha_s: float
    c: np.ndarray
    rho: float
    err_const: float

    @property
    def final_weights(self):
        """Weights ``(gamma_s/b_s, delta_s/b_{s-2})`` of ``Y_s`` and
        ``Y_{s-2}`` in the step update."""
        return self.gamma_s / self.b[self.s], self.delta_s / self.b[self.s - 2]


def _abscissae_recurrence(s, w1, b, mu, nu, mu_tilde):
    c = np.zeros(s)
    c[1] = w1 * b[1]
    for j in range(2, s):
        c[j] = mu[j] * c[j - 1] + nu[j] * c[j - 2] + mu_tilde[j] * (1.0 - b[j - 1])
    return c


def build_tableau(s):
    """Construct the :class:`MethodTableau` for ``s >= 3`` stages."""
    s = _check_stages(s)
    a = solve_a(s)
    m = s - 1
    w0 = math.cosh(a)
    w1 = (1.0 + math.cosh(m * a)) * math.sinh(a) / (m * math.sinh(m * a))

    j = np.arange(s + 1)
    b = 1.0 / (1.0 + np.cosh(j * a))

    mu = np.full(s + 1, np.nan)
    nu = np.full(s + 1, np.nan)
    mu_tilde = np.full(s + 1, np.nan)
    mu[2:] = 2.0 * w0 * b[2:] / b[1:-1]
    nu[2:] = -b[2:] / b[:-2]
    mu_tilde[2:] = 2.0 * w1 * b[2:] / b[1:-1]

    bsm1 = b[s - 1]
    gamma = bsm1 / (2.0 * s * w1)
    delta = -bsm1 / (2.0 * (s - 2) * w1)
    alpha = 1.0 - gamma * math.cosh(s * a) - delta * math.cosh((s - 2) * a)

    c = _abscissae_recurrence(s, w1, b, mu, nu, mu_tilde)
    c_closed = np.array([w1 * b[k] * cheb_T_prime_cosh(k, a) for k in range(s)])
    if np.max(np.abs(c - c_closed)) > 1e-9:
        raise ConvergenceError(f"abscissae recurrence drifted for s={s}")

    rho = (1.0 + w0) / w1
    err_const = (1.0 - bsm1 * w1 * w1 * cheb_T_second_cosh(m, a)) / 6.0

    for arr in (b, mu, nu, mu_tilde, c):
        arr.setflags(write=False)
    return MethodTableau(
        s=s, w0=w0, a=a, w1=w1, b=b, mu=mu, nu=nu, mu_tilde=mu_tilde,
        gamma_s=gamma, delta_s=delta, alpha_s=alpha, c=c, rho=rho,
        err_const=err_const,
    )


_cache = {}
_cache_lock = threading.Lock()


def get_tableau(s):
    """Cached :func:`build_tableau`; each ``s`` is solved at most once."""
    tab = _cache.get(s)
    if tab is not None:
        return tab
    with _cache_lock:
        tab = _cache.get(s)
        if tab is None:
            tab = build_tableau(s)
            _cache[s] = tab
    return tab


def error_constant(tab):
    """``C_s = (1 - R_s'''(0)) / 6`` with ``R_s''' (0) = b_{s-1} w1^2 T''_{s-1}(w0)``."""
    return (1.0 - tab.b[tab.s - 1] * tab.w1**2
            * cheb_T_second_cosh(tab.s - 1, tab.a)) / 6.0


# -- stability polynomials ----------------------------------------------------

@dataclass
class StabilitySample:
    """Stability function values at ``z``.

    ``internal[j]`` is the stage polynomial ``R~_j(z)``, ``j = 0 .. s``;
    ``Rprime`` is ``R_s'(z) = R~_{s-1}(z)``.
    """

    z: complex
    R: complex
    Rprime: complex = None
    internal: np.ndarray = None


def _as_eval_point(z):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        ok = np.all(np.isfinite(z))
    else:
        z = z.astype(float)
        ok = np.all(np.isfinite(z))
    if not ok:
        raise ValueError("evaluation point must be finite")
    return z


def eval_stability(tab, z, internal=True):
    """Evaluate ``R_s`` through the stage recurrence, as the stepper does.

    ``z`` may be a real or complex scalar or array. With ``internal=True`` the
    stage polynomials are kept (shape ``(s + 1,) + z.shape``).
    """
    z = _as_eval_point(z)
    s = tab.s
    b, mu, nu, mt = tab.b, tab.mu, tab.nu, tab.mu_tilde
    one = np.ones_like(z)
    r_prev2 = one
    r_prev = 1.0 + b[1] * tab.w1 * z
    stages = [r_prev2, r_prev] if internal else None
    r_sm2 = r_prev if s == 3 else None
    r_sm1 = None
    for j in range(2, s + 1):
        r_j = (1.0 + mu[j] * (r_prev - 1.0) + nu[j] * (r_prev2 - 1.0)
               + mt[j] * z * (r_prev - b[j - 1]))
        if internal:
            stages.append(r_j)
        if j == s - 2:
            r_sm2 = r_j
        elif j == s - 1:
            r_sm1 = r_j
        r_prev2, r_prev = r_prev, r_j
    r_s = r_prev
    g, d = tab.final_weights
    R = 1.0 + b[s - 1] * z + g * (r_s - 1.0) + d * (r_sm2 - 1.0)
    conv = complex if np.iscomplexobj(R) else float
    if np.ndim(R) == 0:
        R, r_sm1 = conv(R), conv(r_sm1)
        z = conv(z)
    return StabilitySample(
        z=z, R=R, Rprime=r_sm1,
        internal=np.array(stages) if internal else None,
    )


def _cheb_any(n, x):
    if np.iscomplexobj(x):
        return cheb_T_complex(n, x)
    return cheb_T(n, x)


def eval_stability_direct(tab, z):
    """Evaluate ``R_s`` from its expanded Chebyshev form.

    ``R_s(z) = 1 + b_{s-1} z + gamma_s (T_s(t) - T_s(w0))
    + delta_s (T_{s-2}(t) - T_{s-2}(w0))`` with ``t = w0 + w1 z``.
    Independent of the stage recurrence; used as its cross-check.
    """
    z = _as_eval_point(z)
    s, a = tab.s, tab.a
    t = tab.w0 + tab.w1 * z
    out = (1.0 + tab.b[s - 1] * z
           + tab.gamma_s * (_cheb_any(s, t) - math.cosh(s * a))
           + tab.delta_s * (_cheb_any(s - 2, t) - math.cosh((s - 2) * a)))
    if np.ndim(out) == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def eval_derivative_direct(tab, x):
    """``R_s'(x) = b_{s-1} (1 + T_{s-1}(w0 + w1 x))`` for real ``x``."""
    return tab.b[tab.s - 1] * (1.0 + cheb_T(tab.s - 1, tab.w0 + tab.w1 * np.asarray(x, float)))


@dataclass(frozen=True)
class ScanReport:
    """Extrema of the stability polynomials on ``(-rho_s, 0]``.

    The internal extrema run over stages ``j >= 1``; ``max_internal`` excludes
    ``z = 0`` where every stage polynomial equals one.
    """

    min_Rprime: float
    min_R: float
    min_internal: float
    max_internal: float
    points: np.ndarray


def monotonicity_scan(tab, m):
    """Sample ``m`` equispaced points of ``(-rho_s, 0]`` (``0`` included)."""
    if m < 2:
        raise ValueError("scan needs at least two points")
    z = -tab.rho + tab.rho * np.arange(1, m + 1) / m
    z[-1] = 0.0
    smp = eval_stability(tab, z)
    inner = smp.internal[1:]
    return ScanReport(
        min_Rprime=float(np.min(smp.Rprime)),
        min_R=float(np.min(smp.R)),
        min_internal=float(np.min(inner)),
        max_internal=float(np.max(inner[:, z < 0])) if np.any(z < 0) else 1.0,
        points=z,
    )


def stability_region_grid(tab, re_range, im_range, nx, ny):
    """``|R_s(z)|`` on an ``ny`` by ``nx`` grid over the given rectangle.

    Returns ``(re, im, values)`` with ``values[k, i]`` at
    ``re[i] + 1j * im[k]``.
    """
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 points per axis")
    re = np.linspace(re_range[0], re_range[1], nx)
    im = np.linspace(im_range[0], im_range[1], ny)
    zz = re[None, :] + 1j * im[:, None]
    R = eval_stability(tab, zz, internal=False).R
    return re, im, np.abs(R)


def stability_interval(poly, guess, tol=1e-10):
    """Length ``beta`` of the real stability interval ``[-beta, 0]``.

    ``poly`` maps real arrays to amplification factors. The first point
    where ``|poly| > 1`` is located on a fine grid over ``[-2 guess, 0]`` and
    refined by bisection.
    """
    x = np.linspace(-2.0 * guess, 0.0, 20001)
    bad = np.abs(poly(x)) > 1.0 + 1e-13
    if not np.any(bad):
        raise ValueError("stability interval exceeds the scan window")
    k = np.nonzero(bad)[0][-1]
    lo, hi = x[k], x[k + 1]  # |poly(lo)| > 1 >= |poly(hi)|
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if abs(poly(np.array([mid]))[0]) > 1.0 + 1e-13:
            lo = mid
        else:
            hi = mid
    return -hi


# -- classical RKC comparison baseline ----------------------------------------

def _rkc2_params(s, damping):
    w0 = 1.0 + damping / s**2
    tp = cheb_T_prime(s, w0)
    tpp = cheb_T_second(s, w0)
    w1 = tp / tpp
    bs = tpp / tp**2
    return w0, w1, bs


def rkc2_reference_polynomial(s, z, damping=RKC2_DAMPING):
    """Stability polynomial of the damped second-order RKC method.

    ``R(z) = 1 - b_s T_s(w0) + b_s T_s(w0 + w1 z)`` with ``w0 = 1 + eps/s^2``,
    ``w1 = T_s'(w0)/T_s''(w0)`` and ``b_s = T_s''(w0)/T_s'(w0)^2``.
    """
    if s < 2:
        raise ValueError("RKC2 needs s >= 2")
    w0, w1, bs = _rkc2_params(s, damping)
    z = _as_eval_point(z)
    out = 1.0 - bs * cheb_T(s, w0) + bs * _cheb_any(s, w0 + w1 * z)
    if np.ndim(out) == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def rkc2_error_constant(s, damping=RKC2_DAMPING):
    """``(1 - R'''(0)) / 6`` for the damped RKC2 polynomial."""
    w0, w1, bs = _rkc2_params(s, damping)
    # T_s''' from the Chebyshev ODE (1 - x^2) T'' - x T' + n^2 T = 0,
    # differentiated once: (1 - x^2) T''' = 3 x T'' - (n^2 - 1) T'
    tp = cheb_T_prime(s, w0)
    tpp = cheb_T_second(s, w0)
    tppp = (3.0 * w0 * tpp - (s * s - 1.0) * tp) / (1.0 - w0 * w0)
    return (1.0 - bs * w1**3 * tppp) / 6.0
