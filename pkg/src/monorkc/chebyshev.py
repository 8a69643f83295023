"""Chebyshev polynomials of the first kind and their derivatives.

Real arguments go through the closed forms ``cos(n*arccos x)`` and
``cosh(n*arccosh x)``. The three-term recurrence loses accuracy for large
``n`` when ``x`` sits just above 1, which is exactly where the stabilized
methods live (``w0 - 1 ~ 1e-5`` for thousands of stages). Complex arguments
use the recurrence.

All functions accept scalars or numpy arrays for the argument; ``n`` is a
scalar degree.
"""

import math

import numpy as np

__all__ = [
    "cheb_T",
    "cheb_T_prime",
    "cheb_T_second",
    "cheb_T_complex",
    "cheb_T_cosh",
    "cheb_T_prime_cosh",
    "cheb_T_second_cosh",
]


def _check_degree(n):
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    return int(n)


def _as_real(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Chebyshev argument must be finite")
    return x


def _unwrap(out, scalar):
    return float(out) if scalar else out


def cheb_T(n, x):
    """Evaluate ``T_n(x)`` for real ``x``.

    Uses ``cos(n*arccos x)`` on ``[-1, 1]`` and ``(+-1)^n cosh(n*arccosh|x|)``
    outside it. Raises ``ValueError`` for non-finite input.
    """
    n = _check_degree(n)
    scalar = np.ndim(x) == 0
    x = _as_real(x)
    ax = np.abs(x)
    inside = ax <= 1.0
    out = np.empty_like(x)
    with np.errstate(invalid="ignore", over="ignore"):
        out[inside] = np.cos(n * np.arccos(x[inside]))
        outer = np.cosh(n * np.arccosh(ax[~inside]))
    sign = np.where(x[~inside] < 0, (-1.0) ** n, 1.0)
    out[~inside] = sign * outer
    # exact endpoint values; cos(n*pi) is off by an ulp for large n
    out[x == 1.0] = 1.0
    out[x == -1.0] = (-1.0) ** n
    return _unwrap(out, scalar)


def cheb_T_prime(n, x):
    """Evaluate ``T_n'(x) = n U_{n-1}(x)`` for real ``x``.

    At ``x = +-1`` the limit ``(+-1)^(n-1) n^2`` is returned.
    """
    n = _check_degree(n)
    scalar = np.ndim(x) == 0
    x = _as_real(x)
    out = np.empty_like(x)
    if n == 0:
        out[...] = 0.0
        return _unwrap(out, scalar)
    ax = np.abs(x)
    edge = ax == 1.0
    inside = (ax < 1.0)
    outside = ax > 1.0
    with np.errstate(invalid="ignore", over="ignore"):
        th = np.arccos(x[inside])
        out[inside] = n * np.sin(n * th) / np.sin(th)
        a = np.arccosh(ax[outside])
        val = n * np.sinh(n * a) / np.sinh(a)
    # T_n' has parity (-1)^(n-1)
    sign = np.where(x[outside] < 0, (-1.0) ** (n - 1), 1.0)
    out[outside] = sign * val
    out[edge] = np.where(x[edge] > 0, 1.0, (-1.0) ** (n - 1)) * n * n
    return _unwrap(out, scalar)


def cheb_T_second(n, x):
    """Evaluate ``T_n''(x)`` for real ``x``.

    Away from ``+-1``::

        T_n''(x) = (x T_n'(x) - n^2 T_n(x)) / (1 - x^2)

    At ``x = +-1`` the analytic limit ``(+-1)^n n^2 (n^2 - 1) / 3`` is used.
    When ``n^2 * ||x| - 1|`` is tiny the closed form cancels badly, so a
    truncated Taylor series about the endpoint is used instead.
    """
    n = _check_degree(n)
    scalar = np.ndim(x) == 0
    x = _as_real(x)
    out = np.empty_like(x)
    if n < 2:
        out[...] = 0.0
        return _unwrap(out, scalar)
    ax = np.abs(x)
    sign = np.where(x < 0, (-1.0) ** n, 1.0)
    near = n * n * np.abs(ax - 1.0) < 1e-4
    far = ~near
    # T_n''(cosh a) = (n^2 cosh(na) sinh a - n sinh(na) cosh a) / sinh(a)^3,
    # and the cos analogue inside; both are even in the angle.
    with np.errstate(invalid="ignore", over="ignore"):
        xf = ax[far]
        val = np.empty_like(xf)
        ins = xf < 1.0
        th = np.arccos(xf[ins])
        st, ct = np.sin(th), np.cos(th)
        val[ins] = (-n * n * np.cos(n * th) * st + n * np.sin(n * th) * ct) / st**3
        a = np.arccosh(xf[~ins])
        sa, ca = np.sinh(a), np.cosh(a)
        val[~ins] = (n * n * np.cosh(n * a) * sa - n * np.sinh(n * a) * ca) / sa**3
    out[far] = val
    # series of T_n'' about x = 1 in powers of (x - 1):
    # T_n(1 + e) = sum_k c_k e^k, c_k = prod_{i<k} (n^2 - i^2) / ((2i + 1)(i + 1))
    e = ax[near] - 1.0
    n2 = float(n * n)
    c2 = n2 * (n2 - 1.0) / 3.0
    c3 = c2 * (n2 - 4.0) / 15.0
    c4 = c3 * (n2 - 9.0) / 28.0
    c5 = c4 * (n2 - 16.0) / 45.0
    out[near] = c2 + e * (3.0 * c3 + e * (6.0 * c4 + e * 10.0 * c5))
    out *= sign
    return _unwrap(out, scalar)


def cheb_T_complex(n, z):
    """Evaluate ``T_n(z)`` for complex ``z`` with the three-term recurrence."""
    n = _check_degree(n)
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("Chebyshev argument must be finite")
    t_prev = np.ones_like(z)
    if n == 0:
        return complex(t_prev) if scalar else t_prev
    t_cur = z.copy()
    two_z = 2.0 * z
    for _ in range(n - 1):
        t_prev, t_cur = t_cur, two_z * t_cur - t_prev
    return complex(t_cur) if scalar else t_cur


# Forms in the hyperbolic parameter a = arccosh(x), x >= 1. The tableau
# construction works in ``a`` throughout so these avoid the arccosh round trip.

def cheb_T_cosh(n, a):
    """``T_n(cosh a)``."""
    return math.cosh(n * a)


def cheb_T_prime_cosh(n, a):
    """``T_n'(cosh a)`` for ``a >= 0``."""
    if a == 0.0:
        return float(n * n)
    return n * math.sinh(n * a) / math.sinh(a)


def cheb_T_second_cosh(n, a):
    """``T_n''(cosh a)`` for ``a >= 0``."""
    if n < 2:
        return 0.0
    if n * a < 1e-2:
        # (n a)^2 / 2 ~ n^2 (x - 1): series branch of cheb_T_second
        return cheb_T_second(n, math.cosh(a))
    sa, ca = math.sinh(a), math.cosh(a)
    return (n * n * math.cosh(n * a) * sa - n * math.sinh(n * a) * ca) / sa**3
