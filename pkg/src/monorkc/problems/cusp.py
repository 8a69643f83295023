"""CUSP: Zeeman's cusp catastrophe coupled with a van der Pol oscillator.

Source: E. Hairer, G. Wanner, Solving Ordinary Differential Equations II,
2nd ed., Springer 1996, Sect. IV.10, pp. 147-148.

For ``i = 1..N`` with periodic closure ``(.)_0 = (.)_N``, ``(.)_{N+1} = (.)_1``::

    y_i' = -1e4 (y_i^3 + a_i y_i + b_i) + D (y_{i-1} - 2 y_i + y_{i+1})
    a_i' = b_i + 0.07 v_i + D (a_{i-1} - 2 a_i + a_{i+1})
    b_i' = (1 - a_i^2) b_i - a_i - 0.4 y_i + 0.035 v_i
           + D (b_{i-1} - 2 b_i + b_{i+1})

    v_i = u_i / (u_i + 0.1),  u_i = (y_i - 0.7)(y_i - 1.3),  D = N^2 / 144

Initial values ``y_i = 0``, ``a_i = -2 cos(2 pi i / N)``,
``b_i = 2 sin(2 pi i / N)``; ``N = 32``, ``0 <= x <= 1.1``.

State layout is interleaved ``(y_1, a_1, b_1, y_2, ...)`` as in the
original Fortran driver.
"""

import numpy as np

from .base import GridSpec, OdeProblem

N_CELLS = 32
X_END = 1.1
STIFF = 1.0e4
SCALE = 0.01


def _lap(u):
    return np.roll(u, 1) - 2.0 * u + np.roll(u, -1)


def make(N=N_CELLS, reference=None):
    D = N * N / 144.0
    i = np.arange(1, N + 1)
    y0 = np.empty(3 * N)
    y0[0::3] = 0.0
    y0[1::3] = -2.0 * np.cos(2.0 * np.pi * i / N)
    y0[2::3] = 2.0 * np.sin(2.0 * np.pi * i / N)

    def rhs(x, z):
        y, a, b = z[0::3], z[1::3], z[2::3]
        u = (y - 0.7) * (y - 1.3)
        v = u / (u + 0.1)
        out = np.empty_like(z)
        out[0::3] = -STIFF * (y**3 + a * y + b) + D * _lap(y)
        out[1::3] = b + 0.07 * v + D * _lap(a)
        out[2::3] = (1.0 - a * a) * b - a - 0.4 * y + 0.035 * v + D * _lap(b)
        return out

    def rho_bound(x, z):
        # Gershgorin discs of S^-1 J S with S = diag(1, k, k) per cell. The
        # y-row couplings to (a, b) are O(1e4) but scale with k, while the
        # reverse couplings are O(1) and scale with 1/k.
        k = SCALE
        y, a, b = z[0::3], z[1::3], z[2::3]
        u = (y - 0.7) * (y - 1.3)
        dv = 0.1 * (2.0 * y - 2.0) / (u + 0.1) ** 2
        row_y = (np.abs(STIFF * (3.0 * y * y + a) + 2.0 * D)
                 + k * STIFF * (np.abs(y) + 1.0) + 2.0 * D)
        row_a = 0.07 * np.abs(dv) / k + 4.0 * D + 1.0
        row_b = (np.abs(-0.4 + 0.035 * dv) / k + np.abs(2.0 * a * b + 1.0)
                 + np.abs(1.0 - a * a - 2.0 * D) + 2.0 * D)
        return float(max(row_y.max(), row_a.max(), row_b.max()))

    return OdeProblem(
        name="cusp", rhs=rhs, x0=0.0, x_end=X_END, y0=y0, rho_bound=rho_bound,
        reference=reference, grid=GridSpec(N, 1.0 / N, "periodic"),
        description=f"cusp catastrophe + van der Pol, N={N}, periodic",
    )
