"""FINAG: FitzHugh-Nagumo nerve conduction equation by the method of lines.

Source: A. Abdulle, Fourth order Chebyshev methods with recurrence relation,
SIAM J. Sci. Comput. 23 (2002), numerical experiments; the PDE itself is the
one in E. Hairer, S.P. Norsett, G. Wanner, Solving Ordinary Differential
Equations I, 2nd ed., Springer 1993, Sect. I.16::

    v_t = v_xx - f(v) - w,       f(v) = v (v - a)(v - 1)
    w_t = eps (v - b w)

    a = 0.139,  eps = 0.008,  b = 2.54
    0 <= x <= 100,  0 <= t <= 400
    v_x(0, t) = -0.3,  v_x(100, t) = 0,  v(x, 0) = w(x, 0) = 0

The inflow flux at ``x = 0`` triggers a train of travelling pulses.

Discretization: ``N`` cell centres ``x_i = (i - 1/2) dx``, ``dx = 100 / N``,
with the Neumann data imposed through ghost cells. ``N = 400`` gives 800
equations. State layout ``(v_1..v_N, w_1..w_N)``.
"""

import numpy as np

from .base import GridSpec, OdeProblem

A = 0.139
EPS = 0.008
B = 2.54
LENGTH = 100.0
FLUX_LEFT = -0.3
N_CELLS = 400
X_END = 400.0


def make(N=N_CELLS, reference=None):
    dx = LENGTH / N
    inv_dx2 = 1.0 / (dx * dx)

    def rhs(t, z):
        v, w = z[:N], z[N:]
        lap = np.empty(N)
        lap[1:-1] = v[:-2] - 2.0 * v[1:-1] + v[2:]
        # ghost v_0 = v_1 - dx * v_x(0), ghost v_{N+1} = v_N
        lap[0] = (v[0] - dx * FLUX_LEFT) - 2.0 * v[0] + v[1]
        lap[-1] = v[-2] - v[-1]
        out = np.empty_like(z)
        out[:N] = inv_dx2 * lap - v * (v - A) * (v - 1.0) - w
        out[N:] = EPS * (v - B * w)
        return out

    def rho_bound(t, z):
        v = z[:N]
        df = 3.0 * v * v - 2.0 * (1.0 + A) * v + A
        row_v = 4.0 * inv_dx2 + np.abs(df).max() + 1.0
        row_w = EPS * (1.0 + B)
        return float(max(row_v, row_w))

    return OdeProblem(
        name="finag", rhs=rhs, x0=0.0, x_end=X_END, y0=np.zeros(2 * N),
        rho_bound=rho_bound, reference=reference,
        grid=GridSpec(N, dx, "neumann"),
        description=f"FitzHugh-Nagumo, N={N} cells on [0, 100]",
    )
