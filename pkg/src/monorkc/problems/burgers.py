"""BURGERS: viscous Burgers equation by the method of lines.

Source: A. Abdulle, Fourth order Chebyshev methods with recurrence relation,
SIAM J. Sci. Comput. 23 (2002), numerical experiments::

    u_t + (u^2 / 2)_x = mu u_xx,   mu = 0.0003
    0 <= x <= 1,  0 <= t <= 2.5
    u(x, 0) = 1.5 x (1 - x)^2,  u(0, t) = u(1, t) = 0

Central differences in conservative form on ``N = 500`` interior points,
``dx = 1 / (N + 1)``::

    u_i' = -(u_{i+1}^2 - u_{i-1}^2) / (4 dx) + mu (u_{i-1} - 2 u_i + u_{i+1}) / dx^2
"""

import numpy as np

from .base import GridSpec, OdeProblem

MU = 0.0003
N_POINTS = 500
X_END = 2.5


def make(N=N_POINTS, reference=None):
    dx = 1.0 / (N + 1)
    x = dx * np.arange(1, N + 1)
    y0 = 1.5 * x * (1.0 - x) ** 2
    c_conv = 1.0 / (4.0 * dx)
    c_diff = MU / (dx * dx)

    def rhs(t, u):
        up = np.empty(N + 2)
        up[0] = up[-1] = 0.0
        up[1:-1] = u
        sq = up * up
        return -c_conv * (sq[2:] - sq[:-2]) + c_diff * (up[:-2] - 2.0 * u + up[2:])

    def rho_bound(t, u):
        # Gershgorin: 4 mu / dx^2 + (|u_{i-1}| + |u_{i+1}|) / (2 dx)
        au = np.abs(u)
        nb = np.zeros(N)
        nb[1:] += au[:-1]
        nb[:-1] += au[1:]
        return float(4.0 * c_diff + 2.0 * c_conv * nb.max())

    return OdeProblem(
        name="burgers", rhs=rhs, x0=0.0, x_end=X_END, y0=y0,
        rho_bound=rho_bound, reference=reference,
        grid=GridSpec(N, dx, "dirichlet"),
        description=f"viscous Burgers, mu={MU}, N={N}",
    )
