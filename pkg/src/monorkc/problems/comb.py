"""COMB: two-dimensional hot-spot problem from combustion theory.

Source: W. Hundsdorfer, J.G. Verwer, Numerical Solution of Time-Dependent
Advection-Diffusion-Reaction Equations, Springer 2003, p. 439::

    u_t = Laplace(u) + (R / (alpha delta)) (1 + alpha - u) exp(delta (1 - 1/u))

    R = 5,  delta = 20,  alpha = 1
    (x, y) in (0, 1)^2,  0 <= t <= 0.29
    u = 1 at t = 0
    u_x = 0 at x = 0,  u_y = 0 at y = 0,  u = 1 at x = 1 and y = 1

A hot spot forms at the origin and ignites around ``t = 0.24``.

Discretization: vertex grid ``x_i = i h``, ``i = 0..N-1``, ``h = 1/N``, so
the Dirichlet line ``x = 1`` is the ghost ``i = N`` and the Neumann line
``x = 0`` carries unknowns mirrored through ``u_{-1} = u_1``. ``N = 100``
gives 10 000 equations, flattened row-major (``y`` index slowest).
"""

import numpy as np

from .base import GridSpec, OdeProblem

R = 5.0
DELTA = 20.0
ALPHA = 1.0
N_SIDE = 100
X_END = 0.29


def make(N=N_SIDE, reference=None):
    h = 1.0 / N
    inv_h2 = 1.0 / (h * h)
    coef = R / (ALPHA * DELTA)

    def rhs(t, z):
        u = z.reshape(N, N)
        up = np.empty((N + 2, N + 2))
        up[1:-1, 1:-1] = u
        up[0, 1:-1] = u[1, :]        # mirror across y = 0
        up[1:-1, 0] = u[:, 1]        # mirror across x = 0
        up[-1, :] = 1.0              # Dirichlet y = 1
        up[:, -1] = 1.0              # Dirichlet x = 1
        lap = (up[:-2, 1:-1] + up[2:, 1:-1] + up[1:-1, :-2] + up[1:-1, 2:]
               - 4.0 * u) * inv_h2
        react = coef * (1.0 + ALPHA - u) * np.exp(DELTA * (1.0 - 1.0 / u))
        return (lap + react).reshape(-1)

    def rho_bound(t, z):
        # the mirrored stencil doubles one neighbour coefficient, so the
        # Gershgorin radius of the Laplacian is 8 / h^2 exactly
        u = z
        e = np.exp(DELTA * (1.0 - 1.0 / u))
        dreact = coef * e * (-1.0 + (1.0 + ALPHA - u) * DELTA / (u * u))
        return float(8.0 * inv_h2 + np.abs(dreact).max())

    return OdeProblem(
        name="comb", rhs=rhs, x0=0.0, x_end=X_END, y0=np.ones(N * N),
        rho_bound=rho_bound, reference=reference,
        grid=GridSpec(N, h, "neumann-dirichlet"),
        description=f"2-D combustion hot spot, {N}x{N} grid",
    )
