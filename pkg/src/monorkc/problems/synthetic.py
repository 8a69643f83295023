"""Small problems with known answers, used for verification."""

import math

import numpy as np

from .base import GridSpec, OdeProblem, laplacian_1d


def linear(lam=-1.0, x0=0.0, x_end=1.0, y0=1.0):
    """Scalar ``y' = lam y`` with exact terminal value as reference."""
    lam = float(lam)

    def rhs(x, y):
        return lam * y

    ref = np.array([math.exp(lam * (x_end - x0)) * y0])
    return OdeProblem(
        name="linear", rhs=rhs, x0=x0, x_end=x_end, y0=np.array([y0]),
        rho_bound=lambda x, y: abs(lam), reference=ref,
        description=f"y' = {lam:g} y",
    )


def decay_grid(N=100, diffusion=1.0, x_end=0.1):
    """Heat equation ``u_t = d u_xx`` on ``(0, 1)`` with zero Dirichlet data.

    Initial profile ``sin(pi x) + sin(5 pi x)``; both modes decay
    independently so the semi-discrete solution is known exactly. The
    Jacobian eigenvalues are ``-4 d sin^2(k pi dx / 2) / dx^2``.
    """
    dx = 1.0 / (N + 1)
    x = dx * np.arange(1, N + 1)
    d = float(diffusion)

    def rhs(t, u):
        return d * laplacian_1d(u, dx, "dirichlet")

    modes = (1, 5)
    y0 = sum(np.sin(k * math.pi * x) for k in modes)
    ref = sum(
        math.exp(-4.0 * d * math.sin(k * math.pi * dx / 2) ** 2 / dx**2 * x_end)
        * np.sin(k * math.pi * x)
        for k in modes
    )
    return OdeProblem(
        name="decay_grid", rhs=rhs, x0=0.0, x_end=x_end, y0=y0,
        rho_bound=lambda t, u: 4.0 * d / dx**2, reference=ref,
        grid=GridSpec(N, dx, "dirichlet"),
        description="1-D heat equation, second-order central differences",
    )


def cosine_growth(x_end=1.0):
    """Smooth nonstiff ``y' = y cos(x)``, ``y(0) = 1``, solution ``exp(sin x)``."""

    def rhs(x, y):
        return y * math.cos(x)

    return OdeProblem(
        name="cosine_growth", rhs=rhs, x0=0.0, x_end=x_end, y0=np.array([1.0]),
        rho_bound=lambda x, y: abs(math.cos(x)),
        reference=np.array([math.exp(math.sin(x_end))]),
        description="y' = y cos(x)",
    )
