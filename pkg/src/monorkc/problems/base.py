from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1-D grid used by the method-of-lines problems.

    ``bc`` names the boundary treatment, e.g. ``"dirichlet"``, ``"neumann"``,
    ``"periodic"`` or ``"neumann-dirichlet"``.
    """

    N: int
    dx: float
    bc: str

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("grid needs at least two points")
        if not self.dx > 0:
            raise ValueError("grid spacing must be positive")


@dataclass(frozen=True)
class OdeProblem:
    """An initial value problem ``y' = rhs(x, y)``, ``y(x0) = y0``.

    ``rho_bound(x, y)``, when given, returns an upper bound for the spectral
    radius of the Jacobian. ``reference`` is a high-accuracy solution at
    ``x_end``.
    """

    name: str
    rhs: Callable
    x0: float
    x_end: float
    y0: np.ndarray
    rho_bound: Optional[Callable] = None
    reference: Optional[np.ndarray] = None
    grid: Optional[GridSpec] = None
    description: str = ""

    def __post_init__(self):
        y0 = np.array(self.y0, dtype=float).reshape(-1)
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)
        if y0.size < 1:
            raise ValueError("problem dimension must be at least 1")
        if self.x_end == self.x0:
            raise ValueError("integration span is empty")
        if self.reference is not None:
            ref = np.array(self.reference, dtype=float).reshape(-1)
            if ref.size != y0.size:
                raise ValueError("reference length differs from problem dimension")
            ref.setflags(write=False)
            object.__setattr__(self, "reference", ref)

    @property
    def n(self):
        return self.y0.size


def laplacian_1d(u, dx, bc, left=0.0, right=0.0):
    """Second difference ``(u[i-1] - 2 u[i] + u[i+1]) / dx^2``.

    For ``"dirichlet"`` the ghost values are ``left`` / ``right``; for
    ``"periodic"`` they wrap around.
    """
    out = np.empty_like(u)
    out[1:-1] = u[:-2] - 2.0 * u[1:-1] + u[2:]
    if bc == "periodic":
        out[0] = u[-1] - 2.0 * u[0] + u[1]
        out[-1] = u[-2] - 2.0 * u[-1] + u[0]
    elif bc == "dirichlet":
        out[0] = left - 2.0 * u[0] + u[1]
        out[-1] = u[-2] - 2.0 * u[-1] + right
    else:
        raise ValueError(f"unsupported boundary condition {bc!r}")
    out /= dx * dx
    return out
