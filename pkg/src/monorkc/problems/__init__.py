"""Benchmark and verification problems behind a common interface."""

import numpy as np

from . import burgers, comb, cusp, finag, synthetic
from .base import GridSpec, OdeProblem, laplacian_1d
from .reference import (
    DATA_ENV,
    ReferenceNotAvailable,
    generate_reference,
    load_reference,
    read_reference,
    write_reference,
)

__all__ = [
    "OdeProblem",
    "GridSpec",
    "PROBLEMS",
    "BENCHMARKS",
    "make_problem",
    "reference_solution",
    "euclidean_error",
    "ReferenceNotAvailable",
    "generate_reference",
    "read_reference",
    "write_reference",
    "laplacian_1d",
    "DATA_ENV",
]

_BENCHMARK_MAKERS = {
    "cusp": cusp.make,
    "finag": finag.make,
    "burgers": burgers.make,
    "comb": comb.make,
}

_SYNTHETIC_MAKERS = {
    "linear": synthetic.linear,
    "decay_grid": synthetic.decay_grid,
    "cosine_growth": synthetic.cosine_growth,
}

BENCHMARKS = tuple(_BENCHMARK_MAKERS)
PROBLEMS = BENCHMARKS + tuple(_SYNTHETIC_MAKERS)


def make_problem(name, **params):
    """Build a registered problem.

    Benchmarks built with default parameters pick up their stored reference
    from the data directory (see ``DATA_ENV``) when one exists; stored
    references belong to the default grids. ``params`` are forwarded to the
    maker, e.g. ``make_problem("linear", lam=-100.0)``.
    """
    key = name.lower()
    if key in _BENCHMARK_MAKERS:
        if not params:
            params["reference"] = load_reference(key)
        return _BENCHMARK_MAKERS[key](**params)
    if key in _SYNTHETIC_MAKERS:
        return _SYNTHETIC_MAKERS[key](**params)
    raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}")


def reference_solution(problem):
    """Terminal reference state of ``problem``.

    Raises :class:`ReferenceNotAvailable` rather than guessing.
    """
    if problem.reference is None:
        raise ReferenceNotAvailable(f"no reference solution stored for {problem.name!r}")
    return problem.reference


def euclidean_error(y, ref):
    """Unscaled Euclidean norm ``|y - ref|_2``."""
    y = np.asarray(y, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if y.shape != ref.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {ref.shape}")
    return float(np.linalg.norm(y - ref))
