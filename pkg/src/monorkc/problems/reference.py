"""Stored terminal reference solutions.

File format (``<name>.ref``): ASCII header lines starting with ``#``, each a
``key: value`` pair, closed by the line ``# end``; then ``n`` little-endian
binary64 values. Required keys are ``problem`` and ``n``; the generator
writes provenance (tolerances, cross-check result, date) as well.
"""

import datetime
import math
import os
from pathlib import Path

import numpy as np

DATA_ENV = "MONORKC_DATA_DIR"
_PACKAGE_DATA = Path(__file__).resolve().parent.parent / "data" / "references"
_END = b"# end\n"


class ReferenceNotAvailable(LookupError):
    """No stored reference solution exists for a problem."""


def data_dir():
    env = os.environ.get(DATA_ENV)
    return Path(env) if env else _PACKAGE_DATA


def reference_path(name, directory=None):
    return Path(directory or data_dir()) / f"{name}.ref"


def write_reference(path, name, values, **meta):
    values = np.ascontiguousarray(values, dtype="<f8").reshape(-1)
    lines = [f"# problem: {name}", f"# n: {values.size}"]
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))
        fh.write(_END)
        fh.write(values.tobytes())


def read_reference(path):
    """Return ``(header, values)`` from a reference file."""
    raw = Path(path).read_bytes()
    cut = raw.find(_END)
    if cut < 0:
        raise ValueError(f"{path}: missing header terminator")
    header = {}
    for line in raw[:cut].decode("ascii").splitlines():
        key, _, val = line.lstrip("# ").partition(":")
        header[key.strip()] = val.strip()
    values = np.frombuffer(raw[cut + len(_END):], dtype="<f8").astype(float)
    n = int(header["n"])
    if values.size != n:
        raise ValueError(f"{path}: expected {n} values, found {values.size}")
    return header, values


def load_reference(name, directory=None):
    path = reference_path(name, directory)
    if not path.exists():
        return None
    return read_reference(path)[1]


def rk4_solve(f, x0, x_end, y0, nsteps):
    """Classical fourth-order Runge-Kutta with ``nsteps`` equal steps."""
    h = (x_end - x0) / nsteps
    y = np.array(y0, dtype=float)
    for k in range(nsteps):
        x = x0 + k * h
        k1 = f(x, y)
        k2 = f(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(x + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def rms(v):
    return float(np.sqrt(np.mean(np.square(v))))


def rk4_converged(problem, rho, halving_tol=1e-9, max_halvings=12, log=print):
    """RK4 solution refined by halving until successive results differ by
    less than ``halving_tol`` (RMS).

    ``rho`` should bound the spectral radius along the whole trajectory; the
    first run then stays inside the RK4 stability interval (about 2.78).
    """
    span = problem.x_end - problem.x0
    nsteps = max(100, int(math.ceil(span * rho / 2.0)))
    prev = rk4_solve(problem.rhs, problem.x0, problem.x_end, problem.y0, nsteps)
    for _ in range(max_halvings):
        nsteps *= 2
        cur = rk4_solve(problem.rhs, problem.x0, problem.x_end, problem.y0, nsteps)
        diff = rms(cur - prev)
        log(f"  rk4 {problem.name}: {nsteps} steps, halving change {diff:.3e}")
        if diff < halving_tol:
            return cur, nsteps, diff
        prev = cur
    raise RuntimeError(f"rk4 cross-check for {problem.name} did not settle")


def generate_reference(problem, tol=1e-11, directory=None, log=print):
    """Regenerate and store the reference for ``problem``.

    The stored vector comes from the monotonic solver at ``atol = rtol = tol``
    and is checked against an RK4 solution refined until halving changes it
    by less than 1e-9.
    """
    from ..driver import SolverConfig, integrate

    rep = integrate(None, problem, SolverConfig(atol=tol, rtol=tol, record_steps=True))
    log(f"  mono {problem.name}: n_f={rep.n_f} accepted={rep.n_accepted}")
    rho = max([st.rho for st in rep.steps] + [1.0])
    y_rk4, nsteps, halving = rk4_converged(problem, rho, log=log)
    agreement = rms(rep.y_final - y_rk4)
    log(f"  {problem.name}: mono vs rk4 RMS difference {agreement:.3e}")
    path = reference_path(problem.name, directory)
    write_reference(
        path, problem.name, rep.y_final,
        generator="monorkc integrate", atol=tol, rtol=tol,
        crosscheck=f"rk4 {nsteps} steps, halving change {halving:.3e}",
        crosscheck_rms=f"{agreement:.3e}",
        date=datetime.date.today().isoformat(),
    )
    return path, agreement
