import math

import numpy as np
import pytest

from monorkc.problems import (
    BENCHMARKS,
    DATA_ENV,
    PROBLEMS,
    OdeProblem,
    ReferenceNotAvailable,
    euclidean_error,
    make_problem,
    read_reference,
    reference_solution,
    write_reference,
)
from monorkc.problems import cusp as cusp_module
from monorkc.problems.base import GridSpec, laplacian_1d
from monorkc.problems.reference import load_reference, reference_path, rk4_solve


def fd_jacobian(f, x, y):
    f0 = f(x, y)
    J = np.empty((y.size, y.size))
    for k in range(y.size):
        d = 1e-7 * max(1.0, abs(y[k]))
        yp = y.copy()
        yp[k] += d
        J[:, k] = (f(x, yp) - f0) / d
    return J


@pytest.mark.parametrize("name, n", [("cusp", 96), ("finag", 800), ("burgers", 500),
                                     ("comb", 10000), ("linear", 1), ("decay_grid", 100)])
def test_dimensions(name, n):
    p = make_problem(name)
    assert p.n == n
    assert p.rhs(p.x0, p.y0).shape == (n,)
    assert p.x_end > p.x0


def test_registry():
    assert set(BENCHMARKS) == {"cusp", "finag", "burgers", "comb"}
    assert set(BENCHMARKS) < set(PROBLEMS)
    assert make_problem("CUSP").name == "cusp"
    with pytest.raises(KeyError):
        make_problem("brusselator")


def small_states():
    rng = np.random.default_rng(3)
    yield "cusp", cusp_module.make(N=8), None
    p = make_problem("burgers", N=40)
    yield "burgers", p, p.y0 + 0.1 * rng.standard_normal(p.n)
    p = make_problem("finag", N=60)
    yield "finag", p, rng.uniform(-0.3, 1.0, p.n)
    p = make_problem("comb", N=8)
    yield "comb", p, 1.0 + rng.uniform(0.0, 0.9, p.n)


@pytest.mark.parametrize("name, p, y", list(small_states()), ids=lambda v: v if isinstance(v, str) else "")
def test_rho_bound_covers_spectrum(name, p, y):
    y = p.y0 if y is None else y
    J = fd_jacobian(p.rhs, p.x0, y)
    true = np.abs(np.linalg.eigvals(J)).max()
    assert true <= p.rho_bound(p.x0, y) * (1 + 1e-5)


def test_cusp_bound_along_states():
    p = cusp_module.make(N=8)
    rng = np.random.default_rng(11)
    for _ in range(5):
        y = p.y0 + rng.uniform(-1.5, 1.5, p.n)
        true = np.abs(np.linalg.eigvals(fd_jacobian(p.rhs, 0.0, y))).max()
        assert true <= p.rho_bound(0.0, y) * (1 + 1e-5)


def test_cusp_matches_componentwise_formula():
    N = 6
    p = cusp_module.make(N=N)
    rng = np.random.default_rng(5)
    z = rng.uniform(-1.5, 1.5, 3 * N)
    D = N * N / 144.0
    want = np.empty(3 * N)
    for i in range(N):
        y, a, b = z[3 * i: 3 * i + 3]
        yl, al, bl = z[3 * ((i - 1) % N): 3 * ((i - 1) % N) + 3]
        yr, ar, br = z[3 * ((i + 1) % N): 3 * ((i + 1) % N) + 3]
        u = (y - 0.7) * (y - 1.3)
        v = u / (u + 0.1)
        want[3 * i] = -1e4 * (y**3 + a * y + b) + D * (yl - 2 * y + yr)
        want[3 * i + 1] = b + 0.07 * v + D * (al - 2 * a + ar)
        want[3 * i + 2] = (1 - a * a) * b - a - 0.4 * y + 0.035 * v + D * (bl - 2 * b + br)
    np.testing.assert_allclose(p.rhs(0.0, z), want, rtol=1e-13)


def test_comb_is_symmetric_in_the_axes():
    p = make_problem("comb", N=12)
    rng = np.random.default_rng(2)
    u = 1.0 + rng.uniform(0, 0.5, (12, 12))
    u = u + u.T
    out = p.rhs(0.0, u.reshape(-1)).reshape(12, 12)
    np.testing.assert_allclose(out, out.T, rtol=1e-13)


def test_comb_steady_at_start_away_from_reaction():
    # u = 1 makes the Laplacian vanish; the reaction term is R / (alpha delta)
    p = make_problem("comb", N=10)
    np.testing.assert_allclose(p.rhs(0.0, p.y0), 5.0 / 20.0)


def test_finag_boundary_flux():
    p = make_problem("finag", N=50)
    dx = p.grid.dx
    out = p.rhs(0.0, p.y0)
    # only the flux-driven first cell moves from rest
    assert out[0] == pytest.approx(0.3 / dx)
    assert np.all(out[1:] == 0.0)


def test_burgers_initial_profile():
    p = make_problem("burgers", N=9)
    x = np.arange(1, 10) / 10.0
    np.testing.assert_allclose(p.y0, 1.5 * x * (1 - x) ** 2)


@pytest.mark.parametrize("bc", ["dirichlet", "periodic"])
def test_laplacian_spectrum(bc):
    N, dx = 30, 0.1
    M = np.column_stack([laplacian_1d(e, dx, bc) for e in np.eye(N)])
    eig = np.sort(np.linalg.eigvalsh(M))
    if bc == "dirichlet":
        k = np.arange(1, N + 1)
        want = np.sort(-4 * np.sin(k * math.pi / (2 * (N + 1))) ** 2 / dx**2)
    else:
        k = np.arange(N)
        want = np.sort(-4 * np.sin(k * math.pi / N) ** 2 / dx**2)
    np.testing.assert_allclose(eig, want, atol=1e-9)
    with pytest.raises(ValueError):
        laplacian_1d(np.ones(3), dx, "robin")


def test_decay_grid_reference_is_exact():
    p = make_problem("decay_grid", N=40, x_end=0.02)
    y = rk4_solve(p.rhs, 0.0, p.x_end, p.y0, 4000)
    assert euclidean_error(y, p.reference) < 1e-10


def test_problem_validation():
    with pytest.raises(ValueError):
        OdeProblem(name="x", rhs=None, x0=0.0, x_end=1.0, y0=np.ones(3), reference=np.ones(2))
    with pytest.raises(ValueError):
        GridSpec(1, 0.1, "dirichlet")
    p = make_problem("linear")
    with pytest.raises(ValueError):
        p.y0[0] = 3.0


def test_missing_reference(monkeypatch, tmp_path):
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    p = make_problem("cusp")
    assert p.reference is None
    with pytest.raises(ReferenceNotAvailable):
        reference_solution(p)


def test_reference_round_trip(monkeypatch, tmp_path):
    values = np.linspace(-1.0, 2.0, 96)
    write_reference(reference_path("cusp", tmp_path), "cusp", values, atol=1e-11)
    header, got = read_reference(reference_path("cusp", tmp_path))
    np.testing.assert_array_equal(got, values)
    assert header["problem"] == "cusp" and header["atol"] == "1e-11"
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    np.testing.assert_array_equal(reference_solution(make_problem("cusp")), values)


def test_corrupt_reference(tmp_path):
    path = tmp_path / "x.ref"
    path.write_bytes(b"# problem: x\n# n: 3\n")
    with pytest.raises(ValueError):
        read_reference(path)


@pytest.mark.parametrize("name", BENCHMARKS)
def test_stored_reference_provenance(name):
    values = load_reference(name)
    if values is None:
        pytest.skip(f"no stored reference for {name}")
    header, _ = read_reference(reference_path(name))
    assert values.shape == (make_problem(name, reference=None).n,)
    assert np.all(np.isfinite(values))
    assert float(header["crosscheck_rms"]) < 1e-6


def test_euclidean_error():
    assert euclidean_error([3.0, 0.0], [0.0, 4.0]) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        euclidean_error(np.ones(2), np.ones(3))


def test_generate_reference_small(tmp_path):
    from monorkc.problems import generate_reference

    p = make_problem("decay_grid", N=20, x_end=0.01)
    path, agreement = generate_reference(p, tol=1e-10, directory=tmp_path, log=lambda m: None)
    header, values = read_reference(path)
    assert agreement < 1e-7
    assert euclidean_error(values, p.reference) < 1e-6
    assert "rk4" in header["crosscheck"]
