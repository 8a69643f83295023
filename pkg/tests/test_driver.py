import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monorkc.driver import (
    NonFiniteState,
    SolverConfig,
    StageLimitError,
    StageLimitExceeded,
    StepSizeUnderflow,
    estimate_spectral_radius,
    initial_step_size,
    integrate,
    select_stage_count,
    step_size_update,
)
from monorkc.problems import OdeProblem, euclidean_error, make_problem
from monorkc.problems.base import laplacian_1d
from monorkc.tableau import get_tableau


def scalar_problem(rhs, y0=1.0, x_end=1.0, rho_bound=None):
    return OdeProblem(name="test", rhs=rhs, x0=0.0, x_end=x_end,
                      y0=np.array([y0]), rho_bound=rho_bound)


class Counter:
    def __init__(self, f):
        self.f = f
        self.n = 0

    def __call__(self, x, y):
        self.n += 1
        return self.f(x, y)


# -- spectral radius ---------------------------------------------------------------

def test_rho_scalar_linear():
    f = lambda x, y: -100.0 * y
    y = np.array([1.0])
    est = estimate_spectral_radius(f, 0.0, y, f(0.0, y))
    assert 100.0 <= est.rho <= 125.0
    assert est.raw == pytest.approx(100.0, rel=1e-6)
    assert est.converged


def test_rho_laplacian():
    N = 200
    dx = 1.0 / (N + 1)
    f = lambda x, u: laplacian_1d(u, dx, "dirichlet")
    u = np.sin(np.pi * dx * np.arange(1, N + 1))
    est = estimate_spectral_radius(f, 0.0, u, f(0.0, u))
    assert est.raw == pytest.approx(4.0 / dx**2, rel=0.10)


def test_rho_zero_rhs():
    f = lambda x, y: np.zeros_like(y)
    y = np.ones(5)
    est = estimate_spectral_radius(f, 0.0, y, f(0.0, y))
    assert est.rho == 0.0 and est.n_evals == 1


def test_rho_at_zero_state_uses_absolute_perturbation():
    f = lambda x, y: -3.0 * y
    y = np.zeros(4)
    assert estimate_spectral_radius(f, 0.0, y, f(0.0, y)).raw == pytest.approx(3.0, rel=1e-6)


def test_rho_warm_start_is_cheaper():
    N = 100
    dx = 1.0 / (N + 1)
    f = lambda x, u: laplacian_1d(u, dx, "dirichlet")
    u = np.ones(N)
    cold = estimate_spectral_radius(f, 0.0, u, f(0.0, u), max_iter=200)
    warm = estimate_spectral_radius(f, 0.0, u, f(0.0, u), seed=cold.eigvec)
    assert warm.n_evals < cold.n_evals
    assert warm.raw == pytest.approx(cold.raw, rel=0.02)


def test_rho_iteration_cap_flags_unconverged():
    N = 400
    dx = 1.0 / (N + 1)
    f = lambda x, u: laplacian_1d(u, dx, "dirichlet")
    u = np.ones(N)
    est = estimate_spectral_radius(f, 0.0, u, f(0.0, u), max_iter=3, rtol=1e-12)
    assert not est.converged and est.n_evals == 3


@pytest.mark.parametrize("name", ["burgers", "cusp", "comb", "finag", "decay_grid"])
def test_rho_below_analytic_bound(name):
    p = make_problem(name)
    est = estimate_spectral_radius(p.rhs, p.x0, p.y0, p.rhs(p.x0, p.y0))
    assert est.raw <= 1.05 * p.rho_bound(p.x0, p.y0)


# -- stage selection ---------------------------------------------------------------

@pytest.mark.parametrize("z, s", [(0.0, 3), (29.268039, 10), (100.80657, 20), (3.5874010, 3)])
def test_stage_examples(z, s):
    assert select_stage_count(z) == s


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 4.0e5))
def test_stage_count_is_minimal(z):
    s = select_stage_count(z)
    assert get_tableau(s).rho >= z
    assert s == 3 or get_tableau(s - 1).rho < z


def test_stage_limit():
    with pytest.raises(StageLimitError):
        select_stage_count(get_tableau(10).rho * 1.001, s_max=10)
    with pytest.raises(ValueError):
        select_stage_count(-1.0)


# -- step size ---------------------------------------------------------------------

def test_initial_step_bounded_by_stiffness():
    f = lambda x, y: np.zeros_like(y)
    y0 = np.ones(2)
    assert initial_step_size(f, 0.0, y0, f(0.0, y0), 11.0, 0.0, 1e-6, 1e-6) == pytest.approx(1.1)
    assert initial_step_size(f, 0.0, y0, f(0.0, y0), 11.0, 100.0, 1e-6, 1e-6) <= 0.01


def test_initial_step_decay():
    f = lambda x, y: -y
    y0 = np.array([1.0])
    h = initial_step_size(f, 0.0, y0, f(0.0, y0), 1.0, 1.0, 1e-6, 1e-6)
    assert 1e-4 <= h <= 1e-1


@pytest.mark.parametrize("err, fac", [(1.0, 0.8), (0.25, 1.6), (4.0, 0.4), (0.0, 10.0), (1e6, 0.1), (1e-6, 10.0)])
def test_step_factor_without_history(err, fac):
    assert step_size_update(err, None, 0.1, None) == pytest.approx(fac)


def test_step_factor_with_history():
    # safety * (h/h_prev) * sqrt(err_prev) / err
    assert step_size_update(0.5, 0.25, 0.2, 0.1) == pytest.approx(0.8 * 2.0 * 0.5 / 0.5)
    # steady state: err constant, h constant -> safety / sqrt(err)
    e = 0.3
    assert step_size_update(e, e, 1.0, 1.0) == pytest.approx(0.8 / math.sqrt(e))


def test_config_validation():
    for kw in ({"atol": 0.0}, {"rtol": -1.0}, {"fac_min": 1.5}, {"fac_max": 0.9},
               {"safety": 1.0}, {"s_max": 2}, {"rho_period": 0}, {"h_init": -1.0}):
        with pytest.raises(ValueError):
            SolverConfig(**kw)


# -- integration -------------------------------------------------------------------

def test_zero_rhs():
    p = scalar_problem(lambda x, y: np.zeros_like(y), y0=2.5)
    rep = integrate(None, p, SolverConfig(atol=1e-6, rtol=1e-6))
    assert rep.y_final[0] == pytest.approx(2.5, rel=1e-14)
    assert rep.n_rejected == 0 and rep.x_final == 1.0


@pytest.mark.parametrize("use_bound", [True, False])
def test_exponential_decay(use_bound):
    p = make_problem("linear", lam=-1.0)
    rep = integrate(None, p, SolverConfig(atol=1e-6, rtol=1e-6, use_rho_bound=use_bound))
    assert abs(rep.y_final[0] - math.exp(-1.0)) <= 1e-4
    assert rep.x_final == 1.0


@pytest.mark.parametrize("use_bound", [True, False])
def test_counter_audit(use_bound):
    p = make_problem("decay_grid", N=60)
    f = Counter(p.rhs)
    rep = integrate(f, p, SolverConfig(atol=1e-5, rtol=1e-5, use_rho_bound=use_bound,
                                       record_steps=True))
    assert rep.n_f == f.n == rep.n_f_init + rep.n_f_steps + rep.n_f_rho
    # each attempted step costs s evaluations; the first f(x0, y0) and the
    # step-size probe are the initial evaluations
    assert rep.n_f_steps == sum(st.s for st in rep.steps)
    assert rep.n_f_init == 2
    assert (rep.n_rho > 0) != use_bound
    assert rep.n_accepted == sum(st.accepted for st in rep.steps)


@pytest.mark.parametrize("use_bound", [True, False])
def test_stage_count_covers_stiffness(use_bound):
    p = make_problem("decay_grid", N=80)
    rep = integrate(None, p, SolverConfig(atol=1e-6, rtol=1e-6, use_rho_bound=use_bound,
                                          record_steps=True))
    for st in rep.steps:
        assert st.h * st.rho <= get_tableau(st.s).rho
    assert rep.s_max_used == max(st.s for st in rep.steps if st.accepted)


def test_power_iteration_mode_is_accurate():
    p = make_problem("decay_grid", N=100)
    rep = integrate(None, p, SolverConfig(atol=1e-7, rtol=1e-7, use_rho_bound=False))
    assert euclidean_error(rep.y_final, p.reference) <= 1e-4


def test_tolerance_proportionality():
    p = make_problem("linear", lam=-3.0)
    errs = []
    for tol in np.logspace(-3, -7, 9):
        rep = integrate(None, p, SolverConfig(atol=tol, rtol=tol))
        errs.append(abs(rep.y_final[0] - p.reference[0]))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_stiff_decay_is_stable():
    p = make_problem("linear", lam=-1e4)
    rep = integrate(None, p, SolverConfig(atol=1e-3, rtol=1e-3))
    assert abs(rep.y_final[0]) <= 1e-3
    assert rep.n_accepted < 200
    # forward Euler at the same average step would diverge
    h_avg = 1.0 / rep.n_accepted
    assert abs(1.0 - 1e4 * h_avg) > 1.0


def test_non_finite_state_aborts():
    def f(x, y):
        return np.array([np.nan]) if x > 0.5 else -y

    with pytest.raises(NonFiniteState) as info:
        integrate(f, scalar_problem(f), SolverConfig(atol=1e-4, rtol=1e-4))
    assert info.value.x <= 0.5 + 1e-12
    assert info.value.report.n_accepted > 0


def test_blow_up_underflows():
    # y' = y^2, y(0) = 1 blows up at x = 1
    p = scalar_problem(lambda x, y: y * y, x_end=2.0, rho_bound=lambda x, y: 2.0 * abs(y[0]))
    with pytest.raises((StepSizeUnderflow, NonFiniteState)) as info:
        integrate(None, p, SolverConfig(atol=1e-6, rtol=1e-6))
    assert 0.9 < info.value.x < 1.01


def test_stage_cap_aborts():
    p = make_problem("linear", lam=-1e20)
    with pytest.raises(StageLimitExceeded):
        integrate(None, p, SolverConfig(atol=1e-3, rtol=1e-3, s_max=3))


def test_end_point_hit_exactly():
    p = make_problem("cosine_growth", x_end=0.937)
    rep = integrate(None, p, SolverConfig(atol=1e-8, rtol=1e-8))
    assert rep.x_final == 0.937
    assert rep.y_final[0] == pytest.approx(p.reference[0], rel=1e-6)


def test_reverse_span_rejected():
    p = OdeProblem(name="t", rhs=lambda x, y: y, x0=1.0, x_end=0.0, y0=np.ones(1))
    with pytest.raises(ValueError):
        integrate(None, p)
