import math

import numpy as np
import pytest
from scipy.integrate import quad

from evodg.exceptions import ConfigError
from evodg.registry import get_registry
from modules.problems.functions import (
    get_problem,
    manufactured_polynomial,
    manufactured_smooth,
    problem1,
    problem2,
    residual,
)

E = math.e
PI = math.pi


def test_problem1_formulas():
    prob = problem1()
    assert prob.exact_u(1.0, np.array([0.0]))[0] == pytest.approx(E - 1.0)
    assert prob.exact_v(0.7, np.array([0.0]))[0] == 0.0
    assert prob.f(1.0, np.array([PI / 4]))[0] == pytest.approx((2.0 * E - 1.0) * math.cos(PI / 4))
    assert prob.divisibility == 2


def test_problem2_formulas():
    prob = problem2()
    assert prob.exact_u(1.0, np.array([PI]))[0] == pytest.approx(-(E - 1.0))
    assert prob.exact_u(1.0, np.array([0.0]))[0] == pytest.approx(-(E - 1.0))
    assert prob.exact_v(0.4, np.array([PI / 2]))[0] == pytest.approx(PI / 2)
    # v is not zero at t = 0 on (0, 3pi/2)
    x = np.array([-1.0, 1.0, 4.0])
    np.testing.assert_allclose(prob.exact_v(0.0, x), [0.0, 1.0, 2.0 * PI - 4.0])
    assert prob.divisibility == 6
    assert max(prob.default_sweep) == 96


@pytest.mark.parametrize("factory", [problem1, problem2, manufactured_smooth, lambda: manufactured_smooth(3)])
def test_exact_solutions_satisfy_the_equations(factory, rng):
    prob = factory()
    x = rng.uniform(prob.layout.x_left, prob.layout.x_right, 100)
    for t in rng.uniform(0.05, 1.0, 5):
        r_u, r_v = residual(prob, t, x)
        assert np.max(np.abs(r_u)) <= 1e-9
        assert np.max(np.abs(r_v)) <= 1e-9


@pytest.mark.parametrize("p, q", [(1, 1), (2, 3), (4, 2)])
def test_polynomial_problems_satisfy_the_equations(p, q, rng):
    prob = manufactured_polynomial(p, q)
    x = rng.uniform(0.0, 1.0, 50)
    r_u, r_v = residual(prob, 0.5, x)
    assert np.max(np.abs(r_u)) <= 1e-9
    assert np.max(np.abs(r_v)) <= 1e-9
    assert prob.exact_u(0.0, x) == pytest.approx(np.zeros_like(x))


def test_traces_are_continuous_across_interfaces():
    eps = 1e-12
    prob = problem1()
    for t in (0.3, 1.0):
        for func in (prob.exact_u, prob.exact_v):
            assert func(t, np.array([-eps]))[0] == pytest.approx(func(t, np.array([eps]))[0], abs=1e-10)
    prob = problem2()
    for x in (0.0, PI / 2, PI):
        left = prob.exact_v(0.5, np.array([x - eps]))[0]
        assert left == pytest.approx(prob.exact_v(0.5, np.array([x + eps]))[0], abs=1e-10)


@pytest.mark.parametrize("factory", [problem1, problem2])
def test_derivative_transmission_at_type_change(factory):
    # d_x u(t, 0+) = int_0^t d_x u(s, 0-) ds
    eps = 1e-12
    prob = factory()
    for t in (0.25, 0.5, 1.0):
        right = prob.du_dx(t, np.array([eps]))[0]
        integral, _ = quad(lambda s: prob.du_dx(s, np.array([-eps]))[0], 0.0, t)
        assert right == pytest.approx(integral, abs=1e-8)


def test_initial_states():
    prob = problem1()
    system = prob.spatial_system(8, 2)
    np.testing.assert_allclose(prob.initial_state(system), 0.0, atol=1e-15)
    prob = problem2()
    system = prob.spatial_system(6, 2)
    x0 = prob.initial_state(system)
    assert np.max(np.abs(x0[system.n_u:])) > 1.0
    # M0 does not see the non-zero part
    assert abs(x0 @ (system.m0 @ x0)) < 1e-12


def test_cell_counts_checked():
    with pytest.raises(ConfigError):
        problem1().check_cells(7)
    with pytest.raises(ConfigError):
        problem2().check_cells(8)
    problem2().check_cells(12)


def test_invalid_time_degree():
    with pytest.raises(ConfigError):
        manufactured_smooth(0)
    with pytest.raises(ConfigError):
        manufactured_polynomial(0, 1)


def test_registry_lookup():
    assert get_problem("prob1").name == "prob1"
    assert {"prob1", "prob2", "smooth"} <= set(get_registry("problem"))
    with pytest.raises(ConfigError, match="Unknown problem"):
        get_problem("prob3")


def test_smooth_problem_data():
    prob = manufactured_smooth()
    x = np.linspace(0.0, 1.0, 11)
    t = 0.6
    np.testing.assert_allclose(prob.f(t, x), (np.exp(t) - PI * np.expm1(t)) * np.sin(PI * x), atol=1e-14)
    np.testing.assert_allclose(prob.g(t, x), (np.exp(t) + PI * np.expm1(t)) * np.cos(PI * x), atol=1e-14)
    assert prob.exact_u(t, np.array([0.0, 1.0])) == pytest.approx([0.0, 0.0], abs=1e-15)
