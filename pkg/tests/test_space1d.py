import math

import numpy as np
import pytest
from scipy.integrate import quad

from evodg.exceptions import ConfigError
from evodg.spatial import get_spatial_system
from modules.space1d.functions import (
    CHANGING_TYPE_PATTERN,
    MaterialLayout,
    assemble,
    build_mesh,
    coercivity_constant,
    evaluate,
    gauss_lobatto_nodes,
    interpolate,
    l2_error,
    load_vector,
    project,
    squared_errors,
)

PI = math.pi


@pytest.fixture
def unit_layout():
    return MaterialLayout(0.0, 1.0, {"hyp": ((0.0, 1.0),)})


@pytest.fixture
def prob1_layout():
    return MaterialLayout(-PI / 2, PI / 2, {"hyp": ((-PI / 2, 0.0),), "par": ((0.0, PI / 2),)})


def test_layout_validation():
    with pytest.raises(ValueError, match="overlap"):
        MaterialLayout(0.0, 1.0, {"hyp": ((0.0, 0.6),), "par": ((0.5, 1.0),)})
    with pytest.raises(ValueError, match="cover"):
        MaterialLayout(0.0, 1.0, {"hyp": ((0.0, 0.4),), "par": ((0.5, 1.0),)})
    with pytest.raises(ValueError, match="Unknown region"):
        MaterialLayout(0.0, 1.0, {"gas": ((0.0, 1.0),)})


def test_region_membership_is_half_open(prob1_layout):
    assert prob1_layout.region_at(-PI / 2) == "hyp"
    assert prob1_layout.region_at(-0.1) == "hyp"
    assert prob1_layout.region_at(0.0) == "par"
    assert prob1_layout.region_at(PI / 2) == "par"
    np.testing.assert_allclose(prob1_layout.breakpoints, [-PI / 2, 0.0, PI / 2])


def test_build_mesh_puts_interfaces_on_nodes(prob1_layout):
    cells = build_mesh(prob1_layout, 8)
    assert cells.size == 9
    assert cells[4] == 0.0
    assert cells[0] == -PI / 2 and cells[-1] == PI / 2


def test_build_mesh_reports_divisibility(prob1_layout):
    with pytest.raises(ConfigError, match="divisible by 2"):
        build_mesh(prob1_layout, 7)
    layout = MaterialLayout(-1.5 * PI, 1.5 * PI, {"hyp": ((-1.5 * PI, 0.0),), "par": ((0.0, 1.5 * PI),)})
    build_mesh(layout, 6, (PI / 2, PI))
    with pytest.raises(ConfigError, match="divisible by 6"):
        build_mesh(layout, 4, (PI / 2, PI))


def test_gauss_lobatto_nodes():
    np.testing.assert_allclose(gauss_lobatto_nodes(1), [-1.0, 1.0])
    np.testing.assert_allclose(gauss_lobatto_nodes(2), [-1.0, 0.0, 1.0], atol=1e-15)
    s = 1.0 / math.sqrt(5.0)
    np.testing.assert_allclose(gauss_lobatto_nodes(3), [-1.0, -s, s, 1.0], atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_matrix_structure(prob1_layout, k):
    N = 6
    system = assemble(build_mesh(prob1_layout, N), k, prob1_layout)
    assert system.n_u == N * k - 1
    assert system.n_v == N * k + 1
    assert system.size == 2 * N * k
    for matrix in (system.gram, system.m0, system.m1):
        dense = matrix.toarray()
        np.testing.assert_allclose(dense, dense.T, atol=1e-14)
    assert np.linalg.eigvalsh(system.gram.toarray()).min() > 0.0
    A = system.a.toarray()
    np.testing.assert_allclose(A, -A.T, atol=1e-13)


def test_cell_coefficients_follow_regions(prob1_layout):
    system = assemble(build_mesh(prob1_layout, 8), 2, prob1_layout)
    np.testing.assert_array_equal(system.coefficients[:4], [CHANGING_TYPE_PATTERN["hyp"]] * 4)
    np.testing.assert_array_equal(system.coefficients[4:], [CHANGING_TYPE_PATTERN["par"]] * 4)


def test_gram_integrates_constants(prob1_layout):
    system = assemble(build_mesh(prob1_layout, 4), 2, prob1_layout)
    x = interpolate(system, None, lambda x: np.ones_like(x))
    assert x @ (system.gram @ x) == pytest.approx(PI, rel=1e-13)
    # M0 only sees v on the hyperbolic half
    assert x @ (system.m0 @ x) == pytest.approx(PI / 2, rel=1e-13)


def test_coupling_is_exact_in_the_discrete_space(unit_layout):
    system = assemble(build_mesh(unit_layout, 3), 2, unit_layout)
    x = interpolate(system, lambda x: x * (1.0 - x), lambda x: x**2)
    Ax = system.a @ x
    n_u = system.n_u
    assert x[:n_u] @ Ax[:n_u] == pytest.approx(1.0 / 6.0, rel=1e-12)
    assert x[n_u:] @ Ax[n_u:] == pytest.approx(-1.0 / 6.0, rel=1e-12)


def test_load_vector_is_exact_for_polynomials(unit_layout):
    system = assemble(build_mesh(unit_layout, 4), 2, unit_layout)
    x = interpolate(system, lambda x: x * (1.0 - x), lambda x: x**2)
    load = load_vector(system, lambda x: np.ones_like(x), lambda x: x)
    assert x @ load == pytest.approx(1.0 / 6.0 + 1.0 / 4.0, rel=1e-12)
    np.testing.assert_allclose(system.load(lambda x: x, None), load_vector(system, lambda x: x, None))


def test_l2_error(prob1_layout):
    system = assemble(build_mesh(prob1_layout, 8), 2, prob1_layout)
    zero = np.zeros(system.size)
    assert l2_error(system, zero, np.cos, None) == pytest.approx(math.sqrt(PI / 2), rel=1e-10)
    # M0 weights v on the hyperbolic half only
    assert l2_error(system, zero, None, np.sin, weight="M0") == pytest.approx(math.sqrt(PI / 4), rel=1e-10)
    su, sv = squared_errors(system, zero, np.cos, np.sin)
    assert su.sum() + sv.sum() == pytest.approx(l2_error(system, zero, np.cos, np.sin) ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        l2_error(system, zero, None, None, weight="M2")


@pytest.mark.parametrize("k", [1, 2, 4])
def test_interpolant_of_discrete_function_has_zero_error(unit_layout, k):
    system = assemble(build_mesh(unit_layout, 5), k, unit_layout)
    u = (lambda x: x * (1.0 - x) ** (k - 1)) if k > 1 else (lambda x: 0.0 * x)
    v = lambda x: (1.0 + x) ** k
    x = interpolate(system, u, v)
    assert l2_error(system, x, u, v) < 1e-12


def test_evaluate_at_arbitrary_points(unit_layout, rng):
    system = assemble(build_mesh(unit_layout, 4), 3, unit_layout)
    u = lambda x: x * (1.0 - x) * (2.0 + x)
    v = lambda x: 1.0 - 3.0 * x**3
    x = interpolate(system, u, v)
    points = np.concatenate(([0.0, 0.25, 1.0], rng.uniform(0.0, 1.0, 20)))
    uh, vh = evaluate(system, x, points)
    np.testing.assert_allclose(uh, u(points), atol=1e-13)
    np.testing.assert_allclose(vh, v(points), atol=1e-13)


def test_split_checks_length(unit_layout):
    system = assemble(build_mesh(unit_layout, 2), 1, unit_layout)
    with pytest.raises(ValueError):
        system.split(np.zeros(system.size + 1))


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_coercivity_of_changing_type_operator(prob1_layout, rho):
    system = assemble(build_mesh(prob1_layout, 4), 2, prob1_layout)
    # hyperbolic cells give rho, parabolic cells min(rho, 1)
    assert coercivity_constant(system, rho=rho) >= min(rho, 1.0) - 1e-10


def test_factory_builds_both_kinds(unit_layout):
    system = get_spatial_system("1d", cells=build_mesh(unit_layout, 2), k=1, layout=unit_layout)
    assert system.size == 4
    scalar = get_spatial_system("scalar", m0=[[2.0]])
    assert scalar.size == 1
    np.testing.assert_allclose(scalar.load(3.0), [3.0])
    with pytest.raises(ValueError):
        get_spatial_system("3d")


def test_linear_gram_on_one_cell(unit_layout):
    system = assemble(build_mesh(unit_layout, 1), 1, unit_layout)
    # u vanishes at both ends, so only the two v hat functions remain
    assert system.n_u == 0
    np.testing.assert_allclose(system.gram.toarray(), [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]], rtol=1e-14)


def test_load_vector_against_adaptive_quadrature(prob1_layout):
    system = assemble(build_mesh(prob1_layout, 8), 2, prob1_layout)
    load = load_vector(system, np.cos, np.cos)
    for j in range(system.size):
        unit = np.zeros(system.size)
        unit[j] = 1.0
        component = 0 if j < system.n_u else 1
        basis = lambda x: evaluate(system, unit, x)[component][0]
        expected, _ = quad(
            lambda x: math.cos(x) * basis(x), system.cells[0], system.cells[-1], points=system.cells[1:-1], limit=200
        )
        assert load[j] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_interpolation_error_order(unit_layout, k):
    u = lambda x: np.sin(PI * x)
    errors = []
    for N in (8, 16, 32):
        system = assemble(build_mesh(unit_layout, N), k, unit_layout)
        errors.append(l2_error(system, interpolate(system, u, u), u, u))
    for coarse, fine in zip(errors, errors[1:]):
        assert math.log2(coarse / fine) >= k + 1 - 0.1


def test_projection(unit_layout):
    system = assemble(build_mesh(unit_layout, 4), 2, unit_layout)
    u = lambda x: x * (1.0 - x)
    v = lambda x: 1.0 + x**2
    np.testing.assert_allclose(project(system, u, v), interpolate(system, u, v), atol=1e-13)

    smooth = lambda x: np.sin(PI * x)
    growth = lambda x: np.exp(x)
    x = project(system, smooth, growth)
    np.testing.assert_allclose(system.gram @ x, load_vector(system, smooth, growth), atol=1e-13)
    best = l2_error(system, x, smooth, growth)
    assert best <= l2_error(system, interpolate(system, smooth, growth), smooth, growth)
