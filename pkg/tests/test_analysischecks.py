import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from modules.analysischecks.functions import (
    CheckConfig,
    akmak_margins,
    check_akmak,
    check_chi_bound,
    check_continuity,
    check_interpolation_orders,
    check_lambda,
    check_lambda_closed_form,
    check_lowest_node,
    interpolation_errors,
    run_suite,
    smooth_profile,
    smooth_profile_dt,
    unit_rule,
)


def test_unit_rule_lives_on_unit_slab():
    t, w = unit_rule(2, 1.0)
    assert t[-1] == 1.0
    assert np.all(t > 0.0)
    assert w.sum() == pytest.approx(-math.expm1(-2.0) / 2.0, rel=1e-12)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_stability_chain_holds(q, rho):
    assert check_akmak(q, rho, trials=1000, seed=42) >= -1e-10


def test_stability_chain_is_deterministic():
    first = akmak_margins(2, 1.0, trials=50, seed=7)
    second = akmak_margins(2, 1.0, trials=50, seed=7)
    np.testing.assert_array_equal(first[0], second[0])
    np.testing.assert_array_equal(first[1], second[1])
    assert first[0].shape == (50,)


@pytest.mark.parametrize("q", [0, 1, 2, 3, 4, 5])
@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_lambda_inequality(q, rho):
    value = check_lambda(q, rho)
    assert value >= -1e-10
    assert value == pytest.approx(check_lambda_closed_form(q, rho), rel=1e-10, abs=1e-14)


def test_lambda_for_constant_interpolant():
    rho = 1.0
    expected, _ = quad(lambda t: math.exp(-2.0 * rho * t) * (1.0 - t), 0.0, 1.0)
    assert check_lambda(0, rho) == pytest.approx(expected, rel=1e-12)


def test_lambda_rejects_negative_degree():
    with pytest.raises(ValueError):
        check_lambda(-1, 1.0)
    with pytest.raises(ValueError):
        check_lambda_closed_form(-1, 1.0)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_interpolation_orders(q):
    slopes = check_interpolation_orders(q)
    for key in ("dthat", "jump", "sup"):
        assert slopes[key] >= q + 1 - 0.1


def test_interpolation_errors_shrink():
    coarse = interpolation_errors(1, 4)
    fine = interpolation_errors(1, 8)
    for key in coarse:
        assert fine[key] < coarse[key]


def test_polynomial_in_trial_space_has_no_order():
    slopes = check_interpolation_orders(1, func=lambda t: 2.0 * t - 1.0, dfunc=lambda t: 2.0, levels=(2, 4))
    assert slopes == {"dthat": None, "jump": None, "sup": None}


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_rule_geometry_checks(q):
    assert check_lowest_node(q, 10.0) >= 1e-3
    assert check_chi_bound(q, 10.0) <= 10.0
    assert check_continuity(q, 10.0, samples=11) <= 1e-4


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5])
def test_rule_moves_little_under_small_decay_change(q):
    change = check_continuity(q, 10.0, samples=101, step=1e-6)
    assert 0.0 < change <= 1e-4


def test_continuity_rejects_bad_step():
    with pytest.raises(ValueError):
        check_continuity(1, 10.0, step=0.0)


def test_default_profile_is_not_a_polynomial():
    assert smooth_profile(1.0) == pytest.approx(2.0 * math.e)
    assert smooth_profile_dt(0.0) == pytest.approx(2.0)
    slopes = check_interpolation_orders(1, levels=(4, 8))
    assert all(s is not None for s in slopes.values())


def test_config_validation():
    with pytest.raises(ValueError):
        CheckConfig(trials=0)
    with pytest.raises(ValueError):
        CheckConfig(slack=-1.0)


def test_small_suite_is_serialisable():
    config = CheckConfig(
        q_values=(1,),
        rho_values=(1.0,),
        lambda_q_values=(0, 1),
        order_q_values=(1,),
        trials=20,
    )
    report = run_suite(config)
    assert report["passed"] is True
    names = {c["name"] for c in report["checks"]}
    assert names == {"akmak", "lambda", "interpolation_orders", "lowest_node", "chi_bound", "continuity"}
    decoded = json.loads(json.dumps(report))
    assert decoded["config"]["trials"] == 20
