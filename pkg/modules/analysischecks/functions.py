"""
Machine checks of the inequalities behind the stability and interpolation
estimates. Everything is scalar valued on the unit slab (0, 1] with weight
exp(-2 rho t), i.e. the reference rule with decay a = rho mapped by
t = (x + 1) / 2.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre as leg

from modules.quadrature.functions import (
    chi_weighted_norm,
    lowest_node_gap,
    radau_rule,
)
from modules.temporal.functions import TimeMesh, interpolate_P, interpolate_Phat, slab_bases
from utils.barycentric import barycentric_weights, interpolation_matrix

logger = logging.getLogger(__name__)

_AUX_X, _AUX_W = leg.leggauss(64)
# 64-point Gauss-Legendre on (0, 1)
_UNIT_T = 0.5 * (_AUX_X + 1.0)
_UNIT_W = 0.5 * _AUX_W


@dataclass
class CheckConfig:
    q_values: Tuple[int, ...] = (1, 2, 3, 4)
    rho_values: Tuple[float, ...] = (0.5, 1.0, 2.0)
    lambda_q_values: Tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    order_q_values: Tuple[int, ...] = (1, 2, 3)
    trials: int = 1000
    seed: int = 42
    slack: float = 1e-10
    order_slack: float = 0.1
    a_max: float = 10.0
    chi_factor: float = 10.0
    lowest_node_min: float = 1e-3
    continuity_step: float = 1e-6
    continuity_tol: float = 1e-4

    def __post_init__(self):
        if self.slack < 0.0 or self.order_slack < 0.0:
            raise ValueError("Slack tolerances must be non-negative.")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}.")


def unit_rule(q: int, rho: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the right-sided Radau rule on (0, 1] for exp(-2 rho t)."""
    rule = radau_rule(rho, q)
    return 0.5 * (rule.nodes + 1.0), 0.5 * rule.weights


def akmak_margins(q: int, rho: float, trials: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per trial: LHS - RHS1 and RHS1 - RHS2 of the chain

        <p', p~> + p(0) p~(0) >= (|p(1)|^2 e^{-2rho} + <p~, p~>)/2 + rho <p, p~>
                              >= (|p(1)|^2 e^{-2rho} + <p, p>)/2 + rho <p, p>

    for random p in P_q, p~ interpolating p(t)/t at the rule nodes. All
    pairings are evaluated with the rule, exact for the integrands involved.
    """
    t, w = unit_rule(q, rho)
    rng = np.random.default_rng(seed)
    coef = rng.uniform(-1.0, 1.0, size=(trials, q + 1))

    V = np.vander(t, q + 1, increasing=True)
    dV = np.zeros_like(V)
    dV[:, 1:] = V[:, :-1] * np.arange(1, q + 1)
    p = coef @ V.T
    dp = coef @ dV.T
    p0 = coef[:, 0]
    p1 = coef.sum(axis=1)

    tilde = p / t
    tilde0 = tilde @ interpolation_matrix(t, [0.0])[0]

    boundary = p1**2 * math.exp(-2.0 * rho)
    lhs = (dp * tilde) @ w + p0 * tilde0
    rhs1 = 0.5 * (boundary + (tilde**2) @ w) + rho * ((p * tilde) @ w)
    rhs2 = 0.5 * (boundary + (p**2) @ w) + rho * ((p**2) @ w)
    return lhs - rhs1, rhs1 - rhs2


def check_akmak(q: int, rho: float, trials: int = 1000, seed: int = 42) -> float:
    """Worst margin over both inequalities and all trials."""
    first, second = akmak_margins(q, rho, trials, seed)
    return float(min(first.min(), second.min()))


def _lambda_values(q: int, rho: float):
    t, _ = unit_rule(q, rho)
    bary = barycentric_weights(t)
    return t, bary, interpolation_matrix(t, _UNIT_T, bary) @ (1.0 / t)


def check_lambda(q: int, rho: float) -> float:
    """<Lambda, 1 - t Lambda>_rho for Lambda in P_q with Lambda(t_i) = 1/t_i."""
    if int(q) != q or q < 0:
        raise ValueError(f"q must be a non-negative integer, got {q}.")
    _, _, lam = _lambda_values(int(q), rho)
    return float(np.sum(_UNIT_W * np.exp(-2.0 * rho * _UNIT_T) * lam * (1.0 - _UNIT_T * lam)))


def check_lambda_closed_form(q: int, rho: float) -> float:
    """alpha^2 int_0^1 e^{-2 rho t} prod_{i<q} (t - t_i)^2 (1 - t) dt, alpha the leading coefficient of Lambda."""
    if int(q) != q or q < 0:
        raise ValueError(f"q must be a non-negative integer, got {q}.")
    t, bary, _ = _lambda_values(int(q), rho)
    alpha = float(np.sum(bary / t))
    nodal = np.prod((_UNIT_T[:, None] - t[None, :-1]) ** 2, axis=1)
    integrand = np.exp(-2.0 * rho * _UNIT_T) * nodal * (1.0 - _UNIT_T)
    return alpha**2 * float(np.sum(_UNIT_W * integrand))


def smooth_profile(t: float) -> float:
    return math.exp(t) * (1.0 + t)


def smooth_profile_dt(t: float) -> float:
    return math.exp(t) * (2.0 + t)


def _slope(taus: Sequence[float], errors: Sequence[float]) -> float:
    return float(np.polyfit(np.log(taus), np.log(errors), 1)[0])


def interpolation_errors(
    q: int,
    M: int,
    func: Callable[[float], float] = smooth_profile,
    dfunc: Callable[[float], float] = smooth_profile_dt,
    rho: float = 1.0,
    T: float = 1.0,
    samples: int = 33,
) -> Dict[str, float]:
    """
    On a uniform mesh with M slabs:
      dthat: Q,rho norm of d_t(V - P^ V) at the Radau nodes,
      jump:  max_m |(V - P V)(t_{m-1}+)|,
      sup:   max_t |(V - P V)(t)| over Chebyshev samples of every slab.
    """
    mesh = TimeMesh.uniform(T, M, rho, q)
    bases = slab_bases(mesh)
    PV = interpolate_P(func, mesh, bases)
    PhatV = interpolate_Phat(func, mesh, bases)
    k = np.arange(1, samples + 1)
    cheb = 0.5 * (np.cos((2 * k - 1) * np.pi / (2 * samples)) + 1.0)

    dthat, jump, sup = 0.0, 0.0, 0.0
    for basis in bases:
        exact_d = np.array([dfunc(t) for t in basis.nodes])
        diff = PhatV.derivative_on_slab(basis.m, basis.nodes) - exact_d
        dthat += float(basis.weights @ diff**2) * math.exp(-2.0 * rho * basis.t_left)
        jump = max(jump, abs(float(PV.right_limit(basis.m)) - func(basis.t_left)))
        ts = np.concatenate(([basis.t_left], basis.t_left + basis.tau * cheb, [basis.t_right]))
        values = PV.evaluate_on_slab(basis.m, ts)
        sup = max(sup, float(np.max(np.abs(values - np.array([func(t) for t in ts])))))
    return {"dthat": math.sqrt(dthat), "jump": jump, "sup": sup}


def check_interpolation_orders(
    q: int,
    func: Callable[[float], float] = smooth_profile,
    dfunc: Callable[[float], float] = smooth_profile_dt,
    rho: float = 1.0,
    T: float = 1.0,
    levels: Sequence[int] = (4, 8, 16, 32),
    floor: float = 1e-13,
) -> Dict[str, Optional[float]]:
    """
    Regression slopes of log error against log tau. A quantity whose errors
    all sit below `floor` (V in P_q) has no order and maps to None.
    """
    taus = [T / M for M in levels]
    rows = [interpolation_errors(q, M, func, dfunc, rho, T) for M in levels]
    out: Dict[str, Optional[float]] = {}
    for key in ("dthat", "jump", "sup"):
        errors = [row[key] for row in rows]
        out[key] = None if max(errors) < floor else _slope(taus, errors)
    return out


def check_lowest_node(q: int, a_max: float) -> float:
    """Distance of the lowest node from -1, minimised over decays in [0, a_max]."""
    return lowest_node_gap(a_max, q)


def check_chi_bound(q: int, a_max: float, samples: int = 41) -> float:
    """max_a ||chi_a||^2 / ||chi_0||^2 over a in [0, a_max]."""
    base = chi_weighted_norm(0.0, q)
    return max(chi_weighted_norm(a, q) for a in np.linspace(0.0, a_max, samples)) / base


def check_continuity(q: int, a_max: float, samples: int = 41, step: float = 1e-6) -> float:
    """
    Largest change of any node or weight when the decay moves from a to
    a + step, over `samples` values of a in [0, a_max - step].
    """
    if step <= 0.0 or step >= a_max:
        raise ValueError(f"step must lie in (0, a_max), got step={step}, a_max={a_max}.")
    worst = 0.0
    for a in np.linspace(0.0, a_max - step, samples):
        r0, r1 = radau_rule(a, q), radau_rule(a + step, q)
        change = max(np.max(np.abs(r1.nodes - r0.nodes)), np.max(np.abs(r1.weights - r0.weights)))
        worst = max(worst, float(change))
    return worst


def _entry(name: str, value, passed: bool, **params) -> dict:
    return {"name": name, **params, "value": value, "passed": bool(passed)}


def run_suite(config: Optional[CheckConfig] = None) -> dict:
    """Runs every check and returns a JSON-serialisable report."""
    config = config or CheckConfig()
    checks: List[dict] = []

    for q in config.q_values:
        for rho in config.rho_values:
            margin = check_akmak(q, rho, config.trials, config.seed)
            checks.append(_entry("akmak", margin, margin >= -config.slack, q=q, rho=rho))

    for q in config.lambda_q_values:
        for rho in config.rho_values:
            value = check_lambda(q, rho)
            closed = check_lambda_closed_form(q, rho)
            ok = value >= -config.slack and abs(value - closed) <= 1e-10 * max(1.0, abs(value))
            checks.append(_entry("lambda", value, ok, q=q, rho=rho, closed_form=closed))

    for q in config.order_q_values:
        slopes = check_interpolation_orders(q)
        ok = all(s is None or s >= q + 1 - config.order_slack for s in slopes.values())
        checks.append(_entry("interpolation_orders", slopes, ok, q=q))

    for q in config.q_values:
        gap = check_lowest_node(q, config.a_max)
        checks.append(_entry("lowest_node", gap, gap >= config.lowest_node_min, q=q, a_max=config.a_max))
        ratio = check_chi_bound(q, config.a_max)
        checks.append(_entry("chi_bound", ratio, ratio <= config.chi_factor, q=q, a_max=config.a_max))
        change = check_continuity(q, config.a_max, step=config.continuity_step)
        ok = math.isfinite(change) and change <= config.continuity_tol
        checks.append(
            _entry("continuity", change, ok, q=q, a_max=config.a_max, step=config.continuity_step)
        )

    passed = all(c["passed"] for c in checks)
    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        logger.warning("Failed checks: %s", ", ".join(sorted(set(failed))))
    return {"passed": passed, "config": asdict(config), "checks": checks}
