"""
Right-sided Gauss-Radau rules for the exponential weight

    w_a(x) = exp(-a (x + 1))   on (-1, 1],

exact for polynomials of degree 2q with q + 1 nodes, the last node fixed at 1.
The interior nodes are the roots of the degree-q orthogonal polynomial for the
modified weight (1 - x) w_a(x).
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from numpy.polynomial import Legendre, Polynomial
from numpy.polynomial import legendre as leg
from scipy.linalg import qr, solve_triangular

from evodg.exceptions import NumericalError
from utils.barycentric import interpolation_matrix

logger = logging.getLogger(__name__)

Q_MAX = 10
MAX_MOMENT = 2 * Q_MAX + 2
MAX_DECAY = 50.0
# Above this decay the integration-by-parts recurrence is forward stable (k/a < 1).
RECURRENCE_THRESHOLD = 30.0
AUX_POINTS = 64
# Largest admissible condition number of the R factor of the weighted Legendre basis.
MAX_CONDITION = 1.0 / (64 * np.finfo(float).eps)

_AUX_X, _AUX_W = leg.leggauss(AUX_POINTS)


@dataclass(frozen=True, eq=False)
class WeightedRadauRule:
    a: float
    q: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))


def _check_decay(a: float) -> float:
    a = float(a)
    if not math.isfinite(a) or a < 0.0:
        raise ValueError(f"Decay parameter must be a finite non-negative number, got a={a}.")
    if a > MAX_DECAY:
        raise ValueError(f"Decay parameter a={a} exceeds the supported maximum {MAX_DECAY}.")
    return a


def _check_order(q: int, minimum: int = 0) -> int:
    if int(q) != q or not minimum <= q <= Q_MAX:
        raise ValueError(f"Order q must be an integer in [{minimum}, {Q_MAX}], got q={q}.")
    return int(q)


def weight(a: float, x):
    """The weight exp(-a (x + 1)) evaluated at x."""
    return np.exp(-a * (np.asarray(x, dtype=float) + 1.0))


def moment(a: float, k: int) -> float:
    """mu_k(a) = int_{-1}^{1} x^k exp(-a (x + 1)) dx."""
    a = _check_decay(a)
    if int(k) != k or not 0 <= k <= MAX_MOMENT:
        raise ValueError(f"Moment index must be an integer in [0, {MAX_MOMENT}], got k={k}.")
    k = int(k)
    if a == 0.0:
        return 2.0 / (k + 1) if k % 2 == 0 else 0.0
    if a > RECURRENCE_THRESHOLD:
        return _moment_recurrence(a, k)
    return _moment_series(a, k)


def _moment_series(a: float, k: int) -> float:
    # exp(-a) * sum_n (-a)^n / n! * int x^(k+n); only k + n even survives, so
    # every surviving term carries the sign (-1)^k and nothing cancels.
    terms = []
    running = 0.0
    term = 1.0  # a^n / n!
    n = 0
    while n < 4000:
        if (k + n) % 2 == 0:
            value = term * 2.0 / (k + n + 1)
            terms.append(value)
            running += value
        n += 1
        term *= a / n
        if n > a and term < 1e-18 * running:
            break
    sign = -1.0 if k % 2 else 1.0
    return sign * math.exp(-a) * math.fsum(terms)


def _moment_recurrence(a: float, k: int) -> float:
    tail = math.exp(-2.0 * a)
    mu = -math.expm1(-2.0 * a) / a
    for j in range(1, k + 1):
        mu = math.fsum(((-1.0) ** j / a, -tail / a, j * mu / a))
    return mu


def _orthonormal_legendre(a: float, q: int) -> np.ndarray:
    """
    Legendre coefficients (columns) of the polynomials of degree 0..q that are
    orthonormal for (1 - x) w_a(x). The inner product is discretised with the
    64-point Gauss-Legendre rule and orthogonalised through a QR factorisation
    of the weighted Legendre-Vandermonde matrix.
    """
    dw = _AUX_W * (1.0 - _AUX_X) * weight(a, _AUX_X)
    V = leg.legvander(_AUX_X, q)
    _, R = qr(np.sqrt(dw)[:, None] * V, mode="economic")
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericalError(
            "Gram matrix of the weighted Legendre basis is numerically singular", a=a, q=q
        )
    return solve_triangular(R, np.eye(q + 1))


def orthogonal_polynomial(a: float, q: int) -> Polynomial:
    """Monic p_q orthogonal to P_{q-1} with respect to (1 - x) exp(-a (x + 1))."""
    a = _check_decay(a)
    q = _check_order(q, minimum=1)
    coef = _orthonormal_legendre(a, q)[:, q]
    p = Legendre(coef).convert(kind=Polynomial)
    return p / p.coef[-1]


def interior_nodes(a: float, q: int, polish: bool = True) -> np.ndarray:
    """
    The q roots of the orthogonal polynomial, ascending. Roots come from the
    eigenvalues of the Legendre companion matrix; `polish` adds two Newton steps.
    """
    a = _check_decay(a)
    q = _check_order(q, minimum=1)
    coef = _orthonormal_legendre(a, q)[:, q]
    roots = leg.legroots(coef)
    if np.iscomplexobj(roots):
        if np.max(np.abs(roots.imag)) > 1e-8:
            raise NumericalError("orthogonal polynomial has non-real roots", a=a, q=q)
        roots = roots.real
    roots = np.sort(roots)
    if polish:
        p = Legendre(coef)
        dp = p.deriv()
        for _ in range(2):
            roots = roots - p(roots) / dp(roots)
        roots = np.sort(roots)
    if (
        not np.all(np.isfinite(roots))
        or roots[0] <= -1.0
        or roots[-1] >= 1.0
        or np.any(np.diff(roots) <= 0.0)
    ):
        raise NumericalError("root polishing did not converge to q distinct roots in (-1, 1)", a=a, q=q)
    return roots


@lru_cache(maxsize=512)
def _build_rule(a: float, q: int) -> WeightedRadauRule:
    if q == 0:
        return WeightedRadauRule(a=a, q=0, nodes=np.array([1.0]), weights=np.array([moment(a, 0)]))

    nodes = np.append(interior_nodes(a, q), 1.0)
    # omega_j = int l_j(x) w_a(x) dx
    L = interpolation_matrix(nodes, _AUX_X)
    weights = (_AUX_W * weight(a, _AUX_X)) @ L

    if np.any(weights <= 0.0):
        raise NumericalError("non-positive quadrature weight", a=a, q=q)
    mass = moment(a, 0)
    if abs(weights.sum() - mass) > 1e-12 * mass:
        raise NumericalError("weights do not reproduce the zeroth moment", a=a, q=q)

    logger.debug("Built weighted Radau rule a=%.6g q=%d nodes=%s", a, q, nodes)
    return WeightedRadauRule(a=a, q=q, nodes=nodes, weights=weights)


def radau_rule(a: float, q: int) -> WeightedRadauRule:
    """Right-sided Gauss-Radau rule with q + 1 nodes for exp(-a (x + 1)) on (-1, 1]."""
    return _build_rule(_check_decay(a), _check_order(q))


def integrate(rule: WeightedRadauRule, f: Callable[[float], Union[float, np.ndarray]]):
    """sum_j omega_j f(r_j); f may return scalars or coefficient vectors."""
    values = np.stack([np.asarray(f(r), dtype=float) for r in rule.nodes])
    result = np.tensordot(rule.weights, values, axes=1)
    return float(result) if np.ndim(result) == 0 else result


def chi_polynomial(rule: WeightedRadauRule, x) -> np.ndarray:
    """The degree q + 1 polynomial vanishing at every node with value 1 at -1."""
    x = np.asarray(x, dtype=float)
    factors = (x[..., None] - rule.nodes) / (-1.0 - rule.nodes)
    return np.prod(factors, axis=-1)


def chi_weighted_norm(a: float, q: int) -> float:
    """int_{-1}^{1} chi^2 w_a with the 64-point auxiliary rule."""
    rule = radau_rule(a, q)
    chi = chi_polynomial(rule, _AUX_X)
    return float(np.sum(_AUX_W * weight(rule.a, _AUX_X) * chi**2))


def chi_norm_profile(a_values, q: int) -> np.ndarray:
    return np.array([chi_weighted_norm(a, q) for a in a_values])


def lowest_node_gap(a_max: float, q: int, samples: int = 101) -> float:
    """min over a in [0, a_max] of r_0(a) + 1."""
    grid = np.linspace(0.0, _check_decay(a_max), samples)
    return float(min(radau_rule(a, q).nodes[0] + 1.0 for a in grid))
