"""
Benchmark problems with known solutions. Every callable takes (t, x) with x a
numpy array and is only meant for t >= 0, where the time indicator of the
right-hand sides equals one.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from evodg.exceptions import ConfigError
from modules.space1d.functions import (
    CHANGING_TYPE_PATTERN,
    MaterialLayout,
    SpatialSystem1D,
    assemble,
    build_mesh,
    interpolate,
)

logger = logging.getLogger(__name__)

SpaceTimeFunction = Callable[[float, np.ndarray], np.ndarray]

PI = np.pi


def _indicator(x, a: float, b: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return ((x >= a) & (x < b)).astype(float)


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    name: str
    layout: MaterialLayout
    f: SpaceTimeFunction
    g: SpaceTimeFunction
    exact_u: SpaceTimeFunction
    exact_v: SpaceTimeFunction
    du_dx: SpaceTimeFunction
    dv_dx: SpaceTimeFunction
    divisibility: int = 1
    breakpoints: Tuple[float, ...] = ()
    default_sweep: Tuple[int, ...] = (8, 16, 32, 64, 128)
    rho: float = 1.0
    T: float = 1.0
    pattern: dict = field(default_factory=lambda: dict(CHANGING_TYPE_PATTERN))

    def check_cells(self, N: int) -> None:
        if int(N) != N or N < 1 or N % self.divisibility:
            raise ConfigError(
                f"N={N} is not valid for problem '{self.name}'; N must be a positive multiple of {self.divisibility}."
            )

    def spatial_system(self, N: int, p: int) -> SpatialSystem1D:
        self.check_cells(N)
        cells = build_mesh(self.layout, N, self.breakpoints)
        return assemble(cells, p, self.layout, self.pattern)

    def load_provider(self, system: SpatialSystem1D) -> Callable[[float], np.ndarray]:
        def load(t: float) -> np.ndarray:
            return system.load(lambda x: self.f(t, x), lambda x: self.g(t, x))

        return load

    def initial_state(self, system: SpatialSystem1D) -> np.ndarray:
        """V_h interpolant of the exact solution at t = 0."""
        return interpolate(system, lambda x: self.exact_u(0.0, x), lambda x: self.exact_v(0.0, x))

    def coefficients_at(self, x) -> np.ndarray:
        """(m0_u, m0_v, m1_u, m1_v) at each point of x."""
        return np.array([self.pattern[self.layout.region_at(xi)] for xi in np.atleast_1d(x)])


def problem1() -> BenchmarkProblem:
    """Hyperbolic on (-pi/2, 0), parabolic on (0, pi/2), smooth data."""
    hyp = lambda x: _indicator(x, -PI / 2, 0.0)
    layout = MaterialLayout(-PI / 2, PI / 2, {"hyp": ((-PI / 2, 0.0),), "par": ((0.0, PI / 2),)})
    return BenchmarkProblem(
        name="prob1",
        layout=layout,
        f=lambda t, x: (2.0 * np.exp(t) - 1.0 - t * hyp(x)) * np.cos(x),
        g=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
        exact_u=lambda t, x: np.expm1(t) * np.cos(x),
        exact_v=lambda t, x: (np.expm1(t) - t * hyp(x)) * np.sin(x),
        du_dx=lambda t, x: -np.expm1(t) * np.sin(x),
        dv_dx=lambda t, x: (np.expm1(t) - t * hyp(x)) * np.cos(x),
        divisibility=2,
        default_sweep=(8, 16, 32, 64, 128),
    )


def problem2() -> BenchmarkProblem:
    """
    Same type layout on (-3pi/2, 3pi/2) with L2 data jumping at pi/2 and pi.
    The first summand of f carries the hyperbolic indicator 1_(-3pi/2, 0); the
    exact pair below satisfies the equations with this choice.
    """
    hyp = lambda x: _indicator(x, -1.5 * PI, 0.0)
    # +1 on (pi/2, 3pi/2), -1 on (-3pi/2, pi/2)
    flip_u = lambda x: _indicator(x, PI / 2, 1.5 * PI) - _indicator(x, -1.5 * PI, PI / 2)
    # +1 on (pi/2, 3pi/2), -1 on (0, pi/2)
    flip = lambda x: _indicator(x, PI / 2, 1.5 * PI) - _indicator(x, 0.0, PI / 2)
    left = lambda x: _indicator(x, 0.0, PI)
    right = lambda x: _indicator(x, PI, 1.5 * PI)
    ramp = lambda x: left(x) * x + right(x) * (2.0 * PI - x)
    decay = lambda t: np.exp(t) - t - 1.0

    layout = MaterialLayout(-1.5 * PI, 1.5 * PI, {"hyp": ((-1.5 * PI, 0.0),), "par": ((0.0, 1.5 * PI),)})
    return BenchmarkProblem(
        name="prob2",
        layout=layout,
        f=lambda t, x: (
            -(2.0 * np.exp(t) - t - 1.0) * hyp(x) * np.cos(x)
            + np.exp(t) * flip(x) * np.cos(x)
            + left(x)
            - right(x)
        ),
        g=lambda t, x: ramp(x) - np.expm1(t) * flip(x) * np.sin(x),
        exact_u=lambda t, x: np.expm1(t) * flip_u(x) * np.cos(x),
        exact_v=lambda t, x: -decay(t) * hyp(x) * np.sin(x) + ramp(x),
        du_dx=lambda t, x: -np.expm1(t) * flip_u(x) * np.sin(x),
        dv_dx=lambda t, x: -decay(t) * hyp(x) * np.cos(x) + left(x) - right(x),
        divisibility=6,
        breakpoints=(PI / 2, PI),
        default_sweep=(12, 24, 48, 96),
    )


def _hyperbolic_unit_interval() -> MaterialLayout:
    return MaterialLayout(0.0, 1.0, {"hyp": ((0.0, 1.0),)})


def _separable(name, s, ds, U, dU, V, dV, divisibility=1, breakpoints=(), sweep=(4, 8, 16, 32)):
    """Hyperbolic problem on (0, 1) with u = s(t) U(x), v = s(t) V(x)."""
    return BenchmarkProblem(
        name=name,
        layout=_hyperbolic_unit_interval(),
        f=lambda t, x: ds(t) * U(x) + s(t) * dV(x),
        g=lambda t, x: ds(t) * V(x) + s(t) * dU(x),
        exact_u=lambda t, x: s(t) * U(x),
        exact_v=lambda t, x: s(t) * V(x),
        du_dx=lambda t, x: s(t) * dU(x),
        dv_dx=lambda t, x: s(t) * dV(x),
        divisibility=divisibility,
        breakpoints=breakpoints,
        default_sweep=sweep,
    )


def _time_profile(q_target: Optional[int]):
    if q_target is None:
        return np.expm1, np.exp
    if int(q_target) != q_target or q_target < 1:
        raise ConfigError(f"q_target must be a positive integer, got {q_target}.")
    q = int(q_target)
    return (lambda t: t**q), (lambda t: q * t ** (q - 1))


def manufactured_smooth(q_target: Optional[int] = None) -> BenchmarkProblem:
    """u = s sin(pi x), v = s cos(pi x) with s = e^t - 1, or t^q_target."""
    s, ds = _time_profile(q_target)
    return _separable(
        "smooth",
        s,
        ds,
        U=lambda x: np.sin(PI * x),
        dU=lambda x: PI * np.cos(PI * x),
        V=lambda x: np.cos(PI * x),
        dV=lambda x: -PI * np.sin(PI * x),
    )


def manufactured_polynomial(p: int, q: int) -> BenchmarkProblem:
    """
    Solution of degree q in time lying in V_h for spatial degree p: a hat in u
    (kink at 1/2) for p = 1, x (1 - x) (1 + x)^(p - 2) otherwise, and (1 + x)^p in v.
    """
    if p < 1:
        raise ConfigError(f"Spatial degree must be >= 1, got p={p}.")
    s, ds = _time_profile(q)
    V = Polynomial([1.0, 1.0]) ** p
    dV = V.deriv()
    if p == 1:
        U = lambda x: np.where(np.asarray(x) < 0.5, x, 1.0 - np.asarray(x))
        dU = lambda x: np.where(np.asarray(x) < 0.5, 1.0, -1.0)
        divisibility, breakpoints = 2, (0.5,)
    else:
        U = Polynomial([0.0, 1.0, -1.0]) * Polynomial([1.0, 1.0]) ** (p - 2)
        dU = U.deriv()
        divisibility, breakpoints = 1, ()
    return _separable(f"polynomial_p{p}_q{q}", s, ds, U, dU, V, dV, divisibility, breakpoints)


def _time_derivative(func: SpaceTimeFunction, t: float, x: np.ndarray, h: float) -> np.ndarray:
    return (-func(t + 2 * h, x) + 8 * func(t + h, x) - 8 * func(t - h, x) + func(t - 2 * h, x)) / (12.0 * h)


def residual(problem: BenchmarkProblem, t: float, x, step: float = 1e-4) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pointwise residual of (d_t M0 + M1 + A)(u, v) - (f, g) for the exact pair,
    with a fourth order central difference in time and the analytic space
    derivatives. Needs t >= 2 * step.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = problem.coefficients_at(x)
    du_dt = _time_derivative(problem.exact_u, t, x, step)
    dv_dt = _time_derivative(problem.exact_v, t, x, step)
    r_u = c[:, 0] * du_dt + c[:, 2] * problem.exact_u(t, x) + problem.dv_dx(t, x) - problem.f(t, x)
    r_v = c[:, 1] * dv_dt + c[:, 3] * problem.exact_v(t, x) + problem.du_dx(t, x) - problem.g(t, x)
    return r_u, r_v


def get_problem(name: str) -> BenchmarkProblem:
    from evodg.registry import get_function, get_registry
    import modules.problems.tools  # noqa: F401  registers the benchmark problems

    entry = get_function(name, group="problem")
    if entry is None:
        raise ConfigError(f"Unknown problem '{name}'; choose from {sorted(get_registry('problem'))}.")
    return entry["func"]()
