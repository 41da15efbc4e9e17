"""
Time slabs, mapped weighted Gauss-Radau points and the piecewise polynomial
trajectories living on them.
"""
import logging
import threading
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from modules.quadrature.functions import WeightedRadauRule, radau_rule
from utils.barycentric import (
    barycentric_weights,
    derivative_matrix,
    differentiation_matrix,
    interpolation_matrix,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TimeMesh:
    breakpoints: np.ndarray
    rho: float
    q: int

    def __post_init__(self):
        t = np.asarray(self.breakpoints, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("A time mesh needs at least two breakpoints.")
        if t[0] != 0.0:
            raise ValueError(f"The first breakpoint must be 0, got {t[0]}.")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("Breakpoints must be strictly increasing.")
        if self.rho < 0.0:
            raise ValueError(f"rho must be non-negative, got {self.rho}.")
        if int(self.q) != self.q or self.q < 0:
            raise ValueError(f"q must be a non-negative integer, got {self.q}.")
        t.setflags(write=False)
        object.__setattr__(self, "breakpoints", t)

    @classmethod
    def uniform(cls, T: float, M: int, rho: float, q: int) -> "TimeMesh":
        if T <= 0.0 or M < 1:
            raise ValueError(f"Need T > 0 and M >= 1, got T={T}, M={M}.")
        return cls(np.linspace(0.0, T, M + 1), rho, q)

    @property
    def T(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def M(self) -> int:
        return self.breakpoints.size - 1

    @property
    def tau(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def slab_of(self, t: float, side: str = "left") -> int:
        """
        Index m of the slab owning t. `left` picks the slab with t in
        (t_{m-1}, t_m] (0 for the left limit at t = 0), `right` the slab with
        t in [t_{m-1}, t_m) (M at t = T).
        """
        T = self.T
        if t < 0.0 or t > T * (1.0 + 1e-14):
            raise ValueError(f"t={t} lies outside [0, {T}].")
        if side == "left":
            return int(min(np.searchsorted(self.breakpoints, t, side="left"), self.M))
        if side == "right":
            return int(min(np.searchsorted(self.breakpoints, t, side="right"), self.M))
        raise ValueError(f"side must be 'left' or 'right', got {side!r}.")


@dataclass(frozen=True, eq=False)
class _ReferenceBasis:
    rule: WeightedRadauRule
    bary: np.ndarray
    D: np.ndarray
    left_values: np.ndarray


_BASIS_CACHE = {}
_BASIS_LOCK = threading.Lock()


def _reference_basis(a: float, q: int) -> _ReferenceBasis:
    key = (round(float(a), 14), int(q))
    basis = _BASIS_CACHE.get(key)
    if basis is None:
        rule = radau_rule(key[0], q)
        bary = barycentric_weights(rule.nodes)
        basis = _ReferenceBasis(
            rule=rule,
            bary=bary,
            D=differentiation_matrix(rule.nodes, bary),
            left_values=interpolation_matrix(rule.nodes, [-1.0], bary)[0],
        )
        with _BASIS_LOCK:
            basis = _BASIS_CACHE.setdefault(key, basis)
    return basis


@dataclass(frozen=True, eq=False)
class SlabBasis:
    m: int
    t_left: float
    t_right: float
    a: float
    ref_nodes: np.ndarray
    ref_weights: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    bary: np.ndarray
    left_values: np.ndarray
    D: np.ndarray

    @property
    def tau(self) -> float:
        return self.t_right - self.t_left

    def values(self, t) -> np.ndarray:
        """phi_{m,i}(t) for every i (rows follow t)."""
        return interpolation_matrix(self.nodes, t, self.bary)

    def derivatives(self, t) -> np.ndarray:
        return derivative_matrix(self.nodes, t, self.bary)


def build_slab_basis(mesh: TimeMesh, m: int) -> SlabBasis:
    if not 1 <= m <= mesh.M:
        raise ValueError(f"Slab index must lie in [1, {mesh.M}], got m={m}.")
    t_left, t_right = float(mesh.breakpoints[m - 1]), float(mesh.breakpoints[m])
    tau = t_right - t_left
    ref = _reference_basis(mesh.rho * tau, mesh.q)
    nodes = t_left + 0.5 * tau * (ref.rule.nodes + 1.0)
    nodes[-1] = t_right
    return SlabBasis(
        m=m,
        t_left=t_left,
        t_right=t_right,
        a=ref.rule.a,
        ref_nodes=ref.rule.nodes,
        ref_weights=ref.rule.weights,
        nodes=nodes,
        weights=0.5 * tau * ref.rule.weights,
        bary=ref.bary,
        left_values=ref.left_values,
        D=(2.0 / tau) * ref.D,
    )


def slab_bases(mesh: TimeMesh) -> List[SlabBasis]:
    return [build_slab_basis(mesh, m) for m in range(1, mesh.M + 1)]


@dataclass
class Trajectory:
    """
    Piecewise polynomial in time, stored as values at per-slab interpolation
    nodes. `initial` is the value seen from the left of t = 0.
    """
    mesh: TimeMesh
    nodes: List[np.ndarray]
    values: List[np.ndarray]
    initial: np.ndarray

    def evaluate(self, t: float, side: str = "left") -> np.ndarray:
        m = self.mesh.slab_of(t, side)
        if m == 0:
            return np.array(self.initial, copy=True)
        return self.evaluate_on_slab(m, [t])[0]

    def derivative(self, t: float, side: str = "left") -> np.ndarray:
        m = self.mesh.slab_of(t, side)
        if m == 0:
            raise ValueError("No derivative is defined to the left of t = 0.")
        return self.derivative_on_slab(m, [t])[0]

    def evaluate_on_slab(self, m: int, ts) -> np.ndarray:
        L = interpolation_matrix(self.nodes[m - 1], ts)
        return np.tensordot(L, self.values[m - 1], axes=1)

    def derivative_on_slab(self, m: int, ts) -> np.ndarray:
        Dt = derivative_matrix(self.nodes[m - 1], ts)
        return np.tensordot(Dt, self.values[m - 1], axes=1)

    def right_limit(self, m: int) -> np.ndarray:
        """U(t_{m-1}+) from slab m."""
        return self.evaluate_on_slab(m, [self.mesh.breakpoints[m - 1]])[0]

    def left_limit(self, m: int) -> np.ndarray:
        """U(t_m-); the initial datum for m = 0."""
        if m == 0:
            return np.array(self.initial, copy=True)
        return self.evaluate_on_slab(m, [self.mesh.breakpoints[m]])[0]


def evaluate_trajectory(traj: Trajectory, t: float, side: str = "left") -> np.ndarray:
    return traj.evaluate(t, side)


def _sample(v: Callable, ts) -> np.ndarray:
    return np.stack([np.asarray(v(t), dtype=float) for t in ts])


def interpolate_P(v: Callable, mesh: TimeMesh, bases: Optional[List[SlabBasis]] = None) -> Trajectory:
    """Degree-q interpolant at the mapped Gauss-Radau points, (Pv)(0) = v(0)."""
    bases = bases or slab_bases(mesh)
    nodes = [b.nodes for b in bases]
    return Trajectory(
        mesh=mesh,
        nodes=nodes,
        values=[_sample(v, x) for x in nodes],
        initial=np.asarray(v(0.0), dtype=float),
    )


def interpolate_Phat(v: Callable, mesh: TimeMesh, bases: Optional[List[SlabBasis]] = None) -> Trajectory:
    """Degree-(q+1) interpolant using the left breakpoint as an extra point."""
    bases = bases or slab_bases(mesh)
    nodes = [np.concatenate(([b.t_left], b.nodes)) for b in bases]
    return Trajectory(
        mesh=mesh,
        nodes=nodes,
        values=[_sample(v, x) for x in nodes],
        initial=np.asarray(v(0.0), dtype=float),
    )
