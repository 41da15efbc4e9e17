"""
Space-time error norms of a marched solution against an exact solution, rate
estimation and the convergence tables.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import legendre as leg

from modules.space1d.functions import SpatialSystem1D, l2_error
from modules.temporal.functions import SlabBasis, Trajectory, slab_bases

logger = logging.getLogger(__name__)

SUP_SAMPLES = 32
RHO_PANELS = 4
RHO_POINTS = 10

TABLE_COLUMNS = ["N", "E_sup", "rate", "E_Qrho", "rate", "E_rho", "rate"]


class ErrorField:
    """Evaluates t -> U(t) - U_h(t) in the spatial L2 norms."""

    def __init__(self, system: SpatialSystem1D, trajectory: Trajectory, exact_u: Callable, exact_v: Callable):
        self.system = system
        self.trajectory = trajectory
        self.exact_u = exact_u
        self.exact_v = exact_v

    def _squared(self, t: float, state: np.ndarray, weight: Optional[str]) -> float:
        value = l2_error(
            self.system,
            state,
            lambda x: self.exact_u(t, x),
            lambda x: self.exact_v(t, x),
            weight=weight,
        )
        return value * value

    def squared(self, t: float, side: str = "left", weight: Optional[str] = None) -> float:
        return self._squared(t, self.trajectory.evaluate(t, side), weight)

    def l2(self, t: float, side: str = "left") -> float:
        return math.sqrt(self.squared(t, side))

    def m0(self, t: float, side: str = "left") -> float:
        return math.sqrt(self.squared(t, side, weight="M0"))

    def on_slab(self, m: int, ts, weight: Optional[str] = None) -> np.ndarray:
        """Squared errors at times ts using the polynomial of slab m (one-sided at its ends)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        states = self.trajectory.evaluate_on_slab(m, ts)
        return np.array([self._squared(t, s, weight) for t, s in zip(ts, states)])


def q_rho_norm(error: ErrorField, bases: Optional[List[SlabBasis]] = None) -> float:
    """sqrt( sum_m sum_i (tau_m/2) omega_i ||e(t_{m,i})||^2 exp(-2 rho t_{m-1}) )."""
    mesh = error.trajectory.mesh
    bases = bases or slab_bases(mesh)
    total = 0.0
    for basis in bases:
        sq = error.on_slab(basis.m, basis.nodes)
        total += float(basis.weights @ sq) * math.exp(-2.0 * mesh.rho * basis.t_left)
    return math.sqrt(total)


def rho_norm(error: ErrorField, panels: int = RHO_PANELS, points: int = RHO_POINTS) -> float:
    """sqrt( int_0^T ||e(t)||^2 exp(-2 rho t) dt ) with composite Gauss-Legendre per slab."""
    mesh = error.trajectory.mesh
    x, w = leg.leggauss(points)
    total = 0.0
    for m in range(1, mesh.M + 1):
        edges = np.linspace(mesh.breakpoints[m - 1], mesh.breakpoints[m], panels + 1)
        half = 0.5 * np.diff(edges)
        ts = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * x[None, :]).ravel()
        ws = (half[:, None] * w[None, :]).ravel()
        sq = error.on_slab(m, ts)
        total += float(np.sum(ws * sq * np.exp(-2.0 * mesh.rho * ts)))
    return math.sqrt(total)


def sup_samples(t_left: float, t_right: float, samples: int = SUP_SAMPLES) -> np.ndarray:
    """
    Equispaced points t_left + j (t_right - t_left) / samples, j = 1..samples,
    of the half-open slab (t_left, t_right]. The right limit at t_left is the
    post-jump value and is not a point of the slab.
    """
    return t_left + (t_right - t_left) * np.arange(1, samples + 1) / samples


def e_sup(error: ErrorField, samples: int = SUP_SAMPLES, bases: Optional[List[SlabBasis]] = None) -> float:
    """
    sqrt( max_t <M0 e(t), e(t)> ), no exponential weight, over t = 0, the
    equispaced slab samples and the Radau nodes of every slab.
    """
    mesh = error.trajectory.mesh
    bases = bases or slab_bases(mesh)
    worst = error._squared(0.0, error.trajectory.initial, "M0")
    for basis in bases:
        ts = np.union1d(sup_samples(basis.t_left, basis.t_right, samples), basis.nodes)
        worst = max(worst, float(np.max(error.on_slab(basis.m, ts, weight="M0"))))
    return math.sqrt(worst)


def combined(e_sup_value: float, e_qrho_value: float) -> float:
    """E(v) = (E_sup^2 + |||v|||_{Q,rho}^2)^(1/2)."""
    return math.sqrt(e_sup_value**2 + e_qrho_value**2)


def measure(error: ErrorField, bases: Optional[List[SlabBasis]] = None) -> Dict[str, float]:
    return {
        "E_sup": e_sup(error, bases=bases),
        "E_Qrho": q_rho_norm(error, bases),
        "E_rho": rho_norm(error),
    }


def rates(values: Sequence[float], levels: Optional[Sequence[float]] = None) -> List[Optional[float]]:
    """
    Observed orders between consecutive levels, log2(e_k / e_{k+1}) for
    factor-two refinement or log(e_k / e_{k+1}) / log(N_{k+1} / N_k) when the
    levels are given. Non-positive errors give None.
    """
    if levels is not None and len(levels) != len(values):
        raise ValueError("values and levels must have the same length.")
    out: List[Optional[float]] = []
    for k in range(len(values) - 1):
        e0, e1 = values[k], values[k + 1]
        if not (e0 > 0.0 and e1 > 0.0):
            out.append(None)
            continue
        ratio = 2.0 if levels is None else levels[k + 1] / levels[k]
        out.append(math.log(e0 / e1) / math.log(ratio))
    return out


def _format_rate(rate: Optional[float]) -> str:
    return "" if rate is None else f"{rate:.2f}"


@dataclass
class ErrorReport:
    problem: str
    p: int
    q: int
    levels: List[int] = field(default_factory=list)
    e_sup: List[float] = field(default_factory=list)
    e_qrho: List[float] = field(default_factory=list)
    e_rho: List[float] = field(default_factory=list)
    level_name: str = "N"

    def add(self, N: int, values: Mapping[str, float]) -> None:
        self.levels.append(int(N))
        self.e_sup.append(float(values["E_sup"]))
        self.e_qrho.append(float(values["E_Qrho"]))
        self.e_rho.append(float(values["E_rho"]))

    def rates(self) -> Dict[str, List[Optional[float]]]:
        return {
            "E_sup": rates(self.e_sup, self.levels),
            "E_Qrho": rates(self.e_qrho, self.levels),
            "E_rho": rates(self.e_rho, self.levels),
        }

    def combined(self) -> List[float]:
        return [combined(s, q) for s, q in zip(self.e_sup, self.e_qrho)]

    def combined_rates(self) -> List[Optional[float]]:
        return rates(self.combined(), self.levels)

    def to_frame(self) -> pd.DataFrame:
        r = self.rates()
        rows = []
        for k, N in enumerate(self.levels):
            row = [str(N)]
            for key, values in (("E_sup", self.e_sup), ("E_Qrho", self.e_qrho), ("E_rho", self.e_rho)):
                row.append(f"{values[k]:.3e}")
                row.append("" if k == 0 else _format_rate(r[key][k - 1]))
            rows.append(row)
        return pd.DataFrame(rows, columns=[self.level_name] + TABLE_COLUMNS[1:])

    def to_csv(self, path=None) -> str:
        text = self.to_frame().to_csv(index=False, lineterminator="\n")
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def rate_matrix(reports: Mapping[Tuple[int, int], ErrorReport]) -> pd.DataFrame:
    """Finest-pair rate of E(U - U_h) per (p, q); rows p, columns q."""
    ps = sorted({p for p, _ in reports})
    qs = sorted({q for _, q in reports})
    frame = pd.DataFrame(index=pd.Index(ps, name="p"), columns=qs, dtype=object)
    for (p, q), report in reports.items():
        finest = report.combined_rates()[-1:] or [None]
        frame.loc[p, q] = _format_rate(finest[0])
    return frame.fillna("")
