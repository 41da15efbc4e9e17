"""
One-dimensional discretisation of the block operator

    (d_t M0 + M1 + [[0, d_x], [d_x, 0]]) (u, v) = (f, g)

with u continuous P_k vanishing at both ends and v continuous P_k without a
boundary condition (the interval version of Raviart-Thomas). Material
coefficients are constant per cell; cells never straddle region interfaces.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import scipy.sparse as sparse
from numpy.polynomial import Legendre
from numpy.polynomial import legendre as leg
from scipy.linalg import eigh
from scipy.sparse.linalg import spsolve

from evodg.exceptions import ConfigError
from evodg.spatial import SpatialDiscretisation
from utils.barycentric import derivative_matrix, interpolation_matrix

logger = logging.getLogger(__name__)

REGIONS = ("ell", "par", "hyp")

# region -> (M0 on u, M0 on v, M1 on u, M1 on v)
CHANGING_TYPE_PATTERN: Dict[str, Tuple[float, float, float, float]] = {
    "hyp": (1.0, 1.0, 0.0, 0.0),
    "par": (1.0, 0.0, 0.0, 1.0),
    "ell": (0.0, 0.0, 1.0, 1.0),
}

_GEOMETRY_TOL = 1e-12


@dataclass(frozen=True)
class MaterialLayout:
    x_left: float
    x_right: float
    regions: Dict[str, Tuple[Tuple[float, float], ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.x_left < self.x_right:
            raise ValueError(f"Empty interval ({self.x_left}, {self.x_right}).")
        unknown = set(self.regions) - set(REGIONS)
        if unknown:
            raise ValueError(f"Unknown region names {sorted(unknown)}; use {REGIONS}.")

        length = self.x_right - self.x_left
        tol = _GEOMETRY_TOL * length
        pieces = sorted(
            (float(a), float(b)) for intervals in self.regions.values() for a, b in intervals
        )
        for a, b in pieces:
            if not a < b:
                raise ValueError(f"Degenerate region interval ({a}, {b}).")
            if a < self.x_left - tol or b > self.x_right + tol:
                raise ValueError(f"Region interval ({a}, {b}) leaves the domain.")
        for (_, b0), (a1, _) in zip(pieces, pieces[1:]):
            if a1 < b0 - tol:
                raise ValueError("Regions overlap.")
        covered = sum(b - a for a, b in pieces)
        if abs(covered - length) > tol:
            raise ValueError("Regions do not cover the domain.")

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def breakpoints(self) -> np.ndarray:
        points = {self.x_left, self.x_right}
        for intervals in self.regions.values():
            for a, b in intervals:
                points.update((float(a), float(b)))
        return np.array(sorted(points))

    def region_at(self, x: float) -> str:
        """Region owning x; intervals are half-open [a, b) except at the right end."""
        for name, intervals in self.regions.items():
            for a, b in intervals:
                if a <= x < b or (x == b == self.x_right):
                    return name
        raise ValueError(f"x={x} lies in no region.")


class SpatialSystem1D(SpatialDiscretisation):
    def __init__(self, cells, k, layout, coefficients, ref_nodes, gram, m0, m1, a):
        self.cells = cells
        self.k = k
        self.layout = layout
        self.coefficients = coefficients  # (N, 4): m0_u, m0_v, m1_u, m1_v per cell
        self.ref_nodes = ref_nodes
        self._gram, self._m0, self._m1, self._a = gram, m0, m1, a

    @property
    def gram(self):
        return self._gram

    @property
    def m0(self):
        return self._m0

    @property
    def m1(self):
        return self._m1

    @property
    def a(self):
        return self._a

    @property
    def n_cells(self) -> int:
        return self.cells.size - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.cells)

    @property
    def n_nodes(self) -> int:
        return self.n_cells * self.k + 1

    @property
    def n_u(self) -> int:
        return self.n_nodes - 2

    @property
    def n_v(self) -> int:
        return self.n_nodes

    @property
    def u_dofs(self) -> np.ndarray:
        """Global node indices carrying u unknowns (boundary nodes eliminated)."""
        return np.arange(1, self.n_nodes - 1)

    @property
    def v_dofs(self) -> np.ndarray:
        return np.arange(self.n_nodes)

    @property
    def cell_dofs(self) -> np.ndarray:
        """(N, k+1) global node indices of every cell."""
        return self.k * np.arange(self.n_cells)[:, None] + np.arange(self.k + 1)[None, :]

    @property
    def nodes(self) -> np.ndarray:
        """Coordinates of all global nodes."""
        mid = 0.5 * (self.cells[:-1] + self.cells[1:])
        x = mid[:, None] + 0.5 * self.h[:, None] * self.ref_nodes[None, :]
        out = np.empty(self.n_nodes)
        out[self.cell_dofs] = x
        out[0], out[-1] = self.cells[0], self.cells[-1]
        out[:: self.k] = self.cells
        return out

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Nodal values of u (boundary zeros restored) and v."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise ValueError(f"Expected a dof vector of length {self.size}, got {x.shape}.")
        u = np.zeros(self.n_nodes)
        u[1:-1] = x[: self.n_u]
        return u, x[self.n_u:]

    def load(self, f, g=None) -> np.ndarray:
        return load_vector(self, f, g)


def gauss_lobatto_nodes(k: int) -> np.ndarray:
    if k < 1:
        raise ValueError(f"Spatial degree must be >= 1, got k={k}.")
    if k == 1:
        return np.array([-1.0, 1.0])
    interior = np.sort(Legendre.basis(k).deriv().roots().real)
    return np.concatenate(([-1.0], interior, [1.0]))


def _required_divisibility(layout: MaterialLayout, points: Iterable[float]) -> int:
    divisor = 1
    for p in points:
        frac = Fraction((p - layout.x_left) / layout.length).limit_denominator(1000)
        divisor = divisor * frac.denominator // math.gcd(divisor, frac.denominator)
    return divisor


def build_mesh(layout: MaterialLayout, N: int, extra_breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Uniform cell breakpoints with every interface and data jump on a mesh point."""
    if int(N) != N or N < 1:
        raise ConfigError(f"Cell count must be a positive integer, got N={N}.")
    N = int(N)
    h = layout.length / N
    mandatory = [
        float(p)
        for p in np.concatenate((layout.breakpoints, np.asarray(list(extra_breakpoints), dtype=float)))
        if layout.x_left < p < layout.x_right
    ]
    cells = layout.x_left + h * np.arange(N + 1)
    cells[-1] = layout.x_right
    for p in mandatory:
        s = (p - layout.x_left) / h
        j = int(round(s))
        if abs(s - j) > 1e-9:
            divisor = _required_divisibility(layout, mandatory)
            raise ConfigError(
                f"N={N} does not put the breakpoint x={p:.6g} on the mesh; "
                f"N must be divisible by {divisor}."
            )
        cells[j] = p
    return cells


def _cell_coefficients(layout: MaterialLayout, cells: np.ndarray, pattern) -> np.ndarray:
    mids = 0.5 * (cells[:-1] + cells[1:])
    return np.array([pattern[layout.region_at(x)] for x in mids], dtype=float)


def _assemble_nodes(k, cell_dofs, n_nodes, local, cell_scale) -> sparse.csr_matrix:
    """Sum the (k+1)x(k+1) local matrix, scaled per cell, into the global node space."""
    rows = np.broadcast_to(cell_dofs[:, :, None], (len(cell_scale), k + 1, k + 1))
    cols = np.broadcast_to(cell_dofs[:, None, :], (len(cell_scale), k + 1, k + 1))
    data = cell_scale[:, None, None] * local[None, :, :]
    return sparse.coo_matrix(
        (data.ravel(), (rows.ravel(), cols.ravel())), shape=(n_nodes, n_nodes)
    ).tocsr()


def assemble(
    cells: np.ndarray,
    k: int,
    layout: MaterialLayout,
    pattern: Optional[Dict[str, Tuple[float, float, float, float]]] = None,
) -> SpatialSystem1D:
    """Gram, weighted mass and skew coupling matrices on the combined (u, v) dofs."""
    pattern = pattern or CHANGING_TYPE_PATTERN
    cells = np.asarray(cells, dtype=float)
    N = cells.size - 1
    ref_nodes = gauss_lobatto_nodes(k)
    xg, wg = leg.leggauss(int(math.ceil(k)) + 2)
    phi = interpolation_matrix(ref_nodes, xg)
    dphi = derivative_matrix(ref_nodes, xg)

    mass_ref = phi.T @ (wg[:, None] * phi)
    # int phi_a d_x phi_b: the Jacobians h/2 and 2/h cancel.
    coupling_ref = phi.T @ (wg[:, None] * dphi)

    h = np.diff(cells)
    n_nodes = N * k + 1
    cell_dofs = k * np.arange(N)[:, None] + np.arange(k + 1)[None, :]
    coefficients = _cell_coefficients(layout, cells, pattern)

    def mass(scale):
        return _assemble_nodes(k, cell_dofs, n_nodes, mass_ref, 0.5 * h * scale)

    interior = np.arange(1, n_nodes - 1)
    ones = np.ones(N)
    mu = mass(ones)[interior][:, interior]
    mv = mass(ones)
    m0 = sparse.block_diag(
        (mass(coefficients[:, 0])[interior][:, interior], mass(coefficients[:, 1])), format="csr"
    )
    m1 = sparse.block_diag(
        (mass(coefficients[:, 2])[interior][:, interior], mass(coefficients[:, 3])), format="csr"
    )
    gram = sparse.block_diag((mu, mv), format="csr")

    coupling = _assemble_nodes(k, cell_dofs, n_nodes, coupling_ref, ones)
    a = sparse.bmat(
        [[None, coupling[interior, :]], [coupling[:, interior], None]], format="csr"
    )

    logger.debug("Assembled 1D system: N=%d k=%d dofs=%d", N, k, gram.shape[0])
    return SpatialSystem1D(cells, k, layout, coefficients, ref_nodes, gram, m0, m1, a)


def _cell_quadrature(system: SpatialSystem1D, points: int):
    xq, wq = leg.leggauss(points)
    mid = 0.5 * (system.cells[:-1] + system.cells[1:])
    x = mid[:, None] + 0.5 * system.h[:, None] * xq[None, :]
    return x, wq, interpolation_matrix(system.ref_nodes, xq)


def _evaluate(func: Optional[Callable], x: np.ndarray) -> np.ndarray:
    if func is None:
        return np.zeros_like(x)
    return np.broadcast_to(np.asarray(func(x), dtype=float), x.shape)


def load_vector(system: SpatialSystem1D, f: Optional[Callable], g: Optional[Callable]) -> np.ndarray:
    """(int f phi_i)_i on the u dofs followed by (int g psi_i)_i on the v dofs."""
    x, wq, phi = _cell_quadrature(system, system.k + 6)
    scale = 0.5 * system.h[:, None]
    out = []
    for func, dofs in ((f, system.u_dofs), (g, system.v_dofs)):
        local = (scale * _evaluate(func, x) * wq[None, :]) @ phi
        full = np.zeros(system.n_nodes)
        np.add.at(full, system.cell_dofs, local)
        out.append(full[dofs])
    return np.concatenate(out)


def _cell_values(system: SpatialSystem1D, x_dofs: np.ndarray, phi: np.ndarray):
    u, v = system.split(x_dofs)
    return u[system.cell_dofs] @ phi.T, v[system.cell_dofs] @ phi.T


def squared_errors(system: SpatialSystem1D, x_dofs, exact_u, exact_v) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cell int (u_h - u)^2 and int (v_h - v)^2."""
    x, wq, phi = _cell_quadrature(system, system.k + 6)
    uh, vh = _cell_values(system, x_dofs, phi)
    scale = 0.5 * system.h
    eu = uh - _evaluate(exact_u, x)
    ev = vh - _evaluate(exact_v, x)
    return scale * (eu**2 @ wq), scale * (ev**2 @ wq)


def l2_error(system: SpatialSystem1D, x_dofs, exact_u, exact_v, weight: Optional[str] = None) -> float:
    """
    L2(Omega)^2 norm of (u_h - u, v_h - v). With weight="M0" (or "M1") each
    component is weighted by the material coefficient of the cell.
    """
    su, sv = squared_errors(system, x_dofs, exact_u, exact_v)
    if weight is None:
        total = su.sum() + sv.sum()
    elif weight == "M0":
        total = system.coefficients[:, 0] @ su + system.coefficients[:, 1] @ sv
    elif weight == "M1":
        total = system.coefficients[:, 2] @ su + system.coefficients[:, 3] @ sv
    else:
        raise ValueError(f"Unknown weight {weight!r}; use None, 'M0' or 'M1'.")
    return float(math.sqrt(max(total, 0.0)))


def interpolate(system: SpatialSystem1D, u: Optional[Callable], v: Optional[Callable]) -> np.ndarray:
    """Nodal interpolant of (u, v) in the dof layout."""
    x = system.nodes
    return np.concatenate((_evaluate(u, x)[system.u_dofs], _evaluate(v, x)[system.v_dofs]))


def evaluate(system: SpatialSystem1D, x_dofs, points) -> Tuple[np.ndarray, np.ndarray]:
    """(u_h, v_h) at arbitrary points of the closed domain."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    cell = np.clip(np.searchsorted(system.cells, points, side="right") - 1, 0, system.n_cells - 1)
    mid = 0.5 * (system.cells[cell] + system.cells[cell + 1])
    xi = np.clip(2.0 * (points - mid) / system.h[cell], -1.0, 1.0)
    phi = interpolation_matrix(system.ref_nodes, xi)
    u, v = system.split(x_dofs)
    dofs = system.cell_dofs[cell]
    return np.sum(phi * u[dofs], axis=1), np.sum(phi * v[dofs], axis=1)


def coercivity_constant(system: SpatialDiscretisation, rho: float) -> float:
    """Smallest eigenvalue of rho M0 + M1 relative to the Gram matrix (dense; small systems)."""
    lhs = (rho * system.m0 + system.m1).toarray()
    return float(eigh(lhs, system.gram.toarray(), eigvals_only=True)[0])


def project(system: SpatialSystem1D, u: Optional[Callable], v: Optional[Callable]) -> np.ndarray:
    """L2(Omega) projection of (u, v) onto the discrete space, in the dof layout."""
    return spsolve(system.gram.tocsc(), load_vector(system, u, v))
