"""
Per-slab block systems of the quadrature formulation and the march over slabs.

On slab m, with U = sum_i U_i phi_{m,i} and test functions phi_{m,j}, the
unknowns U_0..U_q satisfy

    sum_i [ w_j D_ji M0 + delta_ij w_j (M1 + A) + e_j e_i M0 ] U_i
        = w_j F_j + e_j M0 u_minus

with w_j the scaled Radau weights, D the physical differentiation matrix at
the nodes, e_i = phi_{m,i}(t_{m-1}) and u_minus = U(t_{m-1}-).
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sparse
from numpy.polynomial import legendre as leg
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import splu

from evodg.exceptions import NumericalError
from evodg.spatial import SpatialDiscretisation
from modules.temporal.functions import SlabBasis, TimeMesh, Trajectory, slab_bases

logger = logging.getLogger(__name__)

DENSE_LIMIT = 3000
RESIDUAL_TOL = 1e-10
ABSOLUTE_TOL = 1e-12

LoadProvider = Callable[[float], np.ndarray]


@dataclass
class SlabSystem:
    m: int
    K: sparse.csr_matrix
    b: np.ndarray
    n: int
    q: int

    @property
    def blocks(self) -> int:
        return self.q + 1


def _time_matrices(basis: SlabBasis):
    w = basis.weights
    return w[:, None] * basis.D, np.diag(w), basis.left_values


def _block_matrix(system: SpatialDiscretisation, T_der, T_mass, e) -> sparse.csr_matrix:
    m0 = system.m0
    stiff = (system.m1 + system.a).tocsr()
    K = (
        sparse.kron(sparse.csr_matrix(T_der), m0)
        + sparse.kron(sparse.csr_matrix(T_mass), stiff)
        + sparse.kron(sparse.csr_matrix(np.outer(e, e)), m0)
    )
    return K.tocsr()


def slab_matrix(system: SpatialDiscretisation, basis: SlabBasis) -> sparse.csr_matrix:
    return _block_matrix(system, *_time_matrices(basis))


def _check_vector(vector, n: int, what: str) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (n,):
        raise ValueError(f"{what} has shape {vector.shape}, expected ({n},).")
    return vector


def slab_rhs(system: SpatialDiscretisation, basis: SlabBasis, F: Sequence[np.ndarray], u_minus) -> np.ndarray:
    n = system.size
    q1 = basis.nodes.size
    if len(F) != q1:
        raise ValueError(f"Expected {q1} load vectors on slab {basis.m}, got {len(F)}.")
    F = np.stack([_check_vector(f, n, "Load vector") for f in F])
    jump = system.m0 @ _check_vector(u_minus, n, "Incoming state")
    b = basis.weights[:, None] * F + basis.left_values[:, None] * jump[None, :]
    return b.ravel()


def assemble_slab(system: SpatialDiscretisation, basis: SlabBasis, F: Sequence[np.ndarray], u_minus) -> SlabSystem:
    """Block system of slab `basis.m`; F holds the load vectors at the slab's Radau nodes."""
    return SlabSystem(
        m=basis.m,
        K=slab_matrix(system, basis),
        b=slab_rhs(system, basis, F, u_minus),
        n=system.size,
        q=basis.nodes.size - 1,
    )


def assemble_slab_exact(
    system: SpatialDiscretisation,
    basis: SlabBasis,
    load: LoadProvider,
    u_minus,
    points: int = 64,
) -> SlabSystem:
    """
    Reference assembly with every time integral against exp(-2 rho (t - t_{m-1}))
    evaluated by a high-order Gauss-Legendre rule instead of the Radau rule.
    """
    x, w = leg.leggauss(points)
    tau = basis.tau
    t = basis.t_left + 0.5 * tau * (x + 1.0)
    dw = 0.5 * tau * w * np.exp(-2.0 * basis.a / tau * (t - basis.t_left))
    phi = basis.values(t)
    dphi = basis.derivatives(t)
    # T[j, i] = int phi_i' phi_j, mass[j, i] = int phi_i phi_j
    T_der = phi.T @ (dw[:, None] * dphi)
    T_mass = phi.T @ (dw[:, None] * phi)
    K = _block_matrix(system, T_der, T_mass, basis.left_values)

    n = system.size
    loads = np.stack([_check_vector(load(ti), n, "Load vector") for ti in t])
    jump = system.m0 @ _check_vector(u_minus, n, "Incoming state")
    b = phi.T @ (dw[:, None] * loads) + basis.left_values[:, None] * jump[None, :]
    return SlabSystem(m=basis.m, K=K, b=b.ravel(), n=n, q=basis.nodes.size - 1)


class _Factorization:
    def __init__(self, K: sparse.csr_matrix):
        self.K = K
        if K.shape[0] <= DENSE_LIMIT:
            lu, piv = lu_factor(K.toarray(), check_finite=False)
            if np.any(np.diag(lu) == 0.0) or not np.all(np.isfinite(lu)):
                raise NumericalError("slab matrix is singular")
            self._solve = lambda b: lu_solve((lu, piv), b, check_finite=False)
            self.kind = "dense"
        else:
            try:
                factor = splu(K.tocsc())
            except RuntimeError as exc:
                raise NumericalError(f"slab matrix is singular: {exc}") from exc
            self._solve = factor.solve
            self.kind = "sparse"

    def solve(self, b: np.ndarray) -> np.ndarray:
        x = self._solve(b)
        if not np.all(np.isfinite(x)):
            raise NumericalError("slab solve produced non-finite values")
        residual = np.linalg.norm(self.K @ x - b)
        scale = np.linalg.norm(b)
        if (scale > 0.0 and residual > RESIDUAL_TOL * scale) or (scale == 0.0 and residual > ABSOLUTE_TOL):
            raise NumericalError("slab residual above tolerance", residual=f"{residual:.3e}", rhs=f"{scale:.3e}")
        return x


def solve_slab(slab: SlabSystem) -> np.ndarray:
    """Nodal states U_0..U_q of one slab as a (q + 1, n) array."""
    try:
        x = _Factorization(slab.K).solve(slab.b)
    except NumericalError as exc:
        raise NumericalError(str(exc), m=slab.m) from exc
    return x.reshape(slab.blocks, slab.n)


class SlabMarcher:
    """
    Marches the quadrature formulation over a time mesh for one spatial system.
    Factorizations are cached per slab length, so a uniform mesh is factorized once.
    """

    def __init__(self, system: SpatialDiscretisation, mesh: TimeMesh, bases: Optional[List[SlabBasis]] = None):
        self.system = system
        self.mesh = mesh
        self.bases = bases or slab_bases(mesh)
        self._factors: Dict[float, _Factorization] = {}

    def _factor(self, basis: SlabBasis) -> _Factorization:
        key = round(basis.tau, 14)
        factor = self._factors.get(key)
        if factor is None:
            factor = _Factorization(slab_matrix(self.system, basis))
            self._factors[key] = factor
            logger.debug("Factorized slab matrix (%s, size %d) for tau=%.6g", factor.kind, factor.K.shape[0], basis.tau)
        return factor

    def march(self, load: LoadProvider, x0) -> Trajectory:
        n = self.system.size
        u_minus = _check_vector(x0, n, "Initial datum")
        x0 = u_minus.copy()
        values = []
        for basis in self.bases:
            try:
                F = [load(t) for t in basis.nodes]
                b = slab_rhs(self.system, basis, F, u_minus)
                U = self._factor(basis).solve(b).reshape(basis.nodes.size, n)
            except NumericalError as exc:
                raise NumericalError(str(exc), m=basis.m) from exc
            values.append(U)
            # the last Radau node sits on t_m
            u_minus = U[-1]
        logger.debug("Marched %d slabs with %d factorization(s)", len(self.bases), len(self._factors))
        return Trajectory(
            mesh=self.mesh,
            nodes=[b.nodes for b in self.bases],
            values=values,
            initial=x0,
        )


def march(system: SpatialDiscretisation, mesh: TimeMesh, load: LoadProvider, x0) -> Trajectory:
    return SlabMarcher(system, mesh).march(load, x0)


def slab_energy(trajectory: Trajectory, system: SpatialDiscretisation) -> np.ndarray:
    """<M0 U(t_m-), U(t_m-)> exp(-2 rho t_m) for m = 0..M."""
    mesh = trajectory.mesh
    out = np.empty(mesh.M + 1)
    for m in range(mesh.M + 1):
        u = trajectory.left_limit(m)
        out[m] = float(u @ (system.m0 @ u)) * np.exp(-2.0 * mesh.rho * mesh.breakpoints[m])
    return out
