from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
import scipy.sparse as sparse


# -------------------- Base Interface --------------------
class SpatialDiscretisation(ABC):
    """
    Everything the slab solver needs from a spatial discretisation: the Gram
    matrix of the dof basis, the two material matrices, the skew coupling and
    a load assembler.
    """

    @property
    @abstractmethod
    def gram(self) -> sparse.csr_matrix:
        pass

    @property
    @abstractmethod
    def m0(self) -> sparse.csr_matrix:
        pass

    @property
    @abstractmethod
    def m1(self) -> sparse.csr_matrix:
        pass

    @property
    @abstractmethod
    def a(self) -> sparse.csr_matrix:
        pass

    @abstractmethod
    def load(self, f, g=None) -> np.ndarray:
        """Dof vector of the right-hand side (f, g) at one instant."""
        pass

    @property
    def size(self) -> int:
        return self.gram.shape[0]


# -------------------- Finite-dimensional systems --------------------
class ScalarSystem(SpatialDiscretisation):
    """
    A system of ODEs  M0 x' + (M1 + A) x = f  on R^n with the Euclidean inner
    product (or a user Gram matrix); n = 1 gives the scalar test equations.
    """

    def __init__(self, m0, m1=None, a=None, gram=None):
        m0 = sparse.csr_matrix(np.atleast_2d(np.asarray(m0, dtype=float)))
        n = m0.shape[0]
        if m0.shape != (n, n):
            raise ValueError(f"M0 must be square, got shape {m0.shape}.")

        def _matrix(value, default) -> sparse.csr_matrix:
            if value is None:
                return default
            matrix = sparse.csr_matrix(np.atleast_2d(np.asarray(value, dtype=float)))
            if matrix.shape != (n, n):
                raise ValueError(f"Expected a {n}x{n} matrix, got shape {matrix.shape}.")
            return matrix

        self._m0 = m0
        self._m1 = _matrix(m1, sparse.csr_matrix((n, n)))
        self._a = _matrix(a, sparse.csr_matrix((n, n)))
        self._gram = _matrix(gram, sparse.identity(n, format="csr"))

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

    def load(self, f, g=None) -> np.ndarray:
        return self._gram @ np.atleast_1d(np.asarray(f, dtype=float))


# -------------------- Factory Function --------------------
def get_spatial_system(kind: str, **kwargs) -> SpatialDiscretisation:
    kind = kind.lower()
    if kind == "1d":
        from modules.space1d.functions import assemble

        return assemble(**kwargs)
    elif kind in ("scalar", "ode"):
        return ScalarSystem(**kwargs)
    else:
        raise ValueError(f"Unknown spatial system: {kind}")


def as_dense(matrix: Optional[sparse.spmatrix]) -> np.ndarray:
    return matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix)
