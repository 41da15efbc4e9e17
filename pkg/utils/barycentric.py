import numpy as np


def barycentric_weights(x_nodes) -> np.ndarray:
    """Barycentric weights 1 / prod_{k != j} (x_j - x_k)."""
    x = np.asarray(x_nodes, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def interpolation_matrix(x_nodes, x_eval, weights=None) -> np.ndarray:
    """
    Matrix of Lagrange basis values: row i holds l_j(x_eval[i]) for every node j,
    so that `L @ values` evaluates the interpolant at `x_eval`.
    """
    x_nodes = np.asarray(x_nodes, dtype=float)
    x_eval = np.atleast_1d(np.asarray(x_eval, dtype=float))
    w = barycentric_weights(x_nodes) if weights is None else np.asarray(weights)

    diff = x_eval[:, None] - x_nodes[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    L = w[None, :] / diff
    L /= L.sum(axis=1, keepdims=True)

    # Points that coincide with a node get the Kronecker row.
    rows, cols = np.nonzero(exact)
    L[rows, :] = 0.0
    L[rows, cols] = 1.0
    return L


def differentiation_matrix(x_nodes, weights=None) -> np.ndarray:
    """D[i, j] = l_j'(x_i); rows sum to zero."""
    x = np.asarray(x_nodes, dtype=float)
    n = x.size
    if n == 1:
        return np.zeros((1, 1))
    w = barycentric_weights(x) if weights is None else np.asarray(weights)

    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    # negative sum trick
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def derivative_matrix(x_nodes, x_eval, weights=None) -> np.ndarray:
    """
    Derivatives of the Lagrange basis at arbitrary points. The derivative of
    an interpolant has lower degree, so it is interpolated exactly from its
    nodal values D @ values.
    """
    L = interpolation_matrix(x_nodes, x_eval, weights)
    return L @ differentiation_matrix(x_nodes, weights)
