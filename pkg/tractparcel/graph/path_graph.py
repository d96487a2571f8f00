"""Path graphs, their normalized Laplacian and its eigendecomposition."""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
from numpy.linalg import LinAlgError
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.csgraph import breadth_first_order, connected_components

logger = logging.getLogger(__name__)

_ARRAY_CONFIG = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

SYMMETRY_TOL = 1e-12
# relative slack when looking for the largest-magnitude eigenvector entry
SIGN_TIE_TOL = 1e-9


class GraphError(ValueError):
    pass


class EigenSolveError(ValueError):
    pass


def _off_diagonal(m: sp.csr_matrix) -> sp.csr_matrix:
    out = (sp.triu(m, k=1) + sp.tril(m, k=-1)).tocsr()
    out.eliminate_zeros()
    out.sort_indices()
    return out


class PathGraph(BaseModel):
    """Weighted undirected graph stored as a symmetric CSR adjacency matrix.

    Base path graphs have unit weights on consecutive nodes; coarsened graphs carry
    non-negative real weights and may contain isolated (fake) nodes.
    """

    model_config = _ARRAY_CONFIG

    num_nodes: int = Field(ge=1)
    adjacency: sp.csr_matrix

    @field_validator("adjacency", mode="before")
    @classmethod
    def _as_symmetric_csr(cls, v):
        w = _off_diagonal(sp.csr_matrix(v, dtype=np.float64))
        if w.shape[0] != w.shape[1]:
            raise ValueError(f"adjacency must be square, got {w.shape}")
        if w.nnz and (w.data < 0).any():
            raise ValueError("edge weights must be non-negative")
        if w.nnz and abs(w - w.T).max() > SYMMETRY_TOL:
            raise ValueError("adjacency must be symmetric")
        return w

    @field_validator("adjacency")
    @classmethod
    def _matches_size(cls, w, info):
        n = info.data.get("num_nodes")
        if n is not None and w.shape[0] != n:
            raise ValueError(f"adjacency is {w.shape[0]}x{w.shape[0]}, expected {n}x{n}")
        return w

    @classmethod
    def from_edge_weights(cls, weights) -> "PathGraph":
        """Path graph whose i-th edge (i, i+1) has weight ``weights[i]``."""
        weights = np.asarray(weights, dtype=np.float64)
        n = len(weights) + 1
        idx = np.arange(n - 1)
        upper = sp.coo_matrix((weights, (idx, idx + 1)), shape=(n, n))
        return cls(num_nodes=n, adjacency=upper + upper.T)

    @property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @property
    def num_edges(self) -> int:
        return self.adjacency.nnz // 2

    def edges(self) -> list[tuple[int, int, float]]:
        upper = sp.triu(self.adjacency, k=1).tocoo()
        return sorted(zip(upper.row.tolist(), upper.col.tolist(), upper.data.tolist()))


class SpectralBasis(BaseModel):
    """Eigenvalues (ascending) and orthonormal eigenvectors, one per column."""

    model_config = _ARRAY_CONFIG

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return int(self.eigenvalues.shape[0])


def build_path_graph(n: int) -> PathGraph:
    """Path on ``n`` nodes with unit weight between consecutive nodes."""
    if n < 1:
        raise GraphError(f"a path graph needs at least 1 node, got {n}")
    return PathGraph.from_edge_weights(np.ones(n - 1))


def normalized_laplacian(g: PathGraph) -> sp.csr_matrix:
    """``I - D^{-1/2} W D^{-1/2}`` with zero rows and columns for isolated nodes."""
    degrees = g.degrees
    connected = degrees > 0
    d_inv_sqrt = np.zeros_like(degrees)
    d_inv_sqrt[connected] = 1.0 / np.sqrt(degrees[connected])
    D_inv_sqrt = sp.diags(d_inv_sqrt, format="csr")
    identity = sp.diags(connected.astype(np.float64), format="csr")
    return (identity - D_inv_sqrt @ g.adjacency @ D_inv_sqrt).tocsr()


def _path_order(pattern: sp.csr_matrix, nodes: np.ndarray) -> np.ndarray:
    if len(nodes) == 1:
        return nodes
    neighbor_counts = np.diff(pattern.indptr)[nodes]
    endpoints = nodes[neighbor_counts == 1]
    if len(endpoints) != 2:
        raise EigenSolveError(f"component starting at node {nodes[0]} is not a path")
    return breadth_first_order(pattern, int(endpoints.min()), directed=False, return_predecessors=False)


def _solve_component(sub: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if sub.shape[0] == 1:
        return sub.diagonal().copy(), np.ones((1, 1))
    if np.any(np.triu(sub, 2)):
        raise EigenSolveError("component matrix is not tridiagonal in path order")
    try:
        return eigh_tridiagonal(sub.diagonal(), sub.diagonal(1))
    except LinAlgError as e:
        raise EigenSolveError(f"tridiagonal eigensolver failed to converge: {e}") from e


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (ties: lowest index)."""
    mag = np.abs(vectors)
    peak = mag.max(axis=0)
    first = np.argmax(mag >= peak * (1.0 - SIGN_TIE_TOL), axis=0)
    signs = np.sign(vectors[first, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose(laplacian) -> SpectralBasis:
    """Eigendecomposition of a Laplacian whose connected components are paths.

    Each component is reordered along its path, solved as a symmetric tridiagonal
    problem, and the results are merged and sorted ascending (stable on ties).
    """
    L = sp.csr_matrix(laplacian, dtype=np.float64)
    n = L.shape[0]
    if L.shape != (n, n):
        raise EigenSolveError(f"laplacian must be square, got {L.shape}")
    scale = max(1.0, abs(L).max()) if L.nnz else 1.0
    if L.nnz and abs(L - L.T).max() > SYMMETRY_TOL * scale:
        raise EigenSolveError("laplacian is not symmetric")

    pattern = _off_diagonal(L)
    num_components, labels = connected_components(pattern, directed=False)

    values = []
    vectors = np.zeros((n, n))
    col = 0
    for c in range(num_components):
        order = _path_order(pattern, np.flatnonzero(labels == c))
        w, v = _solve_component(L[order][:, order].toarray())
        vectors[order, col : col + len(order)] = v
        values.append(w)
        col += len(order)

    eigenvalues = np.concatenate(values)
    idx = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[idx]
    eigenvectors = fix_signs(vectors[:, idx])
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    logger.debug(f"Eigendecomposed {n}x{n} laplacian with {num_components} components")
    return SpectralBasis(eigenvalues=eigenvalues, eigenvectors=eigenvectors)
