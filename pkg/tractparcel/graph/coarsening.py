"""Graclus-style coarsening of path graphs into a binary-tree pooling hierarchy."""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict

from tractparcel.graph.path_graph import (
    GraphError,
    PathGraph,
    SpectralBasis,
    build_path_graph,
    eigendecompose,
    normalized_laplacian,
)

logger = logging.getLogger(__name__)

_ARRAY_CONFIG = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

FAKE = -1


class CoarseningLevel(BaseModel):
    """One level of the hierarchy, with nodes in pooling (binary-tree) order.

    ``node_ids[j]`` is the unpermuted id of the node at position ``j`` on this
    level's real graph, or ``FAKE``. ``parent_of[j]`` is the position of its parent on
    the next-coarser level. ``cluster_of`` maps unpermuted real ids to unpermuted
    coarse ids and ``matched_pairs`` lists the pairs merged by the matching; all three
    are ``None``/empty on the coarsest level.
    """

    model_config = _ARRAY_CONFIG

    graph: PathGraph
    basis: SpectralBasis
    real_mask: np.ndarray
    node_ids: np.ndarray
    parent_of: np.ndarray | None = None
    cluster_of: np.ndarray | None = None
    matched_pairs: tuple[tuple[int, int], ...] = ()

    @property
    def size(self) -> int:
        return self.graph.num_nodes

    @property
    def num_real(self) -> int:
        return int(self.real_mask.sum())

    @property
    def num_fake(self) -> int:
        return self.size - self.num_real


class CoarseningHierarchy(BaseModel):
    """Coarsening levels, finest first, plus the finest-level input permutation.

    ``input_permutation[j]`` is the original node feeding padded position ``j``;
    fake positions are numbered ``num_nodes .. padded_length - 1``.
    """

    model_config = _ARRAY_CONFIG

    levels: tuple[CoarseningLevel, ...]
    input_permutation: np.ndarray
    num_nodes: int

    @property
    def padded_length(self) -> int:
        return int(self.input_permutation.shape[0])

    @property
    def level_sizes(self) -> list[int]:
        return [level.size for level in self.levels]

    @property
    def num_levels(self) -> int:
        return len(self.levels)


def greedy_matching(adjacency: sp.csr_matrix) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """One Graclus matching pass.

    Unmarked nodes are visited in ascending order; each is paired with the unmarked
    neighbour maximizing ``w_ij * (1/d_i + 1/d_j)`` (ties: smaller index). Nodes left
    without a partner become singleton clusters. Cluster ids follow visiting order.
    """
    n = adjacency.shape[0]
    degrees = np.asarray(adjacency.sum(axis=1)).ravel()
    cluster = np.full(n, -1, dtype=np.int64)
    pairs = []
    count = 0
    for i in range(n):
        if cluster[i] >= 0:
            continue
        cluster[i] = count
        start, end = adjacency.indptr[i], adjacency.indptr[i + 1]
        best, best_score = -1, -np.inf
        for j, w in sorted(zip(adjacency.indices[start:end], adjacency.data[start:end])):
            if cluster[j] >= 0 or j == i:
                continue
            score = w * (1.0 / degrees[i] + 1.0 / degrees[j])
            if score > best_score:
                best, best_score = int(j), score
        if best >= 0:
            cluster[best] = count
            pairs.append((i, best))
        count += 1
    return cluster, pairs


def coarsen_adjacency(adjacency: sp.csr_matrix, cluster: np.ndarray) -> sp.csr_matrix:
    """Coarse weights are sums of crossing fine weights; intra-cluster edges vanish."""
    n = adjacency.shape[0]
    num_clusters = int(cluster.max()) + 1
    P = sp.csr_matrix((np.ones(n), (np.arange(n), cluster)), shape=(n, num_clusters))
    coarse = (P.T @ adjacency @ P).tocsr()
    coarse = (sp.triu(coarse, k=1) + sp.tril(coarse, k=-1)).tocsr()
    coarse.eliminate_zeros()
    return coarse


def _binary_tree_orders(clusterings: list[np.ndarray], coarsest_size: int) -> list[np.ndarray]:
    """Node order per level such that siblings sit at positions 2j and 2j+1."""
    orders = [np.arange(coarsest_size)]
    for cluster in reversed(clusterings):
        children: dict[int, list[int]] = {}
        for node, parent in enumerate(cluster.tolist()):
            children.setdefault(parent, []).append(node)
        order = []
        for parent in orders[0].tolist():
            kids = children.get(parent, []) if parent != FAKE else []
            order.extend(kids + [FAKE] * (2 - len(kids)))
        orders.insert(0, np.asarray(order, dtype=np.int64))
    return orders


def _padded_graph(adjacency: sp.csr_matrix, order: np.ndarray) -> PathGraph:
    size = len(order)
    real_pos = np.flatnonzero(order != FAKE)
    pos_of = np.empty(adjacency.shape[0], dtype=np.int64)
    pos_of[order[real_pos]] = real_pos
    coo = adjacency.tocoo()
    padded = sp.coo_matrix((coo.data, (pos_of[coo.row], pos_of[coo.col])), shape=(size, size))
    return PathGraph(num_nodes=size, adjacency=padded)


def graclus_coarsen(g: PathGraph, num_levels: int) -> CoarseningHierarchy:
    """Coarsen ``g`` into ``num_levels`` graphs (finest included).

    Singletons are padded with isolated fake nodes so that each coarse node has
    exactly two children, which turns graph pooling into stride-2 1D pooling over
    the permuted node order.
    """
    if num_levels < 1:
        raise GraphError(f"num_levels must be >= 1, got {num_levels}")

    adjacencies = [g.adjacency]
    clusterings: list[np.ndarray] = []
    matchings: list[list[tuple[int, int]]] = []
    for _ in range(num_levels - 1):
        cluster, pairs = greedy_matching(adjacencies[-1])
        clusterings.append(cluster)
        matchings.append(pairs)
        adjacencies.append(coarsen_adjacency(adjacencies[-1], cluster))

    orders = _binary_tree_orders(clusterings, adjacencies[-1].shape[0])

    levels = []
    for lvl, order in enumerate(orders):
        graph = _padded_graph(adjacencies[lvl], order)
        is_coarsest = lvl == num_levels - 1
        levels.append(
            CoarseningLevel(
                graph=graph,
                basis=eigendecompose(normalized_laplacian(graph)),
                real_mask=order != FAKE,
                node_ids=order,
                parent_of=None if is_coarsest else np.arange(len(order)) // 2,
                cluster_of=None if is_coarsest else clusterings[lvl],
                matched_pairs=() if is_coarsest else tuple(matchings[lvl]),
            )
        )

    finest = orders[0]
    n = g.num_nodes
    permutation = finest.copy()
    fake_pos = np.flatnonzero(finest == FAKE)
    permutation[fake_pos] = n + np.arange(len(fake_pos))

    logger.info(
        f"Coarsened {n}-node graph into levels {[lv.size for lv in levels]} "
        f"with {len(fake_pos)} fake input nodes"
    )
    return CoarseningHierarchy(levels=tuple(levels), input_permutation=permutation, num_nodes=n)


@lru_cache(maxsize=16)
def build_hierarchy(n: int, num_levels: int) -> CoarseningHierarchy:
    """Shared hierarchy (and spectral bases) for all streamlines resampled to ``n`` points."""
    return graclus_coarsen(build_path_graph(n), num_levels)


def _node_axis(values: np.ndarray) -> int:
    return 1 if values.ndim == 3 else 0


def permute_signal(h: CoarseningHierarchy, values) -> np.ndarray:
    """Place real node values at their pooling positions; fake positions get 0.

    Accepts ``(n,)``, ``(n, c)`` or batched ``(B, n, c)`` arrays.
    """
    values = np.asarray(values, dtype=np.float64)
    axis = _node_axis(values)
    if values.shape[axis] != h.num_nodes:
        raise GraphError(f"signal has {values.shape[axis]} nodes, hierarchy expects {h.num_nodes}")
    pad = [(0, 0)] * values.ndim
    pad[axis] = (0, h.padded_length - h.num_nodes)
    return np.take(np.pad(values, pad), h.input_permutation, axis=axis)


def unpermute_signal(h: CoarseningHierarchy, values) -> np.ndarray:
    """Inverse of ``permute_signal``: gather real nodes back into original order."""
    values = np.asarray(values, dtype=np.float64)
    axis = _node_axis(values)
    if values.shape[axis] != h.padded_length:
        raise GraphError(f"signal has {values.shape[axis]} nodes, expected {h.padded_length}")
    inverse = np.argsort(h.input_permutation)[: h.num_nodes]
    return np.take(values, inverse, axis=axis)
