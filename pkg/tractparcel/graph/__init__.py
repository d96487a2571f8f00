"""Path graphs, normalized Laplacians, spectral bases and the coarsening hierarchy."""

from tractparcel.graph.coarsening import (
    CoarseningHierarchy,
    CoarseningLevel,
    build_hierarchy,
    graclus_coarsen,
    permute_signal,
    unpermute_signal,
)
from tractparcel.graph.path_graph import (
    EigenSolveError,
    GraphError,
    PathGraph,
    SpectralBasis,
    build_path_graph,
    eigendecompose,
    normalized_laplacian,
)

__all__ = [
    "PathGraph",
    "SpectralBasis",
    "GraphError",
    "EigenSolveError",
    "build_path_graph",
    "normalized_laplacian",
    "eigendecompose",
    "CoarseningLevel",
    "CoarseningHierarchy",
    "graclus_coarsen",
    "build_hierarchy",
    "permute_signal",
    "unpermute_signal",
]
