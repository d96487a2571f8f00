"""Tests for path graphs, the normalized Laplacian and its eigendecomposition."""

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from tractparcel.graph.path_graph import (
    EigenSolveError,
    GraphError,
    PathGraph,
    build_path_graph,
    eigendecompose,
    fix_signs,
    normalized_laplacian,
)


class TestPathGraph:
    def test_edges_of_small_path(self):
        g = build_path_graph(4)
        assert g.num_edges == 3
        assert g.edges() == [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
        np.testing.assert_array_equal(g.degrees, [1, 2, 2, 1])

    def test_single_node(self):
        g = build_path_graph(1)
        assert g.num_nodes == 1
        assert g.num_edges == 0

    def test_zero_nodes_rejected(self):
        with pytest.raises(GraphError):
            build_path_graph(0)

    def test_asymmetric_adjacency_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            PathGraph(num_nodes=2, adjacency=sp.csr_matrix([[0.0, 1.0], [0.0, 0.0]]))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            PathGraph(num_nodes=2, adjacency=sp.csr_matrix([[0.0, -1.0], [-1.0, 0.0]]))


class TestNormalizedLaplacian:
    def test_three_node_path(self):
        L = normalized_laplacian(build_path_graph(3)).toarray()
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(L, [[1, -s, 0], [-s, 1, -s], [0, -s, 1]])

    def test_isolated_node_has_zero_row(self):
        adj = sp.csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float))
        L = normalized_laplacian(PathGraph(num_nodes=3, adjacency=adj)).toarray()
        np.testing.assert_array_equal(L[2], 0.0)
        np.testing.assert_array_equal(L[:, 2], 0.0)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=1, max_size=15))
    def test_symmetric_positive_semidefinite(self, weights):
        L = normalized_laplacian(PathGraph.from_edge_weights(weights)).toarray()
        np.testing.assert_allclose(L, L.T, atol=1e-15)
        assert np.linalg.eigvalsh(L).min() >= -1e-10


class TestEigendecompose:
    def test_two_nodes(self):
        basis = eigendecompose(normalized_laplacian(build_path_graph(2)))
        np.testing.assert_allclose(basis.eigenvalues, [0.0, 2.0], atol=1e-10)

    def test_three_nodes(self):
        basis = eigendecompose(normalized_laplacian(build_path_graph(3)))
        np.testing.assert_allclose(basis.eigenvalues, [0.0, 1.0, 2.0], atol=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 8, 100])
    def test_spectrum_range_and_single_zero(self, n):
        basis = eigendecompose(normalized_laplacian(build_path_graph(n)))
        values = basis.eigenvalues
        assert values.min() >= -1e-10
        assert values.max() <= 2.0 + 1e-10
        assert np.sum(np.abs(values) < 1e-10) == 1

    @pytest.mark.parametrize("n", [2, 3, 8, 100])
    def test_matches_dense_solver(self, n):
        L = normalized_laplacian(build_path_graph(n))
        basis = eigendecompose(L)
        np.testing.assert_allclose(basis.eigenvalues, np.linalg.eigvalsh(L.toarray()), atol=1e-8)

    def test_orthonormal_and_reconstructs(self):
        L = normalized_laplacian(build_path_graph(10))
        basis = eigendecompose(L)
        phi = basis.eigenvectors
        np.testing.assert_allclose(phi.T @ phi, np.eye(10), atol=1e-10)
        np.testing.assert_allclose(phi @ np.diag(basis.eigenvalues) @ phi.T, L.toarray(), atol=1e-10)

    def test_sign_convention(self):
        phi = eigendecompose(normalized_laplacian(build_path_graph(12))).eigenvectors
        for col in phi.T:
            peak = np.argmax(np.abs(col) >= np.abs(col).max() * (1 - 1e-9))
            assert col[peak] > 0

    def test_isolated_nodes_get_unit_eigenvectors(self):
        adj = sp.csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float))
        basis = eigendecompose(normalized_laplacian(PathGraph(num_nodes=3, adjacency=adj)))
        np.testing.assert_allclose(basis.eigenvalues, [0.0, 0.0, 2.0], atol=1e-12)
        assert any(np.allclose(col, [0, 0, 1]) for col in basis.eigenvectors.T)

    def test_deterministic(self):
        L = normalized_laplacian(build_path_graph(30))
        a, b = eigendecompose(L), eigendecompose(L)
        np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)

    def test_non_symmetric_rejected(self):
        with pytest.raises(EigenSolveError, match="not symmetric"):
            eigendecompose(np.array([[1.0, -0.5], [0.0, 1.0]]))

    def test_non_path_component_rejected(self):
        star = np.array([[0, 1, 1, 1], [1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]], dtype=float)
        L = normalized_laplacian(PathGraph(num_nodes=4, adjacency=star))
        with pytest.raises(EigenSolveError, match="not a path"):
            eigendecompose(L)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=1, max_size=15))
    def test_weighted_paths_match_dense_solver(self, weights):
        L = normalized_laplacian(PathGraph.from_edge_weights(weights))
        np.testing.assert_allclose(eigendecompose(L).eigenvalues, np.linalg.eigvalsh(L.toarray()), atol=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.lists(st.floats(min_value=0.1, max_value=10.0), max_size=3), min_size=1, max_size=4
        ),
        st.integers(0, 2**32 - 1),
    )
    def test_eigenspaces_match_dense_solver(self, components, seed):
        blocks = [
            PathGraph.from_edge_weights(w).adjacency if w else sp.csr_matrix((1, 1))
            for w in components
        ]
        adj = sp.block_diag(blocks).toarray()
        perm = np.random.default_rng(seed).permutation(adj.shape[0])
        adj = adj[perm][:, perm]
        L = normalized_laplacian(PathGraph(num_nodes=adj.shape[0], adjacency=adj))

        basis = eigendecompose(L)
        expected_values, expected_vectors = scipy.linalg.eigh(L.toarray())
        np.testing.assert_allclose(basis.eigenvalues, expected_values, atol=1e-8)

        # group near-equal eigenvalues; each group spans one invariant subspace
        breaks = np.flatnonzero(np.diff(expected_values) > 1e-3) + 1
        for idx in np.split(np.arange(len(expected_values)), breaks):
            ours = basis.eigenvectors[:, idx]
            theirs = expected_vectors[:, idx]
            np.testing.assert_allclose(ours @ ours.T, theirs @ theirs.T, atol=1e-8)


class TestFixSigns:
    def test_flips_negative_peak(self):
        v = np.array([[0.1, 0.6], [-0.9, 0.8]])
        out = fix_signs(v)
        np.testing.assert_allclose(out, [[-0.1, 0.6], [0.9, 0.8]])
