import numpy as np
import pytest

from gssl import (
    DataError,
    Dataset,
    ParameterError,
    build_graph,
    knn_distances,
    laplacian_apply,
    load_graph,
    random_walk_apply,
    save_graph,
    total_variation,
)
from gssl.graph import GRAPH_MAGIC

from conftest import graph_from_edges, random_point_graph


def brute_force_knn(features, k):
    """Oracle: exhaustive pairwise distances, ties broken by smaller index."""
    n = len(features)
    out_idx, out_dist = [], []
    for i in range(n):
        cand = []
        for j in range(n):
            if j != i:
                cand.append((float(np.linalg.norm(features[i] - features[j])), j))
        cand.sort(key=lambda t: (t[0], t[1]))
        out_idx.append([j for _, j in cand[:k]])
        out_dist.append([d for d, _ in cand[:k]])
    return np.array(out_idx), np.array(out_dist)


class TestKnn:
    def test_three_points_on_a_line(self):
        data = Dataset(features=np.array([[0.0], [1.0], [3.0]]))
        idx, dist = knn_distances(data, 1)
        oracle_idx, oracle_dist = brute_force_knn(data.features, 1)
        np.testing.assert_array_equal(idx, oracle_idx)
        np.testing.assert_array_equal(dist, oracle_dist)
        # frozen expected values from the oracle
        np.testing.assert_array_equal(idx.ravel(), [1, 0, 1])
        np.testing.assert_array_equal(dist.ravel(), [1.0, 1.0, 2.0])

    def test_identical_points_are_mutual_neighbors_at_zero(self):
        data = Dataset(features=np.array([[2.0, 2.0], [2.0, 2.0]]))
        idx, dist = knn_distances(data, 1)
        np.testing.assert_array_equal(idx.ravel(), [1, 0])
        np.testing.assert_array_equal(dist.ravel(), [0.0, 0.0])

    def test_full_ranking_at_k_equals_n_minus_one(self):
        rng = np.random.default_rng(0)
        data = Dataset(features=rng.normal(size=(12, 2)))
        idx, dist = knn_distances(data, 11)
        oracle_idx, oracle_dist = brute_force_knn(data.features, 11)
        np.testing.assert_array_equal(idx, oracle_idx)
        np.testing.assert_allclose(dist, oracle_dist, rtol=0, atol=1e-12)
        for i in range(12):
            assert set(idx[i]) == set(range(12)) - {i}

    def test_matches_oracle_on_random_data(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            data = Dataset(features=rng.normal(size=(30, 3)))
            idx, dist = knn_distances(data, 7)
            oracle_idx, oracle_dist = brute_force_knn(data.features, 7)
            np.testing.assert_array_equal(idx, oracle_idx)
            np.testing.assert_allclose(dist, oracle_dist, atol=1e-12)

    def test_k_out_of_range(self):
        data = Dataset(features=np.arange(6.0).reshape(3, 2))
        with pytest.raises(ParameterError):
            knn_distances(data, 3)
        with pytest.raises(ParameterError):
            knn_distances(data, 0)

    def test_non_finite_features_rejected_at_construction(self):
        with pytest.raises(DataError):
            Dataset(features=np.array([[0.0], [np.nan]]))


class TestBuildGraph:
    def test_three_points_on_a_line(self):
        # d_1 bandwidths are {1, 1, 2}; weights evaluated by hand
        data = Dataset(features=np.array([[0.0], [1.0], [3.0]]))
        g = build_graph(data, scale_k=1, neighbor_k=2)
        w = g.weights.toarray()
        assert w[0, 1] == pytest.approx(np.exp(-1.0), abs=1e-15)
        assert w[1, 2] == pytest.approx(np.exp(-4.0 / 2.0), abs=1e-15)
        assert w[0, 2] == pytest.approx(np.exp(-9.0 / 2.0), abs=1e-15)
        np.testing.assert_array_equal(w, w.T)
        assert np.all(np.diag(w) == 0)

    def test_coincident_points_get_unit_weight(self):
        # duplicates at index 0/1 but scale_k=2 keeps bandwidths positive
        data = Dataset(features=np.array([[0.0], [0.0], [1.0], [3.0]]))
        g = build_graph(data, scale_k=2, neighbor_k=1)
        assert g.weights[0, 1] == 1.0

    def test_duplicate_cluster_fails_loudly(self):
        data = Dataset(features=np.array([[1.0], [1.0], [5.0]]))
        with pytest.raises(DataError, match="duplicate"):
            build_graph(data, scale_k=1, neighbor_k=1)

    def test_parameter_validation(self):
        data = Dataset(features=np.arange(8.0).reshape(4, 2))
        with pytest.raises(ParameterError):
            build_graph(data, scale_k=4, neighbor_k=2)
        with pytest.raises(ParameterError):
            build_graph(data, scale_k=2, neighbor_k=4)

    @pytest.mark.parametrize("seed", range(6))
    def test_invariants_on_random_graphs(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 200))
        data = Dataset(features=rng.normal(size=(n, 2)))
        g = build_graph(data, scale_k=5, neighbor_k=6)
        w = g.weights
        diff = (w - w.T).tocoo()
        assert diff.nnz == 0 or np.abs(diff.data).max() == 0.0
        assert np.all(w.diagonal() == 0.0)
        assert w.data.min() > 0.0
        assert w.data.max() <= 1.0
        np.testing.assert_allclose(g.degrees, np.asarray(w.sum(axis=1)).ravel(), rtol=1e-15)
        assert g.degrees.min() > 0.0


class TestOperatorActions:
    def test_laplacian_annihilates_constants(self):
        g = random_point_graph(3)
        out = laplacian_apply(g, np.full(g.n, 2.5))
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_laplacian_on_path(self, path_graph):
        np.testing.assert_allclose(laplacian_apply(path_graph, np.array([1.0, 0.0])), [1.0, -1.0])

    def test_random_walk_preserves_constants(self):
        g = random_point_graph(4)
        np.testing.assert_allclose(random_walk_apply(g, np.full(g.n, 3.0)), 3.0, rtol=1e-14)

    def test_random_walk_on_path(self, path_graph):
        np.testing.assert_allclose(random_walk_apply(path_graph, np.array([1.0, 0.0])), [0.0, 1.0])

    def test_random_walk_is_convex_combination(self):
        g = random_point_graph(5)
        rng = np.random.default_rng(5)
        for _ in range(20):
            v = rng.normal(size=g.n)
            out = random_walk_apply(g, v)
            assert out.min() >= v.min() - 1e-12
            assert out.max() <= v.max() + 1e-12

    @pytest.mark.parametrize("seed", range(4))
    def test_actions_match_dense_multiplication(self, seed):
        g = random_point_graph(seed, n=50, scale_k=4, neighbor_k=7)
        w = g.weights.toarray()
        lap = np.diag(g.degrees) - w
        rw = w / g.degrees[:, None]
        rng = np.random.default_rng(seed + 100)
        for _ in range(5):
            v = rng.normal(size=g.n)
            np.testing.assert_allclose(laplacian_apply(g, v), lap @ v, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(random_walk_apply(g, v), rw @ v, rtol=1e-12, atol=1e-12)

    def test_quadratic_form_nonnegative(self):
        g = random_point_graph(6, n=60)
        rng = np.random.default_rng(99)
        for _ in range(1000):
            v = rng.normal(size=g.n)
            v /= np.linalg.norm(v)
            assert v @ laplacian_apply(g, v) >= -1e-12

    def test_length_mismatch(self):
        g = random_point_graph(7)
        with pytest.raises(DataError):
            laplacian_apply(g, np.zeros(g.n + 1))


class TestTotalVariation:
    def test_constant_unit_vector_is_zero(self):
        g = random_point_graph(8)
        assert total_variation(g, np.full(g.n, 1.0 / np.sqrt(g.n))) <= 1e-12

    def test_path_antisymmetric_vector(self, path_graph):
        v = np.array([1.0, -1.0]) / np.sqrt(2.0)
        assert total_variation(path_graph, v) == pytest.approx(2.0, abs=1e-12)

    def test_component_indicator_is_zero(self):
        # two disconnected edges
        g = graph_from_edges(4, [(0, 1, 0.7), (2, 3, 0.4)])
        v = np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2.0)
        assert total_variation(g, v) == pytest.approx(0.0, abs=1e-14)

    def test_matches_edge_sum_oracle(self):
        for seed in range(4):
            g = random_point_graph(seed + 20, n=35)
            rng = np.random.default_rng(seed)
            v = rng.normal(size=g.n)
            v /= np.linalg.norm(v)
            coo = g.weights.tocoo()
            edge_sum = 0.5 * float(np.sum(coo.data * (v[coo.row] - v[coo.col]) ** 2))
            assert total_variation(g, v) == pytest.approx(edge_sum, rel=1e-12)

    def test_rejects_non_unit_vector(self):
        g = random_point_graph(9)
        with pytest.raises(ParameterError):
            total_variation(g, np.full(g.n, 1.0))


class TestGraphCache:
    def test_round_trip(self, tmp_path):
        g = random_point_graph(10, n=30)
        path = tmp_path / "g.gsslg"
        save_graph(g, path)
        assert path.read_text().startswith(GRAPH_MAGIC + "\n")
        g2 = load_graph(path)
        assert g2.n == g.n
        assert g2.scale_k == g.scale_k and g2.neighbor_k == g.neighbor_k
        assert (g2.weights != g.weights).nnz == 0
        np.testing.assert_array_equal(g2.degrees, g.degrees)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.gsslg"
        path.write_text("NOT-A-GRAPH\n1 2 3 4\n")
        with pytest.raises(DataError, match="magic"):
            load_graph(path)
