import numpy as np
import pytest
import scipy.sparse as sp

from gssl import Dataset, SparseGraph, build_graph


def graph_from_edges(n, edges, scale_k=1, neighbor_k=1):
    """Assemble a SparseGraph directly from (i, j, w) triples."""
    ii = np.array([e[0] for e in edges], dtype=np.int64)
    jj = np.array([e[1] for e in edges], dtype=np.int64)
    ww = np.array([e[2] for e in edges], dtype=np.float64)
    mat = sp.coo_matrix(
        (np.concatenate([ww, ww]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
        shape=(n, n),
    ).tocsr()
    degrees = np.asarray(mat.sum(axis=1)).ravel()
    return SparseGraph(n=n, weights=mat, degrees=degrees, scale_k=scale_k, neighbor_k=neighbor_k)


def random_point_graph(seed, n=40, d=3, scale_k=5, neighbor_k=8):
    rng = np.random.default_rng(seed)
    data = Dataset(features=rng.normal(size=(n, d)), name="rand%d" % seed)
    return build_graph(data, scale_k=scale_k, neighbor_k=neighbor_k)


def two_cliques(size=10, weight=1.0):
    """Two disconnected complete graphs of the given size."""
    edges = []
    for base in (0, size):
        for i in range(size):
            for j in range(i + 1, size):
                edges.append((base + i, base + j, weight))
    return graph_from_edges(2 * size, edges)


@pytest.fixture(scope="session")
def path_graph():
    """0 -- 1 with unit weight."""
    return graph_from_edges(2, [(0, 1, 1.0)])
