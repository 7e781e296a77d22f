"""kNN graphs with adaptive Gaussian weights and Laplacian operator actions.

Edge weights use the adaptive bandwidth kernel

    W_ij = exp(-||x_i - x_j||^2 / (d_K(x_i) * d_K(x_j)))

where d_K(x) is the distance from x to its K-th nearest neighbor. The graph
is sparsified to the union of each point's neighbor_k nearest neighbors
(dense mode: neighbor_k = n - 1). The Laplacian L = D - W and the random
walk operator D^{-1}W are exposed as matrix-vector actions; neither matrix
is materialized beyond the shared sparse W.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DataError, ParameterError

GRAPH_MAGIC = "GSSL-GRAPH-1"

# Rows per block when accumulating the pairwise distance matrix; keeps peak
# memory at ~block*n*8 bytes regardless of n.
_KNN_BLOCK = 512


@dataclass(frozen=True)
class Dataset:
    """n points in R^d with optional integer class labels.

    Immutable after construction; arrays are marked read-only so instances
    can be shared freely across threads and worker processes.
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D array, got shape %s" % (feats.shape,))
        if feats.shape[0] < 2 or feats.shape[1] < 1:
            raise DataError("need n >= 2 points and d >= 1 features, got %dx%d" % feats.shape)
        if not np.all(np.isfinite(feats)):
            bad = int(np.argwhere(~np.isfinite(feats))[0][0])
            raise DataError("non-finite feature value at row %d" % bad)
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labs = np.asarray(self.labels)
            if labs.shape != (feats.shape[0],):
                raise DataError("labels must have length n=%d, got shape %s" % (feats.shape[0], labs.shape))
            if not np.issubdtype(labs.dtype, np.integer):
                if not np.all(labs == np.floor(labs)):
                    raise DataError("labels must be integer class ids")
            labs = labs.astype(np.int64)
            if labs.min() < 0:
                raise DataError("labels must be non-negative class ids")
            labs.setflags(write=False)
            object.__setattr__(self, "labels", labs)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> np.ndarray:
        if self.labels is None:
            raise DataError("dataset %r has no labels" % self.name)
        return np.unique(self.labels)


@dataclass(frozen=True)
class SparseGraph:
    """Symmetric weighted graph in CSR form with both edge directions stored."""

    n: int
    weights: sp.csr_matrix = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    scale_k: int
    neighbor_k: int

    @property
    def edge_count(self) -> int:
        """Number of undirected edges."""
        return self.weights.nnz // 2


def knn_distances(data: Dataset, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors per point under the Euclidean metric.

    Returns (indices, distances), each of shape (n, k), sorted by distance
    ascending with ties broken by smaller index. Brute force in row blocks;
    no approximation.
    """
    n = data.n
    if k < 1:
        raise ParameterError("k must be >= 1, got %d" % k)
    if k >= n:
        raise ParameterError("k=%d must be < n=%d" % (k, n))
    x = data.features
    sq = np.einsum("ij,ij->i", x, x)
    idx = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k))
    for start in range(0, n, _KNN_BLOCK):
        stop = min(start + _KNN_BLOCK, n)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * (x[start:stop] @ x.T)
        np.maximum(d2, 0.0, out=d2)
        d2[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # stable sort: equal distances keep ascending-index order
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        idx[start:stop] = order
        dist[start:stop] = np.sqrt(np.take_along_axis(d2, order, axis=1))
    return idx, dist


def build_graph(data: Dataset, scale_k: int = 20, neighbor_k: int = 50) -> SparseGraph:
    """Build the adaptive-kernel kNN graph.

    scale_k sets the bandwidth d_K per point; neighbor_k controls
    sparsification (edges kept for the union of both endpoints' kNN lists).
    Fails if any point has scale_k exact duplicates, since that zeroes its
    bandwidth and the kernel is undefined.
    """
    n = data.n
    if scale_k >= n:
        raise ParameterError("scale_k=%d must be < n=%d" % (scale_k, n))
    if neighbor_k >= n:
        raise ParameterError("neighbor_k=%d must be < n=%d" % (neighbor_k, n))
    k = max(scale_k, neighbor_k)
    idx, dist = knn_distances(data, k)

    bandwidth = dist[:, scale_k - 1]
    if np.any(bandwidth == 0.0):
        offender = int(np.argmax(bandwidth == 0.0))
        raise DataError(
            "point %d has %d exact duplicates; adaptive bandwidth d_%d is zero"
            % (offender, scale_k, scale_k)
        )

    # union symmetrization over canonical (min, max) pairs, weight computed
    # once per undirected edge so W_ij == W_ji exactly
    rows = np.repeat(np.arange(n, dtype=np.int64), neighbor_k)
    cols = idx[:, :neighbor_k].ravel()
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
    i, j = pairs[:, 0], pairs[:, 1]

    diff = data.features[i] - data.features[j]
    d2 = np.einsum("ij,ij->i", diff, diff)
    w = np.exp(-d2 / (bandwidth[i] * bandwidth[j]))

    keep = w > 0.0  # drop weights that underflowed to exactly zero
    i, j, w = i[keep], j[keep], w[keep]

    mat = sp.coo_matrix(
        (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
        shape=(n, n),
    ).tocsr()
    degrees = np.asarray(mat.sum(axis=1)).ravel()
    if np.any(degrees <= 0.0):
        orphan = int(np.argmax(degrees <= 0.0))
        raise DataError("point %d ended up with no positive-weight edges" % orphan)
    degrees.setflags(write=False)
    return SparseGraph(n=n, weights=mat, degrees=degrees, scale_k=scale_k, neighbor_k=neighbor_k)


def _check_vector(g: SparseGraph, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise DataError("vector must have length n=%d, got shape %s" % (g.n, v.shape))
    if not np.all(np.isfinite(v)):
        raise DataError("vector contains non-finite entries")
    return v


def laplacian_apply(g: SparseGraph, v: np.ndarray) -> np.ndarray:
    """(D - W) v."""
    v = _check_vector(g, v)
    return g.degrees * v - g.weights @ v


def random_walk_apply(g: SparseGraph, v: np.ndarray) -> np.ndarray:
    """D^{-1} W v (row-stochastic action)."""
    v = _check_vector(g, v)
    return (g.weights @ v) / g.degrees


def total_variation(g: SparseGraph, v: np.ndarray) -> float:
    """v^T L v for a unit vector v; equals sum over edges of W_ij (v_i - v_j)^2."""
    v = _check_vector(g, v)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-8:
        raise ParameterError("total_variation expects a unit vector; got ||v|| = %.12g" % norm)
    return max(float(v @ laplacian_apply(g, v)), 0.0)


def save_graph(g: SparseGraph, path) -> None:
    """Write a versioned textual dump: magic header, sizes, one undirected edge per line."""
    coo = sp.triu(g.weights, k=1).tocoo()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(GRAPH_MAGIC + "\n")
        fh.write("%d %d %d %d\n" % (g.n, g.scale_k, g.neighbor_k, coo.nnz))
        for i, j, w in zip(coo.row, coo.col, coo.data):
            fh.write("%d %d %s\n" % (i, j, repr(float(w))))


def load_graph(path) -> SparseGraph:
    """Read a graph written by save_graph; degrees are recomputed from the edges."""
    with open(path, encoding="utf-8") as fh:
        magic = fh.readline().strip()
        if magic != GRAPH_MAGIC:
            raise DataError("not a graph cache file (bad magic %r)" % magic)
        try:
            n, scale_k, neighbor_k, m = (int(t) for t in fh.readline().split())
        except ValueError as exc:
            raise DataError("malformed graph cache header") from exc
        ii = np.empty(m, dtype=np.int64)
        jj = np.empty(m, dtype=np.int64)
        ww = np.empty(m)
        for e in range(m):
            parts = fh.readline().split()
            if len(parts) != 3:
                raise DataError("malformed edge line %d in graph cache" % (e + 3))
            ii[e], jj[e], ww[e] = int(parts[0]), int(parts[1]), float(parts[2])
    mat = sp.coo_matrix(
        (np.concatenate([ww, ww]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
        shape=(n, n),
    ).tocsr()
    degrees = np.asarray(mat.sum(axis=1)).ravel()
    if np.any(degrees <= 0.0):
        raise DataError("cached graph has an isolated node")
    degrees.setflags(write=False)
    return SparseGraph(n=n, weights=mat, degrees=degrees, scale_k=scale_k, neighbor_k=neighbor_k)
