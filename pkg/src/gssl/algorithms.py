"""The three semi-supervised methods over a shared prediction interface.

* label_propagation: power iterations with the random-walk operator,
  re-clamping labeled entries each step; harmonic at the fixed point.
* leading_eigs_classify: ridge regression on the smallest generalized
  eigenvectors of (L, D).
* auc_spec_binary / auc_spec_multiclass: normalized power iterations with an
  added gradient-ascent step on the sigmoid-relaxed AUC of the labeled
  pairs, plus the one-vs-rest reduction.

All methods are pure functions of (graph, labels, config) and return a
PredictionVector (continuous scores plus thresholded hard labels).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.special import expit

from . import rng
from .errors import NumericError, ParameterError
from .graph import SparseGraph, random_walk_apply
from .spectral import EigenBasis, leading_eigenpairs


class UnlabeledComponentWarning(UserWarning):
    """A connected component has no labeled node; its scores stay at their init."""


@dataclass(frozen=True)
class LabelSet:
    """Labeled node indices with their class ids, kept sorted by index."""

    indices: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        lab = np.asarray(self.labels, dtype=np.int64).ravel()
        if idx.shape != lab.shape:
            raise ParameterError("indices and labels must align, got %d vs %d" % (len(idx), len(lab)))
        if len(idx) == 0:
            raise ParameterError("label set is empty")
        if idx.min() < 0:
            raise ParameterError("negative node index in label set")
        if lab.min() < 0:
            raise ParameterError("negative class id in label set")
        order = np.argsort(idx, kind="stable")
        idx, lab = idx[order], lab[order]
        if np.any(np.diff(idx) == 0):
            raise ParameterError("duplicate node index in label set")
        idx.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "labels", lab)

    @classmethod
    def from_binary(cls, positives, negatives) -> "LabelSet":
        pos = np.asarray(positives, dtype=np.int64).ravel()
        neg = np.asarray(negatives, dtype=np.int64).ravel()
        return cls(
            indices=np.concatenate([pos, neg]),
            labels=np.concatenate([np.ones(len(pos), dtype=np.int64), np.zeros(len(neg), dtype=np.int64)]),
        )

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.labels == 0) | (self.labels == 1)))

    @property
    def positives(self) -> np.ndarray:
        return self.indices[self.labels == 1]

    @property
    def negatives(self) -> np.ndarray:
        return self.indices[self.labels == 0]

    def check_in_range(self, n: int) -> None:
        if self.indices.max() >= n:
            raise ParameterError("label index %d out of range for n=%d" % (int(self.indices.max()), n))

    def require_binary_pairs(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Positive/negative index arrays, erroring unless both are non-empty."""
        if not self.is_binary:
            raise ParameterError("binary label set required, got classes %s" % self.classes.tolist())
        if n is not None:
            self.check_in_range(n)
        pos, neg = self.positives, self.negatives
        if len(pos) == 0 or len(neg) == 0:
            raise ParameterError("need at least one positive and one negative label")
        return pos, neg


@dataclass(frozen=True)
class AucSpecConfig:
    """Step schedule and stopping rule for the AUC-guided spectral iteration.

    Defaults: 20 warmup iterations at step 0.1, then step 0.01 until the
    iterate moves less than 1e-4, capped at 1000 iterations.

    init_mode "zero" starts unlabeled entries at 0 (the default: it keeps
    the iterate mean-free so the fixed zero threshold is meaningful);
    "paper" starts them at -1, which biases the whole vector negative;
    "random" draws them from the portable RNG keyed by init_seed. Labeled
    entries start at +-1 in every mode.
    """

    warmup_iters: int = 20
    warmup_step: float = 0.1
    main_step: float = 0.01
    tol: float = 1e-4
    max_iter: int = 1000
    init_mode: str = "zero"
    threshold_mode: str = "zero"
    init_seed: int = 0

    def __post_init__(self):
        if self.warmup_step <= 0 or self.main_step <= 0:
            raise ParameterError("step sizes must be positive")
        if self.tol <= 0:
            raise ParameterError("tol must be positive")
        if self.warmup_iters < 0 or self.max_iter < self.warmup_iters:
            raise ParameterError("need 0 <= warmup_iters <= max_iter")
        if self.init_mode not in ("paper", "zero", "random"):
            raise ParameterError("unknown init_mode %r" % self.init_mode)
        if self.threshold_mode not in ("zero", "best_on_labeled"):
            raise ParameterError("unknown threshold_mode %r" % self.threshold_mode)


@dataclass(frozen=True)
class PredictionVector:
    """Continuous scores plus derived hard labels.

    scores is length n for binary methods and (n, C) for one-vs-rest,
    one column per class in ascending class-id order.
    """

    scores: np.ndarray = field(repr=False)
    hard_labels: np.ndarray = field(repr=False)
    iterations: int
    converged: bool


def label_propagation(
    g: SparseGraph, labels: LabelSet, tol: float = 1e-4, max_iter: int = 1000
) -> PredictionVector:
    """Binary label propagation: v <- D^{-1}W v with labeled entries re-clamped.

    Unlabeled entries start at 0.5; a component with no labeled node keeps
    that value (its fixed point) and a warning is emitted. Hard labels are
    1(v >= 0.5).
    """
    labels.require_binary_pairs(g.n)
    if tol <= 0 or max_iter < 1:
        raise ParameterError("tol and max_iter must be positive")

    n_comp, comp = connected_components(g.weights, directed=False)
    if n_comp > 1:
        labeled_comps = np.unique(comp[labels.indices])
        orphan = np.setdiff1d(np.arange(n_comp), labeled_comps)
        if len(orphan):
            warnings.warn(
                "%d connected component(s) contain no labeled node; their scores "
                "remain at the 0.5 initialization" % len(orphan),
                UnlabeledComponentWarning,
                stacklevel=2,
            )

    y = labels.labels.astype(np.float64)
    v = np.full(g.n, 0.5)
    v[labels.indices] = y

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        v_next = random_walk_apply(g, v)
        v_next[labels.indices] = y
        delta = float(np.linalg.norm(v_next - v))
        v = v_next
        if delta <= tol:
            converged = True
            break

    hard = (v >= 0.5).astype(np.int64)
    return PredictionVector(scores=v, hard_labels=hard, iterations=iterations, converged=converged)


def _ridge_fit(x: np.ndarray, y: np.ndarray, ridge: float) -> tuple[np.ndarray, float]:
    """Least squares with an L2 penalty and an unpenalized intercept."""
    xm = x.mean(axis=0)
    ym = float(y.mean())
    xc = x - xm
    a = xc.T @ xc + ridge * np.eye(x.shape[1])
    w = np.linalg.solve(a, xc.T @ (y - ym))
    return w, ym - float(xm @ w)


def leading_eigs_classify(
    g: SparseGraph,
    labels: LabelSet,
    k: int = 5,
    ridge: float = 1e-3,
    eig_tol: float = 1e-6,
    eig_max_iter: int = 5000,
    basis: EigenBasis | None = None,
) -> PredictionVector:
    """Classify from the k smallest generalized eigenvectors of (L, D).

    Fits ridge-regularized least squares on +-1 targets over the labeled
    rows (one-vs-rest when more than two classes). A precomputed basis with
    at least k columns can be passed to amortize the eigensolve.
    """
    labels.check_in_range(g.n)
    if k > g.n:
        raise ParameterError("k=%d must be <= n=%d" % (k, g.n))
    if ridge <= 0:
        raise ParameterError("ridge must be positive")
    if basis is None:
        basis = leading_eigenpairs(g, k, tol=eig_tol, max_iter=eig_max_iter)
    elif basis.k < k:
        raise ParameterError("precomputed basis has %d < k=%d vectors" % (basis.k, k))
    phi = basis.vectors[:, :k]
    phi_l = phi[labels.indices]

    def fit_scores(target):
        try:
            w, b = _ridge_fit(phi_l, target, ridge)
        except np.linalg.LinAlgError:
            w, b = None, None
        if w is None or not np.all(np.isfinite(w)):
            try:
                w, b = _ridge_fit(phi_l, target, ridge * 1e3)
            except np.linalg.LinAlgError as exc:
                raise NumericError("ridge system singular even after retry") from exc
            if not np.all(np.isfinite(w)):
                raise NumericError("ridge system singular even after retry")
        return phi @ w + b

    classes = labels.classes
    if labels.is_binary:
        target = np.where(labels.labels == 1, 1.0, -1.0)
        scores = fit_scores(target)
        hard = (scores >= 0.0).astype(np.int64)
    else:
        cols = [fit_scores(np.where(labels.labels == c, 1.0, -1.0)) for c in classes]
        scores = np.stack(cols, axis=1)
        hard = classes[np.argmax(scores, axis=1)]
    return PredictionVector(scores=scores, hard_labels=hard, iterations=basis.iterations, converged=True)


def auc_gradient(v: np.ndarray, labels: LabelSet) -> np.ndarray:
    """Gradient of the sigmoid-relaxed AUC of the labeled pairs.

    With s_ij = sigmoid(v_i - v_j) over i in P, j in N, entry i in P gets
    mean_j s_ij (1 - s_ij), entry j in N gets the negated mean over i, and
    unlabeled entries are zero.
    """
    v = np.asarray(v, dtype=np.float64)
    pos, neg = labels.require_binary_pairs(len(v))
    sig = expit(v[pos][:, None] - v[neg][None, :])
    pair_slope = sig * (1.0 - sig)
    scale = 1.0 / (len(pos) * len(neg))
    grad = np.zeros_like(v)
    grad[pos] = pair_slope.sum(axis=1) * scale
    grad[neg] = -pair_slope.sum(axis=0) * scale
    return grad


def _initial_vector(n: int, pos, neg, cfg: AucSpecConfig) -> np.ndarray:
    if cfg.init_mode == "paper":
        v = np.full(n, -1.0)
    elif cfg.init_mode == "zero":
        v = np.zeros(n)
    else:
        v = rng.stream(cfg.init_seed, rng.INIT).standard_normal(n)
    v[pos] = 1.0
    v[neg] = -1.0
    return v / np.linalg.norm(v)


def _best_labeled_threshold(scores: np.ndarray, labels: LabelSet) -> float:
    s = scores[labels.indices]
    y = labels.labels
    cands = np.unique(s)
    cands = np.append(cands, cands[-1] + 1.0)
    acc = [(np.mean((s >= t).astype(np.int64) == y)) for t in cands]
    return float(cands[int(np.argmax(acc))])


def auc_spec_binary(
    g: SparseGraph, labels: LabelSet, cfg: AucSpecConfig | None = None, on_iterate=None
) -> PredictionVector:
    """AUC-guided spectral optimization for binary labels.

    Iterates v <- normalize(v + gamma * (D^{-1}W v + grad_auc(v))) with the
    warmup/main step schedule from cfg, stopping once the iterate moves by
    at most cfg.tol. Initialization sets labeled entries to +-1 and, in
    "paper" mode, unlabeled entries to -1. Hard labels are 1(v >= theta)
    with theta fixed at 0 or chosen to maximize labeled accuracy.

    on_iterate, when given, is called as on_iterate(t, v) after every
    normalization; useful for tracing.
    """
    cfg = cfg or AucSpecConfig()
    pos, neg = labels.require_binary_pairs(g.n)
    v = _initial_vector(g.n, pos, neg, cfg)

    converged = False
    iterations = 0
    for t in range(cfg.max_iter):
        gamma = cfg.warmup_step if t < cfg.warmup_iters else cfg.main_step
        step = v + gamma * (random_walk_apply(g, v) + auc_gradient(v, labels))
        nrm = np.linalg.norm(step)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise NumericError("non-finite iterate at iteration %d" % (t + 1))
        v_next = step / nrm
        delta = float(np.linalg.norm(v_next - v))
        v = v_next
        iterations = t + 1
        if on_iterate is not None:
            on_iterate(iterations, v)
        if delta <= cfg.tol:
            converged = True
            break

    theta = 0.0 if cfg.threshold_mode == "zero" else _best_labeled_threshold(v, labels)
    hard = (v >= theta).astype(np.int64)
    return PredictionVector(scores=v, hard_labels=hard, iterations=iterations, converged=converged)


def auc_spec_multiclass(
    g: SparseGraph, labels: LabelSet, cfg: AucSpecConfig | None = None
) -> PredictionVector:
    """One-vs-rest reduction: one binary run per class, predict by argmax.

    Labeled nodes report their given labels; argmax ties resolve to the
    smallest class id. scores has one column per class, ascending class id.
    """
    cfg = cfg or AucSpecConfig()
    labels.check_in_range(g.n)
    classes = labels.classes
    if len(classes) < 2:
        raise ParameterError("need at least two classes, got %s" % classes.tolist())

    cols = []
    iterations = 0
    converged = True
    for c in classes:
        rest = LabelSet(indices=labels.indices, labels=(labels.labels == c).astype(np.int64))
        pred = auc_spec_binary(g, rest, cfg)
        cols.append(pred.scores)
        iterations = max(iterations, pred.iterations)
        converged = converged and pred.converged
    scores = np.stack(cols, axis=1)
    hard = classes[np.argmax(scores, axis=1)]
    hard[labels.indices] = labels.labels
    return PredictionVector(scores=scores, hard_labels=hard, iterations=iterations, converged=converged)
