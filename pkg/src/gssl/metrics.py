"""Ranking and accuracy metrics plus smoothness diagnostics.

exact_auc is the Mann-Whitney statistic (ties count 1/2) computed from rank
sums in O(m log m); soft_auc is its sigmoid relaxation. pairwise_mean_gap
and kappa quantify how far the labeled scores sit from the linear regime of
the sigmoid; smoothness_diagnostic checks an optimizer output against the
total variation of the best perfectly-separating eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .algorithms import LabelSet
from .errors import ParameterError
from .graph import SparseGraph, total_variation
from .spectral import EigenBasis


@dataclass(frozen=True)
class TrialMetrics:
    auc: float
    accuracy: float
    runtime_ms: float
    iterations: int
    converged: bool

    def __post_init__(self):
        if not (0.0 <= self.auc <= 1.0 and 0.0 <= self.accuracy <= 1.0):
            raise ParameterError("auc and accuracy must lie in [0, 1]")
        if self.runtime_ms < 0:
            raise ParameterError("runtime_ms must be non-negative")


def exact_auc(scores: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of (positive, negative) pairs ranked correctly; ties count 1/2."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    truth = np.asarray(truth).ravel()
    if scores.shape != truth.shape:
        raise ParameterError("scores and truth must have equal length")
    if not np.all((truth == 0) | (truth == 1)):
        raise ParameterError("truth must be binary 0/1")
    pos = truth == 1
    n_pos = int(pos.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ParameterError("need at least one positive and one negative in truth")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def soft_auc(scores: np.ndarray, labels: LabelSet) -> float:
    """Mean sigmoid(v_i - v_j) over labeled positive/negative pairs."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    pos, neg = labels.require_binary_pairs(len(scores))
    return float(np.mean(expit(scores[pos][:, None] - scores[neg][None, :])))


def pairwise_mean_gap(scores: np.ndarray, labels: LabelSet) -> float:
    """Mean labeled-positive score minus mean labeled-negative score."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    pos, neg = labels.require_binary_pairs(len(scores))
    return float(scores[pos].mean() - scores[neg].mean())


def kappa(scores: np.ndarray, labels: LabelSet) -> float:
    """Proportionality constant linking soft AUC to the mean gap.

    Defined by soft_auc = 1/2 + kappa * gap; approaches 1/4 when all labeled
    score differences sit in the sigmoid's linear regime.
    """
    gap = pairwise_mean_gap(scores, labels)
    if gap == 0.0:
        raise ParameterError("kappa undefined: mean score gap is zero")
    return (soft_auc(scores, labels) - 0.5) / gap


def accuracy(pred: np.ndarray, truth: np.ndarray, eval_indices: np.ndarray) -> float:
    """Fraction of eval_indices where pred equals truth."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ParameterError("pred and truth must have equal length")
    idx = np.asarray(eval_indices, dtype=np.int64).ravel()
    if len(idx) == 0:
        raise ParameterError("empty evaluation index set")
    if idx.min() < 0 or idx.max() >= len(pred):
        raise ParameterError("evaluation index out of range")
    return float(np.mean(pred[idx] == truth[idx]))


def mean_rank(table: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """Average rank per method across datasets (rank 1 = best metric value).

    table maps dataset -> method -> value; every dataset must cover the same
    methods. Ties get the average of the tied ranks.
    """
    datasets = list(table)
    if not datasets:
        raise ParameterError("mean_rank needs at least one dataset")
    methods = sorted(table[datasets[0]])
    total = {m: 0.0 for m in methods}
    for ds in datasets:
        row = table[ds]
        if sorted(row) != methods:
            raise ParameterError("dataset %r is missing method values" % ds)
        values = np.array([row[m] for m in methods], dtype=np.float64)
        ranks = rankdata(-values)
        for m, r in zip(methods, ranks):
            total[m] += float(r)
    return {m: total[m] / len(datasets) for m in methods}


@dataclass(frozen=True)
class SmoothnessDiagnostic:
    """Outcome of the separating-eigenvector smoothness bound check."""

    applicable: bool
    eig_index: int | None
    eigenvalue: float
    tv_value: float
    bound: float
    passed: bool


def smoothness_diagnostic(
    g: SparseGraph,
    basis: EigenBasis,
    labels: LabelSet,
    scores: np.ndarray,
    slack: float = 1.5,
) -> SmoothnessDiagnostic:
    """Check scores against the smoothness of a perfectly-separating eigenvector.

    Scans the basis for the first eigenvector whose labeled AUC is exactly 1
    (in either sign orientation). If one exists at index K, the optimizer
    output should be at least as smooth: tv(scores) <= slack * lambda_K.
    Returns applicable=False when no eigenvector separates the labels.
    """
    pos, neg = labels.require_binary_pairs(g.n)
    truth = np.concatenate([np.ones(len(pos), dtype=np.int64), np.zeros(len(neg), dtype=np.int64)])
    sel = np.concatenate([pos, neg])

    found = None
    for j in range(basis.k):
        col_auc = exact_auc(basis.vectors[sel, j], truth)
        if col_auc == 1.0 or col_auc == 0.0:
            found = j
            break
    if found is None:
        return SmoothnessDiagnostic(False, None, float("nan"), float("nan"), float("nan"), True)

    unit = np.asarray(scores, dtype=np.float64).ravel()
    unit = unit / np.linalg.norm(unit)
    tv = total_variation(g, unit)
    lam = float(basis.values[found])
    bound = slack * lam
    return SmoothnessDiagnostic(True, found, lam, tv, bound, tv <= bound)
