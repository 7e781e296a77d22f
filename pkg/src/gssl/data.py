"""Synthetic dataset generators, CSV ingestion, and labeled-set sampling.

Generators are deterministic functions of (parameters, seed) on the
portable RNG streams; Gaussians are drawn via Box-Muller so the same seed
yields the same bytes on every platform.

Dataset CSV schema: UTF-8, comma-separated, header row, one sample per row,
features in the numeric columns, class ids in the `label` column.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DataError, ParameterError
from .graph import Dataset
from .algorithms import LabelSet

_RING_CLUSTERS = 8
_RING_RADIUS = 5.0
_RING_VARIANCE = 0.5
_MIXTURE_VARIANCE = 1.5


@dataclass(frozen=True)
class LabelBudget:
    """Total number of labels to reveal, split equally across classes."""

    total: int
    seed: int = 0

    def per_class(self, n_classes: int) -> int:
        if n_classes < 1:
            raise ParameterError("need at least one class")
        if self.total % n_classes != 0:
            raise ParameterError(
                "budget %d not divisible by %d classes (equal split required)" % (self.total, n_classes)
            )
        per = self.total // n_classes
        if per < 1:
            raise ParameterError("budget %d leaves no labels for some class" % self.total)
        return per


def gen_ring_of_gaussians(n: int, seed: int = 0) -> Dataset:
    """Eight Gaussian clusters on a circle of radius 5, variance 0.5 each.

    Cluster i is centered at angle 2*pi*i/8; labels alternate 1,0,1,0,...
    by cluster index, n/8 points per cluster.
    """
    if n % _RING_CLUSTERS != 0:
        raise ParameterError("n=%d must be divisible by %d" % (n, _RING_CLUSTERS))
    per = n // _RING_CLUSTERS
    gen = rng.stream(seed, rng.GENERATE)
    noise = rng.normal_pairs(gen, 2 * n).reshape(n, 2) * np.sqrt(_RING_VARIANCE)
    feats = np.empty((n, 2))
    labels = np.empty(n, dtype=np.int64)
    for i in range(_RING_CLUSTERS):
        theta = 2.0 * np.pi * i / _RING_CLUSTERS
        center = np.array([_RING_RADIUS * np.cos(theta), _RING_RADIUS * np.sin(theta)])
        feats[i * per : (i + 1) * per] = center + noise[i * per : (i + 1) * per]
        labels[i * per : (i + 1) * per] = 1 - (i % 2)
    return Dataset(features=feats, labels=labels, name="ring")


def gen_gaussian_mixture(n: int, seed: int = 0) -> Dataset:
    """Two overlapping 2-D Gaussians: N((1,1), 1.5 I) labeled 1, N((-1,-1), 1.5 I) labeled 0."""
    if n % 2 != 0:
        raise ParameterError("n=%d must be even" % n)
    half = n // 2
    gen = rng.stream(seed, rng.GENERATE)
    noise = rng.normal_pairs(gen, 2 * n).reshape(n, 2) * np.sqrt(_MIXTURE_VARIANCE)
    feats = np.empty((n, 2))
    feats[:half] = np.array([1.0, 1.0]) + noise[:half]
    feats[half:] = np.array([-1.0, -1.0]) + noise[half:]
    labels = np.concatenate([np.ones(half, dtype=np.int64), np.zeros(n - half, dtype=np.int64)])
    return Dataset(features=feats, labels=labels, name="gmm")


def gen_rectangle(n: int, beta: float, seed: int = 0) -> Dataset:
    """Uniform points on [0,1] x [0,beta]; label 1 iff the second coordinate >= beta/2."""
    if n < 2:
        raise ParameterError("n=%d must be >= 2" % n)
    if not (0.0 < beta <= 1.0):
        raise ParameterError("beta=%r must lie in (0, 1]" % beta)
    gen = rng.stream(seed, rng.GENERATE)
    u = gen.random((n, 2))
    feats = np.stack([u[:, 0], u[:, 1] * beta], axis=1)
    labels = (feats[:, 1] >= beta / 2.0).astype(np.int64)
    return Dataset(features=feats, labels=labels, name="rectangle")


GENERATORS = {
    "ring": gen_ring_of_gaussians,
    "gmm": gen_gaussian_mixture,
    "rectangle": gen_rectangle,
}


def save_csv(data: Dataset, path) -> None:
    """Write features (full precision, lossless round-trip) plus the label column."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["f%d" % j for j in range(data.d)]
        if data.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(data.n):
            row = [repr(float(x)) for x in data.features[i]]
            if data.labels is not None:
                row.append(str(int(data.labels[i])))
            writer.writerow(row)


def load_csv(path, feature_columns: list[str] | None = None, label_column: str = "label") -> Dataset:
    """Load a dataset CSV; every non-label column is a feature unless listed.

    Malformed cells and non-finite values are rejected with the offending
    line number. Pass label_column=None for unlabeled data.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("%s: empty file, header row required" % path) from None
        header = [h.strip() for h in header]
        if label_column is not None and label_column not in header:
            raise DataError("%s: missing required column %r" % (path, label_column))
        if feature_columns is None:
            feature_columns = [h for h in header if h != label_column]
        missing = [c for c in feature_columns if c not in header]
        if missing:
            raise DataError("%s: missing feature column(s) %s" % (path, missing))
        feat_idx = [header.index(c) for c in feature_columns]
        label_idx = header.index(label_column) if label_column is not None else None

        feats = []
        labels = [] if label_idx is not None else None
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError("%s: line %d has %d fields, expected %d" % (path, lineno, len(row), len(header)))
            try:
                vals = [float(row[j]) for j in feat_idx]
            except ValueError:
                raise DataError("%s: line %d has a non-numeric feature cell" % (path, lineno)) from None
            if not all(np.isfinite(vals)):
                raise DataError("%s: line %d has a non-finite feature value" % (path, lineno))
            feats.append(vals)
            if labels is not None:
                try:
                    labels.append(int(row[label_idx]))
                except ValueError:
                    raise DataError("%s: line %d has an unparseable label" % (path, lineno)) from None
    if len(feats) < 2:
        raise DataError("%s: need at least 2 rows" % path)
    name = str(path).rsplit("/", 1)[-1]
    name = name[:-4] if name.endswith(".csv") else name
    return Dataset(
        features=np.array(feats),
        labels=np.array(labels, dtype=np.int64) if labels is not None else None,
        name=name,
    )


def balanced_subsample(data: Dataset, n: int, classes: tuple[int, int], seed: int = 0) -> Dataset:
    """Draw n/2 rows per class without replacement; relabel classes to {0, 1}."""
    if data.labels is None:
        raise ParameterError("balanced_subsample needs a labeled dataset")
    if n % 2 != 0 or n < 4:
        raise ParameterError("n=%d must be even and >= 4" % n)
    a, b = classes
    gen = rng.stream(seed, rng.SUBSAMPLE)
    picks = []
    for new_label, cls in enumerate((a, b)):
        members = np.flatnonzero(data.labels == cls)
        if len(members) < n // 2:
            raise ParameterError("class %d has %d rows, need %d" % (cls, len(members), n // 2))
        chosen = np.sort(gen.choice(members, size=n // 2, replace=False))
        picks.append((chosen, new_label))
    feats = np.concatenate([data.features[c] for c, _ in picks])
    labels = np.concatenate([np.full(len(c), lab, dtype=np.int64) for c, lab in picks])
    return Dataset(features=feats, labels=labels, name="%s_sub%d" % (data.name, n))


def sample_labeled(data: Dataset, budget: LabelBudget) -> LabelSet:
    """Reveal budget.total labels: a uniform without-replacement draw per class."""
    if data.labels is None:
        raise ParameterError("sample_labeled needs a labeled dataset")
    classes = data.classes
    per = budget.per_class(len(classes))
    gen = rng.stream(budget.seed, rng.LABELS)
    idx_parts, lab_parts = [], []
    for cls in classes:
        members = np.flatnonzero(data.labels == cls)
        if len(members) < per:
            raise ParameterError("class %d has %d points, budget needs %d" % (cls, len(members), per))
        chosen = gen.choice(members, size=per, replace=False)
        idx_parts.append(chosen)
        lab_parts.append(np.full(per, cls, dtype=np.int64))
    return LabelSet(indices=np.concatenate(idx_parts), labels=np.concatenate(lab_parts))
