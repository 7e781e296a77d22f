"""Multi-trial benchmark harness.

A benchmark runs a method matrix over label budgets and trials on one
dataset. The graph (and, for the eigenvector baseline, the eigenbasis) is
built once and shared; each (budget, trial) pair samples one labeled set
that every method sees, so comparisons are paired. Trial seeds derive
deterministically from the base seed, and result rows are sorted before
writing, so the output CSV is byte-identical across runs and --jobs
settings (runtime_ms aside).
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .algorithms import (
    AucSpecConfig,
    LabelSet,
    auc_spec_binary,
    label_propagation,
    leading_eigs_classify,
)
from .data import GENERATORS, LabelBudget, load_csv, sample_labeled
from .errors import DataError, GsslError, ParameterError
from .graph import Dataset, SparseGraph, build_graph, load_graph, save_graph
from .metrics import TrialMetrics, accuracy, exact_auc, mean_rank
from .spectral import leading_eigenpairs

RESULT_COLUMNS = (
    "dataset",
    "method",
    "n_labeled",
    "trial",
    "seed",
    "auc",
    "accuracy",
    "runtime_ms",
    "iterations",
    "converged",
)

DEFAULT_BUDGETS = (8, 10, 12, 20, 200)


@dataclass(frozen=True)
class DatasetSpec:
    """Where the benchmark data comes from: a generator or a CSV file."""

    generator: str | None = None
    csv_path: str | None = None
    n: int | None = None
    beta: float | None = None
    data_seed: int = 0

    def __post_init__(self):
        if (self.generator is None) == (self.csv_path is None):
            raise ParameterError("specify exactly one of generator or csv_path")
        if self.generator is not None:
            if self.generator not in GENERATORS:
                raise ParameterError(
                    "unknown generator %r (choose from %s)" % (self.generator, sorted(GENERATORS))
                )
            if self.n is None:
                raise ParameterError("generator datasets need n")
            if self.generator == "rectangle" and self.beta is None:
                raise ParameterError("rectangle generator needs beta")

    def load(self) -> Dataset:
        if self.csv_path is not None:
            return load_csv(self.csv_path)
        if self.generator == "rectangle":
            ds = GENERATORS["rectangle"](self.n, self.beta, self.data_seed)
            return replace(ds, name="rectangle_beta%g" % self.beta)
        return GENERATORS[self.generator](self.n, self.data_seed)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully-resolved benchmark configuration."""

    dataset: DatasetSpec
    methods: tuple[str, ...] = ("auc_spec", "label_prop", "top_eigs")
    budgets: tuple[int, ...] = DEFAULT_BUDGETS
    trials: int = 50
    base_seed: int = 0
    scale_k: int = 20
    neighbor_k: int = 50
    auc_spec: AucSpecConfig = field(default_factory=AucSpecConfig)
    lp_tol: float = 1e-4
    lp_max_iter: int = 1000
    eig_k: int = 5
    eig_ridge: float = 1e-3
    eig_tol: float = 1e-6
    eig_max_iter: int = 5000
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.methods:
            raise ParameterError("methods list is empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ParameterError("unknown method(s) %s; registered: %s" % (unknown, sorted(METHODS)))
        if any(b < 2 for b in self.budgets):
            raise ParameterError("label budgets must be >= 2")
        if self.jobs < 1:
            raise ParameterError("jobs must be >= 1")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _run_auc_spec(graph, labels, cfg, ctx):
    return auc_spec_binary(graph, labels, cfg.auc_spec)


def _run_label_prop(graph, labels, cfg, ctx):
    return label_propagation(graph, labels, tol=cfg.lp_tol, max_iter=cfg.lp_max_iter)


def _run_top_eigs(graph, labels, cfg, ctx):
    return leading_eigs_classify(
        graph,
        labels,
        k=cfg.eig_k,
        ridge=cfg.eig_ridge,
        eig_tol=cfg.eig_tol,
        eig_max_iter=cfg.eig_max_iter,
        basis=ctx.get("eigenbasis"),
    )


# method name -> callable(graph, labels, config, context) -> PredictionVector;
# extend via register_method.
METHODS = {
    "auc_spec": _run_auc_spec,
    "label_prop": _run_label_prop,
    "top_eigs": _run_top_eigs,
}


def register_method(name: str, runner) -> None:
    """Add a method to the harness; runner(graph, labels, config, context)."""
    if name in METHODS:
        raise ParameterError("method %r already registered" % name)
    METHODS[name] = runner


def prepare_graph(data: Dataset, config: ExperimentConfig, cache_path=None) -> SparseGraph:
    """Build the graph, or reuse/populate the cache file when one is given."""
    if cache_path is not None:
        try:
            g = load_graph(cache_path)
        except FileNotFoundError:
            g = None
        if g is not None:
            if g.n != data.n:
                raise DataError(
                    "graph cache %s has n=%d but dataset has n=%d" % (cache_path, g.n, data.n)
                )
            return g
    g = build_graph(data, scale_k=config.scale_k, neighbor_k=config.neighbor_k)
    if cache_path is not None:
        save_graph(g, cache_path)
    return g


def evaluate_prediction(pred, labels: LabelSet, truth: np.ndarray, runtime_ms: float) -> TrialMetrics:
    """AUC of the continuous scores and accuracy of the hard labels, unlabeled points only."""
    unlabeled = np.setdiff1d(np.arange(len(truth)), labels.indices)
    scores = pred.scores
    if scores.ndim != 1:
        raise ParameterError("benchmark metrics are defined for binary (1-D) scores")
    return TrialMetrics(
        auc=exact_auc(scores[unlabeled], truth[unlabeled]),
        accuracy=accuracy(pred.hard_labels, truth, unlabeled),
        runtime_ms=runtime_ms,
        iterations=pred.iterations,
        converged=pred.converged,
    )


def run_trial(
    graph: SparseGraph,
    data: Dataset,
    config: ExperimentConfig,
    method: str,
    budget: int,
    trial: int,
    context: dict | None = None,
    labels: LabelSet | None = None,
) -> tuple[TrialMetrics, object]:
    """One (method, budget, trial) cell; returns (metrics, prediction)."""
    context = context if context is not None else {}
    seed = config.base_seed + trial
    if labels is None:
        labels = sample_labeled(data, LabelBudget(total=budget, seed=seed))
    start = time.perf_counter()
    pred = METHODS[method](graph, labels, config, context)
    runtime_ms = (time.perf_counter() - start) * 1000.0
    return evaluate_prediction(pred, labels, data.labels, runtime_ms), pred


def _trial_rows(graph, data, config, context, budget, trial):
    seed = config.base_seed + trial
    labels = sample_labeled(data, LabelBudget(total=budget, seed=seed))
    rows = []
    for method in config.methods:
        try:
            tm, _ = run_trial(graph, data, config, method, budget, trial, context, labels)
            row = {
                "dataset": data.name,
                "method": method,
                "n_labeled": budget,
                "trial": trial,
                "seed": seed,
                "auc": tm.auc,
                "accuracy": tm.accuracy,
                "runtime_ms": tm.runtime_ms,
                "iterations": tm.iterations,
                "converged": tm.converged,
            }
        except GsslError as exc:
            row = {
                "dataset": data.name,
                "method": method,
                "n_labeled": budget,
                "trial": trial,
                "seed": seed,
                "auc": float("nan"),
                "accuracy": float("nan"),
                "runtime_ms": 0.0,
                "iterations": 0,
                "converged": False,
                "error": str(exc),
            }
        rows.append(row)
    return rows


def run_benchmark(config: ExperimentConfig, progress=None, cache_path=None) -> list[dict]:
    """Run the full method x budget x trial matrix; returns sorted result rows.

    The graph is constructed exactly once (or loaded from cache_path); the
    eigenbasis once if the eigenvector baseline participates. Failures of
    individual runs are recorded (converged=false, nan metrics) and the
    benchmark continues.
    """
    data = config.dataset.load()
    if data.labels is None:
        raise DataError("benchmark dataset has no ground-truth labels")
    if len(data.classes) != 2 or set(data.classes.tolist()) != {0, 1}:
        raise DataError("benchmark harness expects binary 0/1 labels, got %s" % data.classes.tolist())

    graph = prepare_graph(data, config, cache_path)
    context = {}
    if "top_eigs" in config.methods:
        context["eigenbasis"] = leading_eigenpairs(
            graph, config.eig_k, tol=config.eig_tol, max_iter=config.eig_max_iter
        )

    cells = [(budget, trial) for budget in config.budgets for trial in range(config.trials)]
    if config.jobs == 1:
        nested = []
        for budget, trial in cells:
            nested.append(_trial_rows(graph, data, config, context, budget, trial))
            if progress is not None:
                progress(budget, trial)
    else:
        from joblib import Parallel, delayed

        nested = Parallel(n_jobs=config.jobs)(
            delayed(_trial_rows)(graph, data, config, context, budget, trial) for budget, trial in cells
        )
    rows = [row for group in nested for row in group]
    rows.sort(key=lambda r: (r["dataset"], r["method"], r["n_labeled"], r["trial"]))
    return rows


def summarize(rows: list[dict]) -> list[dict]:
    """Aggregate rows into per-cell means plus a mean-rank block.

    Returns long-format records (section, dataset, method, n_labeled,
    metric, value): section "mean" holds per dataset x method x budget
    means; section "mean_rank" ranks methods per dataset by mean metric and
    averages the ranks across datasets.
    """
    cells: dict[tuple, list[dict]] = {}
    for r in rows:
        cells.setdefault((r["dataset"], r["method"], r["n_labeled"]), []).append(r)

    out = []
    means: dict[tuple, dict[str, float]] = {}
    for (ds, method, budget), group in sorted(cells.items()):
        for metric in ("auc", "accuracy", "runtime_ms"):
            vals = [g[metric] for g in group if np.isfinite(g[metric])]
            value = float(np.mean(vals)) if vals else float("nan")
            means[(ds, method, budget, metric)] = value
            out.append(
                {
                    "section": "mean",
                    "dataset": ds,
                    "method": method,
                    "n_labeled": budget,
                    "metric": metric,
                    "value": value,
                }
            )

    datasets = sorted({r["dataset"] for r in rows})
    methods = sorted({r["method"] for r in rows})
    budgets = sorted({r["n_labeled"] for r in rows})
    for budget in budgets:
        for metric in ("auc", "accuracy"):
            table = {
                ds: {m: means[(ds, m, budget, metric)] for m in methods}
                for ds in datasets
                if all((ds, m, budget, metric) in means for m in methods)
            }
            if not table:
                continue
            for method, rank in sorted(mean_rank(table).items()):
                out.append(
                    {
                        "section": "mean_rank",
                        "dataset": "all",
                        "method": method,
                        "n_labeled": budget,
                        "metric": metric,
                        "value": rank,
                    }
                )
    return out


def _format_cell(column: str, value) -> str:
    if column in ("auc", "accuracy", "value"):
        return repr(float(value))
    if column == "runtime_ms":
        return "%.3f" % value
    if column == "converged":
        return "true" if value else "false"
    return str(value)


def write_results_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(c, row[c]) for c in RESULT_COLUMNS) + "\n")


def write_summary_csv(records: list[dict], path) -> None:
    columns = ("section", "dataset", "method", "n_labeled", "metric", "value")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for rec in records:
            fh.write(",".join(_format_cell(c, rec[c]) for c in columns) + "\n")


def write_config_json(config: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config.to_json() + "\n")
