"""Command-line surface.

Subcommands: generate (write a synthetic dataset CSV), graph (build and
cache a graph), run (one method on one labeled sample), benchmark (the full
trial matrix with result and summary CSVs).

Exit codes: 0 success, 1 usage/parameter error, 2 data error,
3 numeric/convergence error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from .algorithms import AucSpecConfig
from .bench import (
    DEFAULT_BUDGETS,
    METHODS,
    DatasetSpec,
    ExperimentConfig,
    prepare_graph,
    run_benchmark,
    run_trial,
    summarize,
    write_config_json,
    write_results_csv,
    write_summary_csv,
)
from .data import GENERATORS, save_csv
from .errors import DataError, GsslError, NumericError, ParameterError
from .graph import build_graph, save_graph

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    # not required at parse time: benchmark may take the dataset from --config
    src = p.add_mutually_exclusive_group()
    src.add_argument("--csv", help="dataset CSV path (header row, `label` column)")
    src.add_argument("--generator", choices=sorted(GENERATORS), help="synthetic dataset family")
    p.add_argument("--n", type=int, default=None, help="points to generate")
    p.add_argument("--beta", type=float, default=None, help="rectangle height parameter")
    p.add_argument("--data-seed", type=int, default=0, help="generator seed")


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scale-k", type=int, default=None, help="K-th neighbor for adaptive bandwidth (default 20)")
    p.add_argument("--neighbor-k", type=int, default=None, help="kNN sparsification degree (default 50)")
    p.add_argument("--graph-cache", default=None, help="graph cache file to reuse or create")


def _add_method_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--auc-warmup-iters", type=int, default=None)
    p.add_argument("--auc-warmup-step", type=float, default=None)
    p.add_argument("--auc-main-step", type=float, default=None)
    p.add_argument("--auc-tol", type=float, default=None)
    p.add_argument("--auc-max-iter", type=int, default=None)
    p.add_argument("--auc-init", choices=("paper", "zero", "random"), default=None)
    p.add_argument("--auc-threshold", choices=("zero", "best_on_labeled"), default=None)
    p.add_argument("--lp-tol", type=float, default=None)
    p.add_argument("--lp-max-iter", type=int, default=None)
    p.add_argument("--eig-k", type=int, default=None)
    p.add_argument("--eig-ridge", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gssl", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[], help="write a synthetic dataset CSV")
    gen.add_argument("generator", choices=sorted(GENERATORS))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--beta", type=float, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    gra = sub.add_parser("graph", help="build a graph and cache it to a file")
    gra.add_argument("--csv", required=True)
    gra.add_argument("--scale-k", type=int, default=20)
    gra.add_argument("--neighbor-k", type=int, default=50)
    gra.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run one method on one labeled sample")
    _add_dataset_args(run)
    _add_graph_args(run)
    _add_method_args(run)
    run.add_argument("--method", required=True, help="one of: %s" % ", ".join(sorted(METHODS)))
    run.add_argument("--budget", type=int, required=True, help="total labels to reveal")
    run.add_argument("--seed", type=int, default=0, help="labeled-sample seed")
    run.add_argument("--dump-scores", default=None, help="write per-node scores CSV here")

    ben = sub.add_parser("benchmark", help="run the full trial matrix and write CSVs")
    _add_dataset_args(ben)
    _add_graph_args(ben)
    _add_method_args(ben)
    ben.add_argument("--methods", default=None, help="comma list (default all registered)")
    ben.add_argument("--budgets", default=None, help="comma list (default %s)" % ",".join(map(str, DEFAULT_BUDGETS)))
    ben.add_argument("--trials", type=int, default=None)
    ben.add_argument("--seed", type=int, default=None, help="base seed; trial t uses seed+t")
    ben.add_argument("--jobs", type=int, default=None, help="parallel trial workers (env GSSL_JOBS)")
    ben.add_argument("--config", default=None, help="JSON config file; flags override its values")
    ben.add_argument("--out", required=True, help="result CSV path (summary/config written next to it)")
    return parser


def _dataset_spec(args) -> DatasetSpec:
    if args.csv is not None:
        return DatasetSpec(csv_path=args.csv)
    return DatasetSpec(generator=args.generator, n=args.n, beta=args.beta, data_seed=args.data_seed)


def _auc_config(values: dict) -> AucSpecConfig:
    base = AucSpecConfig()
    return AucSpecConfig(
        warmup_iters=_pick(values, "auc_warmup_iters", base.warmup_iters),
        warmup_step=_pick(values, "auc_warmup_step", base.warmup_step),
        main_step=_pick(values, "auc_main_step", base.main_step),
        tol=_pick(values, "auc_tol", base.tol),
        max_iter=_pick(values, "auc_max_iter", base.max_iter),
        init_mode=_pick(values, "auc_init", base.init_mode),
        threshold_mode=_pick(values, "auc_threshold", base.threshold_mode),
    )


def _pick(values: dict, key: str, default):
    v = values.get(key)
    return default if v is None else v


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ParameterError("expected a comma-separated integer list, got %r" % text) from None


def cmd_generate(args) -> int:
    if args.generator == "rectangle":
        if args.beta is None:
            raise ParameterError("rectangle generator needs --beta")
        data = GENERATORS["rectangle"](args.n, args.beta, args.seed)
    else:
        data = GENERATORS[args.generator](args.n, args.seed)
    save_csv(data, args.out)
    print("wrote %d rows to %s" % (data.n, args.out))
    return 0


def cmd_graph(args) -> int:
    from .data import load_csv

    data = load_csv(args.csv)
    g = build_graph(data, scale_k=args.scale_k, neighbor_k=args.neighbor_k)
    save_graph(g, args.out)
    print("graph: n=%d edges=%d -> %s" % (g.n, g.edge_count, args.out))
    return 0


def _experiment_config(args, file_values: dict | None = None) -> ExperimentConfig:
    values = dict(file_values or {})
    for key, val in vars(args).items():
        if val is not None:
            values[key.replace("-", "_")] = val

    methods = values.get("methods")
    if isinstance(methods, str):
        methods = tuple(tok for tok in methods.split(",") if tok.strip())
    budgets = values.get("budgets")
    if isinstance(budgets, str):
        budgets = _parse_int_list(budgets)
    elif isinstance(budgets, list):
        budgets = tuple(int(b) for b in budgets)

    if values.get("csv") is not None:
        spec = DatasetSpec(csv_path=values["csv"])
    else:
        spec = DatasetSpec(
            generator=values.get("generator"),
            n=values.get("n"),
            beta=values.get("beta"),
            data_seed=int(values.get("data_seed", 0)),
        )

    base = ExperimentConfig(dataset=spec)
    jobs = values.get("jobs")
    if jobs is None:
        jobs = int(os.environ.get("GSSL_JOBS", "1"))
    return ExperimentConfig(
        dataset=spec,
        methods=tuple(methods) if methods else base.methods,
        budgets=tuple(budgets) if budgets else base.budgets,
        trials=int(_pick(values, "trials", base.trials)),
        base_seed=int(_pick(values, "seed", base.base_seed)),
        scale_k=int(_pick(values, "scale_k", base.scale_k)),
        neighbor_k=int(_pick(values, "neighbor_k", base.neighbor_k)),
        auc_spec=_auc_config(values),
        lp_tol=float(_pick(values, "lp_tol", base.lp_tol)),
        lp_max_iter=int(_pick(values, "lp_max_iter", base.lp_max_iter)),
        eig_k=int(_pick(values, "eig_k", base.eig_k)),
        eig_ridge=float(_pick(values, "eig_ridge", base.eig_ridge)),
        jobs=int(jobs),
    )


def cmd_run(args) -> int:
    config = _experiment_config(args)
    data = config.dataset.load()
    if data.labels is None:
        raise DataError("run needs a labeled dataset")
    graph = prepare_graph(data, config, args.graph_cache)
    method = args.method
    if method not in METHODS:
        raise ParameterError("unknown method %r; registered: %s" % (method, sorted(METHODS)))
    tm, pred = run_trial(graph, data, config, method, args.budget, trial=0)
    resolved = dict(asdict(config), method=method, budget=args.budget)
    print("config: %s" % json.dumps(resolved, sort_keys=True))
    print("auc=%s" % repr(tm.auc))
    print("accuracy=%s" % repr(tm.accuracy))
    print("runtime_ms=%.3f" % tm.runtime_ms)
    print("iterations=%d" % tm.iterations)
    print("converged=%s" % ("true" if tm.converged else "false"))
    if args.dump_scores:
        with open(args.dump_scores, "w", encoding="utf-8", newline="") as fh:
            fh.write("node,score,hard_label\n")
            scores = pred.scores
            for i in range(graph.n):
                s = scores[i] if scores.ndim == 1 else scores[i].max()
                fh.write("%d,%s,%d\n" % (i, repr(float(s)), int(pred.hard_labels[i])))
    return 0


def cmd_benchmark(args) -> int:
    file_values = None
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except FileNotFoundError:
            raise DataError("config file not found: %s" % args.config) from None
        except json.JSONDecodeError as exc:
            raise DataError("config file %s is not valid JSON: %s" % (args.config, exc)) from None
        if not isinstance(file_values, dict):
            raise DataError("config file must hold a JSON object")
    config = _experiment_config(args, file_values)

    def progress(budget, trial):
        if trial == config.trials - 1:
            print("done: budget=%d (%d trials)" % (budget, config.trials), file=sys.stderr)

    rows = run_benchmark(config, progress=progress, cache_path=args.graph_cache)
    write_results_csv(rows, args.out)
    stem = args.out[:-4] if args.out.endswith(".csv") else args.out
    write_summary_csv(summarize(rows), stem + ".summary.csv")
    write_config_json(config, stem + ".config.json")
    print("results: %s" % args.out)
    print("summary: %s" % (stem + ".summary.csv"))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": cmd_generate,
        "graph": cmd_graph,
        "run": cmd_run,
        "benchmark": cmd_benchmark,
    }
    try:
        return handlers[args.command](args)
    except ParameterError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except GsslError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
