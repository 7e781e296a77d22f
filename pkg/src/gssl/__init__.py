"""Graph-based semi-supervised learning with AUC-guided spectral optimization."""

from .algorithms import (
    AucSpecConfig,
    LabelSet,
    PredictionVector,
    UnlabeledComponentWarning,
    auc_gradient,
    auc_spec_binary,
    auc_spec_multiclass,
    label_propagation,
    leading_eigs_classify,
)
from .bench import DatasetSpec, ExperimentConfig, register_method, run_benchmark, run_trial, summarize
from .data import (
    GENERATORS,
    LabelBudget,
    balanced_subsample,
    gen_gaussian_mixture,
    gen_rectangle,
    gen_ring_of_gaussians,
    load_csv,
    sample_labeled,
    save_csv,
)
from .errors import DataError, GsslError, NumericError, ParameterError
from .graph import (
    Dataset,
    SparseGraph,
    build_graph,
    knn_distances,
    laplacian_apply,
    load_graph,
    random_walk_apply,
    save_graph,
    total_variation,
)
from .metrics import (
    SmoothnessDiagnostic,
    TrialMetrics,
    accuracy,
    exact_auc,
    kappa,
    mean_rank,
    pairwise_mean_gap,
    smoothness_diagnostic,
    soft_auc,
)
from .spectral import EigenBasis, leading_eigenpairs

__version__ = "0.1.0"

__all__ = [
    "AucSpecConfig",
    "DataError",
    "Dataset",
    "DatasetSpec",
    "EigenBasis",
    "ExperimentConfig",
    "GENERATORS",
    "GsslError",
    "LabelBudget",
    "LabelSet",
    "NumericError",
    "ParameterError",
    "PredictionVector",
    "SmoothnessDiagnostic",
    "SparseGraph",
    "TrialMetrics",
    "UnlabeledComponentWarning",
    "accuracy",
    "auc_gradient",
    "auc_spec_binary",
    "auc_spec_multiclass",
    "balanced_subsample",
    "build_graph",
    "exact_auc",
    "gen_gaussian_mixture",
    "gen_rectangle",
    "gen_ring_of_gaussians",
    "kappa",
    "knn_distances",
    "label_propagation",
    "laplacian_apply",
    "leading_eigs_classify",
    "leading_eigenpairs",
    "load_csv",
    "load_graph",
    "mean_rank",
    "pairwise_mean_gap",
    "random_walk_apply",
    "register_method",
    "run_benchmark",
    "run_trial",
    "sample_labeled",
    "save_csv",
    "save_graph",
    "smoothness_diagnostic",
    "soft_auc",
    "summarize",
    "total_variation",
]
