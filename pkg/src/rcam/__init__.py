"""Ensembles of binary classifiers combined by recurrent correlation associative memories."""

from .data import (Dataset, DatasetError, DegenerateDatasetError, FoldPlan, Standardizer,
                   StratifiedRoundRobinKFold, fit_apply_standardizer, impute_missing,
                   load_csv_dataset, load_manifest, stratified_kfold_split)
from .ensemble import (EnsemblePrediction, EnsembleProblem, RCAMEnsembleClassifier,
                       build_memories, build_stimulus, classifier_similarity,
                       classify_batch, verify_weight_identity)
from .evaluation import (EvalConfig, EvalReport, RCAMEnsembleCV, benchmark_report,
                         cross_validate, f_measure, grid_search_alpha)
from .forest import Forest, ForestConfig, fit_forest, forest_base_outputs, weighted_majority_vote
from .memory import (Exponential, Identity, RecallConfig, RecallResult,
                     RecurrentCorrelationMemory, activation_potentials, compute_weights,
                     recall, synchronous_step)
from .tree import DecisionTree, fit_tree, predict_tree

__version__ = "0.1.0"

__all__ = [
    "Dataset", "DatasetError", "DegenerateDatasetError", "FoldPlan", "Standardizer",
    "StratifiedRoundRobinKFold", "fit_apply_standardizer", "impute_missing",
    "load_csv_dataset", "load_manifest", "stratified_kfold_split",
    "EnsemblePrediction", "EnsembleProblem", "RCAMEnsembleClassifier", "build_memories",
    "build_stimulus", "classifier_similarity", "classify_batch", "verify_weight_identity",
    "EvalConfig", "EvalReport", "RCAMEnsembleCV", "benchmark_report", "cross_validate",
    "f_measure", "grid_search_alpha",
    "Forest", "ForestConfig", "fit_forest", "forest_base_outputs", "weighted_majority_vote",
    "Exponential", "Identity", "RecallConfig", "RecallResult", "RecurrentCorrelationMemory",
    "activation_potentials", "compute_weights", "recall", "synchronous_step",
    "DecisionTree", "fit_tree", "predict_tree",
]
