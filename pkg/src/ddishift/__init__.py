"""Simulate realistic distribution changes for emerging drug-drug interaction
benchmarks: similarity-controlled drug splits, S1/S2 task assembly,
approval-time consistency scoring and prediction-file evaluation."""

from .core import (
    MULTICLASS,
    MULTILABEL,
    Dataset,
    DdiTriplet,
    DrugSplit,
    Fingerprint,
    PredictionRecord,
    Strategy,
    TaskSplit,
    validate_dataset,
)
from .simkit import SimilarityMatrix, max_cross_similarity, pairwise_similarity, tanimoto
from .splitkit import SplitRequest, build_clusters, cluster_split, frequency_split, make_split, random_split, time_split
from .taskgen import assemble_tasks, carve_validation, dataset_stats, sample_negatives
from .consistency import PERFECT, consistency_index, consistency_sweep
from .metrics import accuracy, cohens_kappa, macro_f1, multiclass_report, multilabel_report, pr_auc, roc_auc
from .baseline import fit, gamma_sweep, predict_pair, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "MULTICLASS",
    "MULTILABEL",
    "Dataset",
    "DdiTriplet",
    "DrugSplit",
    "Fingerprint",
    "PredictionRecord",
    "Strategy",
    "TaskSplit",
    "validate_dataset",
    "SimilarityMatrix",
    "max_cross_similarity",
    "pairwise_similarity",
    "tanimoto",
    "SplitRequest",
    "build_clusters",
    "cluster_split",
    "frequency_split",
    "make_split",
    "random_split",
    "time_split",
    "assemble_tasks",
    "carve_validation",
    "dataset_stats",
    "sample_negatives",
    "PERFECT",
    "consistency_index",
    "consistency_sweep",
    "accuracy",
    "cohens_kappa",
    "macro_f1",
    "multiclass_report",
    "multilabel_report",
    "pr_auc",
    "roc_auc",
    "fit",
    "gamma_sweep",
    "predict_pair",
    "run_benchmark",
]

