"""FCBF and resampled FCBF (RFCBF) feature selection with a KNN
cross-validation harness."""

from .evaluation import CvReport, ConfusionCounts, accuracy, evaluate_pipeline, knn_predict, stratified_kfold
from .fcbf import RankedList, SelectionResult, fcbf, redundancy_pass, relevance_pass
from .info_theory import (
    DiscreteColumn,
    conditional_entropy,
    entropy,
    information_gain,
    symmetrical_uncertainty,
)
from .io import load_dataset
from .preprocess import DiscreteDataset, RawDataset, discretize, impute_knn, standardize
from .resampled import SelectionParams, averaged_su, resample, rfcbf

__version__ = "0.1.0"

__all__ = [
    "ConfusionCounts", "CvReport", "DiscreteColumn", "DiscreteDataset", "RankedList",
    "RawDataset", "SelectionParams", "SelectionResult", "accuracy", "averaged_su",
    "conditional_entropy", "discretize", "entropy", "evaluate_pipeline", "fcbf",
    "impute_knn", "information_gain", "knn_predict", "load_dataset", "redundancy_pass",
    "relevance_pass", "resample", "rfcbf", "standardize", "stratified_kfold",
    "symmetrical_uncertainty",
]
