"""Baselines and change-signal feature pipelines."""

from .baselines import CORPUS_PRIORS, InvalidDistribution, majority_baseline, random_baseline
from .bigrams import InsufficientData, error_correlation_bigrams
from .fsd import MetaFeatureSequence, fsd_features
from .linear import (
    DomainError,
    LinearModel,
    LossSpec,
    TrainConfig,
    TrainingDiverged,
    fit_linear,
    focal_alpha,
    focal_loss,
)
from .pipeline import MODELS, BaselineConfig, run_baseline
from .scd import (
    Forecaster,
    InsufficientHistory,
    SingularSystem,
    fit_forecaster,
    orthogonal_procrustes,
    ridge_fit,
    scd_forecast,
)
from .sequence import context_features
from .text import EmptyVocabulary, TfidfVocabulary, tfidf_featurize, tokenize

__all__ = [
    "CORPUS_PRIORS",
    "MODELS",
    "BaselineConfig",
    "DomainError",
    "EmptyVocabulary",
    "Forecaster",
    "InsufficientData",
    "InsufficientHistory",
    "InvalidDistribution",
    "LinearModel",
    "LossSpec",
    "MetaFeatureSequence",
    "SingularSystem",
    "TfidfVocabulary",
    "TrainConfig",
    "TrainingDiverged",
    "context_features",
    "error_correlation_bigrams",
    "fit_forecaster",
    "fit_linear",
    "focal_alpha",
    "focal_loss",
    "fsd_features",
    "majority_baseline",
    "orthogonal_procrustes",
    "random_baseline",
    "ridge_fit",
    "run_baseline",
    "scd_forecast",
    "tfidf_featurize",
    "tokenize",
]
