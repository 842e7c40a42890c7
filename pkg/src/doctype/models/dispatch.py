"""Training and prediction entry points for every model kind."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import TrainingError
from ..ingest import DOC_TYPES, FEATURE_IDS, DocType, FeatureVector
from ..labeling import LabeledExample
from ..stats import TransformSpec
from .adaboost import AdaboostPredictor, fit_adaboost
from .artifact import KINDS, ModelArtifact, validate_artifact
from .baselines import (
    RandomBaselinePredictor,
    ThresholdBaselinePredictor,
    fit_baseline_random,
    fit_baseline_threshold,
)
from .gnb import GnbPredictor, fit_gnb
from .knn import KnnPredictor, fit_knn
from .svm import SvmPredictor, fit_linear_svm
from .tree import ForestPredictor, TreePredictor, fit_decision_tree, fit_random_forest

#: Production profile: a small forest kept within the deployment budget of
#: at most 10 trees and 5 leaf nodes per tree.
DEPLOYED_FOREST_PROFILE = {
    "n_trees": 10,
    "max_leaf_nodes": 5,
    "min_leaf_size": 1,
    "bootstrap": True,
    "feature_subset": 2,
}

# Kinds whose per-class decision structure needs every class observed.
_REQUIRE_ALL_CLASSES = ("adaboost", "linear-svm")
_REQUIRE_TWO_EXAMPLES = ("adaboost", "linear-svm")


def dataset_matrix(
    dataset: Sequence[LabeledExample], features: Sequence[str] = FEATURE_IDS
) -> tuple[np.ndarray, np.ndarray]:
    """Project a dataset onto (X, y) arrays for the selected features."""
    X = np.array(
        [[_require(ex, fid) for fid in features] for ex in dataset], dtype=float
    )
    y = np.array([int(ex.label) for ex in dataset], dtype=int)
    return X, y


def _require(ex: LabeledExample, feature_id: str) -> float:
    value = ex.features.get(feature_id)
    if value is None:
        raise TrainingError(f"example {ex.id} has missing {feature_id}; impute first")
    return float(value)


def train(
    kind: str,
    dataset: Sequence[LabeledExample],
    hyperparameters: dict | None = None,
    seed: int = 0,
    transform: str = "identity",
    features: Sequence[str] = FEATURE_IDS,
) -> ModelArtifact:
    """Fit one model kind on the dataset and wrap it in a ModelArtifact."""
    if kind not in KINDS:
        raise TrainingError(f"unknown model kind: {kind!r}")
    if not dataset:
        raise TrainingError("cannot train on an empty dataset")
    hyperparameters = dict(hyperparameters or {})
    features = tuple(features)
    if kind == "baseline-threshold" and features != FEATURE_IDS:
        raise TrainingError("baseline-threshold requires the full feature set")

    if kind in _REQUIRE_TWO_EXAMPLES and len(dataset) < 2:
        raise TrainingError(f"{kind} needs at least 2 examples")
    present = {ex.label for ex in dataset}
    if kind in _REQUIRE_ALL_CLASSES and present != set(DOC_TYPES):
        missing = [t.label for t in DOC_TYPES if t not in present]
        raise TrainingError(f"{kind} needs every class present; missing {missing}")

    X, y = dataset_matrix(dataset, features)
    spec = TransformSpec.fit(X, transform)
    Xt = spec.apply(X)

    if kind == "baseline-threshold":
        transformed = [
            LabeledExample(FeatureVector(*(float(v) for v in row)), ex.label, ex.id)
            for row, ex in zip(Xt, dataset)
        ]
        parameters = fit_baseline_threshold(transformed, hyperparameters)
    else:
        parameters = _FITTERS[kind](Xt, y, seed, hyperparameters)

    artifact = ModelArtifact(
        kind=kind,
        transform=spec,
        parameters=parameters,
        seed=seed,
        features=features,
    )
    validate_artifact(artifact)
    return artifact


_FITTERS = {
    "baseline-random": fit_baseline_random,
    "gnb": fit_gnb,
    "knn": fit_knn,
    "decision-tree": fit_decision_tree,
    "random-forest": fit_random_forest,
    "adaboost": fit_adaboost,
    "linear-svm": fit_linear_svm,
}

_PREDICTORS = {
    "gnb": GnbPredictor,
    "knn": KnnPredictor,
    "decision-tree": TreePredictor,
    "random-forest": ForestPredictor,
    "adaboost": AdaboostPredictor,
    "baseline-threshold": ThresholdBaselinePredictor,
    "linear-svm": SvmPredictor,
}


def _predictor(model: ModelArtifact):
    if model._predictor is None:
        validate_artifact(model)
        if model.kind == "baseline-random":
            model._predictor = RandomBaselinePredictor(model.parameters, model.seed)
        else:
            model._predictor = _PREDICTORS[model.kind](model.parameters)
    return model._predictor


def predict(model: ModelArtifact, fv: FeatureVector) -> tuple[DocType, dict[DocType, float]]:
    """Transform the vector, apply the model, break score ties by class order."""
    raw = [_require_value(fv, fid) for fid in model.features]
    row = model.transform.apply_row(raw)
    scores = _predictor(model).scores_row(row)
    pick = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[pick]:
            pick = i
    return DocType(pick), {t: float(scores[int(t)]) for t in DOC_TYPES}


def _require_value(fv: FeatureVector, feature_id: str) -> float:
    value = fv.get(feature_id)
    if value is None:
        raise ValueError(f"feature {feature_id} is missing; impute before predicting")
    return float(value)


def predict_batch(
    model: ModelArtifact, X_raw: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized path for evaluation: returns (labels, score matrix)."""
    Xt = model.transform.apply(X_raw)
    scores = _predictor(model).scores_matrix(Xt)
    return scores.argmax(axis=1), scores
