"""Baselines and trainable classifiers over feature vectors."""

from .artifact import (
    KINDS,
    MODEL_FORMAT_VERSION,
    ModelArtifact,
    load_model,
    save_model,
    validate_artifact,
)
from .baselines import (
    FALLBACK_CLASS,
    THRESHOLD_TEST_ORDER,
    baseline_random_predict,
    baseline_threshold_predict,
)
from .dispatch import (
    DEPLOYED_FOREST_PROFILE,
    dataset_matrix,
    predict,
    predict_batch,
    train,
)

__all__ = [
    "KINDS",
    "MODEL_FORMAT_VERSION",
    "ModelArtifact",
    "load_model",
    "save_model",
    "validate_artifact",
    "FALLBACK_CLASS",
    "THRESHOLD_TEST_ORDER",
    "baseline_random_predict",
    "baseline_threshold_predict",
    "DEPLOYED_FOREST_PROFILE",
    "dataset_matrix",
    "predict",
    "predict_batch",
    "train",
]
