"""The two reference baselines: weighted random guessing and threshold rules."""

from __future__ import annotations

import numpy as np

from ..ingest import DocType, FeatureVector
from ..stats import ThresholdTable, derive_thresholds

N_CLASSES = 3

#: Classes are tested most-restrictive-first; unmatched vectors fall back
#: to the majority class.
THRESHOLD_TEST_ORDER = (DocType.THESIS, DocType.SLIDES, DocType.RESEARCH)
FALLBACK_CLASS = DocType.RESEARCH


def fit_baseline_random(X, y, seed, hyperparameters) -> dict:
    del X, seed, hyperparameters
    counts = np.bincount(y, minlength=N_CLASSES)
    return {"weights": [float(v) for v in counts / counts.sum()]}


def fit_baseline_threshold(dataset, hyperparameters) -> dict:
    table = derive_thresholds(
        dataset,
        quantile_lo=hyperparameters.get("quantile_lo", 0.025),
        quantile_hi=hyperparameters.get("quantile_hi", 0.975),
    )
    return {
        "table": table.to_dict(),
        "fallback": FALLBACK_CLASS.label,
    }


def baseline_random_predict(model, n: int, seed: int) -> list[DocType]:
    """Draw n class labels from the stored categorical distribution."""
    if model.kind != "baseline-random":
        raise ValueError(f"expected a baseline-random model, got {model.kind!r}")
    weights = model.parameters["weights"]
    rng = np.random.default_rng(seed)
    draws = rng.choice(N_CLASSES, size=n, p=weights)
    return [DocType(int(v)) for v in draws]


def baseline_threshold_predict(table: ThresholdTable, fv: FeatureVector) -> DocType:
    """First class whose four bounds all contain the features, else Research."""
    for doc_type in THRESHOLD_TEST_ORDER:
        if table.contains(doc_type, fv):
            return doc_type
    return FALLBACK_CLASS


class RandomBaselinePredictor:
    """Single-vector predictions replay the first draw of the model seed,
    keeping predict deterministic; batch prediction goes through
    baseline_random_predict with an explicit seed."""

    def __init__(self, parameters: dict, seed: int):
        self.weights = [float(w) for w in parameters["weights"]]
        self._seed = seed
        first = np.random.default_rng(seed).choice(N_CLASSES, p=self.weights)
        self._first_draw = int(first)

    def scores_matrix(self, X: np.ndarray) -> np.ndarray:
        scores = np.zeros((X.shape[0], N_CLASSES))
        scores[:, self._first_draw] = 1.0
        return scores

    def scores_row(self, row) -> list[float]:
        scores = [0.0] * N_CLASSES
        scores[self._first_draw] = 1.0
        return scores


class ThresholdBaselinePredictor:
    def __init__(self, parameters: dict):
        self.table = ThresholdTable.from_dict(parameters["table"])
        self.fallback = DocType.from_label(parameters["fallback"])

    def scores_matrix(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros((X.shape[0], N_CLASSES))
        for i, row in enumerate(X):
            out[i] = self.scores_row(row)
        return out

    def scores_row(self, row) -> list[float]:
        fv = FeatureVector(*[float(v) for v in row])
        picked = baseline_threshold_predict(self.table, fv)
        scores = [0.0] * N_CLASSES
        scores[int(picked)] = 1.0
        return scores
