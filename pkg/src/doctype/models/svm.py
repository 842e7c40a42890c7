"""One-vs-rest linear separators trained by full-batch subgradient descent."""

from __future__ import annotations

import numpy as np

N_CLASSES = 3


def fit_linear_svm(X, y, seed, hyperparameters) -> dict:
    """Minimize hinge loss + L2 penalty per class for a fixed epoch count.

    The descent is full-batch and zero-initialized, hence deterministic;
    the seed is recorded on the artifact but does not affect training.
    """
    del seed
    epochs = int(hyperparameters.get("epochs", 200))
    step = float(hyperparameters.get("step", 1e-2))
    reg = float(hyperparameters.get("reg", 1e-4))
    n, d = X.shape
    weights = []
    biases = []
    for c in range(N_CLASSES):
        target = np.where(y == c, 1.0, -1.0)
        w = np.zeros(d)
        b = 0.0
        for _ in range(epochs):
            margins = target * (X @ w + b)
            violating = margins < 1.0
            grad_w = reg * w - (target[violating, None] * X[violating]).sum(axis=0) / n
            grad_b = -target[violating].sum() / n
            w = w - step * grad_w
            b = b - step * grad_b
        weights.append([float(v) for v in w])
        biases.append(float(b))
    return {"weights": weights, "biases": biases}


class SvmPredictor:
    """Argmax of per-class margins; scores are a softmax for reporting only."""

    def __init__(self, parameters: dict):
        self.weights = np.asarray(parameters["weights"], dtype=float)
        self.biases = np.asarray(parameters["biases"], dtype=float)

    def _margins(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights.T + self.biases

    def scores_matrix(self, X: np.ndarray) -> np.ndarray:
        margins = self._margins(X)
        shifted = np.exp(margins - margins.max(axis=1, keepdims=True))
        return shifted / shifted.sum(axis=1, keepdims=True)

    def scores_row(self, row: list[float]) -> list[float]:
        scores = self.scores_matrix(np.asarray([row], dtype=float))[0]
        return [float(v) for v in scores]
