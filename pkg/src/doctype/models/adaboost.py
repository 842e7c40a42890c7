"""Multi-class boosting (SAMME) over depth-limited Gini trees."""

from __future__ import annotations

import math

import numpy as np

from ..errors import TrainingError
from .tree import N_CLASSES, grow_tree, tree_apply, tree_apply_row

_ERR_FLOOR = 1e-10


def fit_adaboost(X, y, seed, hyperparameters) -> dict:
    del seed
    rounds = int(hyperparameters.get("rounds", 25))
    max_depth = int(hyperparameters.get("max_depth", 2))
    min_leaf = int(hyperparameters.get("min_leaf_size", 1))
    n = len(y)
    weights = np.full(n, 1.0 / n)
    trees: list[list[dict]] = []
    alphas: list[float] = []
    for _ in range(rounds):
        nodes = grow_tree(
            X, y, sample_weight=weights, max_depth=max_depth, min_leaf_size=min_leaf
        )
        predicted = tree_apply(nodes, X).argmax(axis=1)
        miss = predicted != y
        err = float(weights[miss].sum())
        if err >= 1.0 - 1.0 / N_CLASSES:
            # weak learner no better than random guessing; stop boosting
            break
        err = max(err, _ERR_FLOOR)
        alpha = math.log((1.0 - err) / err) + math.log(N_CLASSES - 1.0)
        trees.append(nodes)
        alphas.append(alpha)
        if err <= _ERR_FLOOR:
            break
        weights = weights * np.exp(alpha * miss)
        weights /= weights.sum()
    if not trees:
        raise TrainingError("boosting found no weak learner better than random")
    return {"trees": trees, "alphas": alphas}


class AdaboostPredictor:
    """Weighted vote of round predictions; scores normalized by total weight."""

    def __init__(self, parameters: dict):
        self.trees = parameters["trees"]
        self.alphas = parameters["alphas"]
        self._total = sum(self.alphas)

    def scores_matrix(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros((X.shape[0], N_CLASSES))
        for nodes, alpha in zip(self.trees, self.alphas):
            picks = tree_apply(nodes, X).argmax(axis=1)
            acc[np.arange(X.shape[0]), picks] += alpha
        return acc / self._total

    def scores_row(self, row: list[float]) -> list[float]:
        acc = [0.0] * N_CLASSES
        for nodes, alpha in zip(self.trees, self.alphas):
            dist = tree_apply_row(nodes, row)
            pick = 0
            for i in range(1, N_CLASSES):
                if dist[i] > dist[pick]:
                    pick = i
            acc[pick] += alpha
        return [v / self._total for v in acc]
