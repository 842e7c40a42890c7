"""Gini decision trees and bootstrapped random forests.

Trees split on ``x <= v`` where v is an observed training value, so any
strictly increasing per-feature remapping of train and test data leaves
predictions unchanged. Growth is best-first by impurity decrease, which
lets a ``max_leaf_nodes`` budget pick the most valuable splits first;
without a budget the result is identical to exhaustive recursive growth.
"""

from __future__ import annotations

import heapq

import numpy as np

N_CLASSES = 3


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    *,
    max_depth: int | None = None,
    min_leaf_size: int = 1,
    max_leaf_nodes: int | None = None,
    feature_subset: int | None = None,
    rng: np.random.Generator | None = None,
) -> list[dict]:
    """Build a tree as a flat node list.

    Each node is ``{"feature", "threshold", "left", "right", "dist"}``;
    leaves have feature -1 and a class distribution summing to 1.
    """
    n, d = X.shape
    if sample_weight is None:
        sample_weight = np.full(n, 1.0 / n)
    if feature_subset is not None and rng is None:
        raise ValueError("feature_subset requires an rng")

    nodes: list[dict] = []
    heap: list[tuple[float, int, int, tuple]] = []
    counter = 0

    def new_node(indices: np.ndarray, depth: int) -> int:
        nonlocal counter
        node_id = len(nodes)
        dist = _class_distribution(y[indices], sample_weight[indices])
        nodes.append(
            {"feature": -1, "threshold": 0.0, "left": -1, "right": -1, "dist": dist}
        )
        if max_depth is not None and depth >= max_depth:
            return node_id
        if len(indices) < 2 * min_leaf_size or len(indices) < 2:
            return node_id
        if feature_subset is not None and feature_subset < d:
            feats = np.sort(rng.choice(d, size=feature_subset, replace=False))
        else:
            feats = np.arange(d)
        split = _best_split(X, y, sample_weight, indices, feats, min_leaf_size)
        if split is not None:
            decrease, feature, threshold, left_idx, right_idx = split
            heapq.heappush(
                heap,
                (-decrease, counter, node_id, (feature, threshold, left_idx, right_idx, depth)),
            )
            counter += 1
        return node_id

    new_node(np.arange(n), 0)
    n_leaves = 1
    while heap and (max_leaf_nodes is None or n_leaves < max_leaf_nodes):
        _, _, node_id, (feature, threshold, left_idx, right_idx, depth) = heapq.heappop(heap)
        left = new_node(left_idx, depth + 1)
        right = new_node(right_idx, depth + 1)
        nodes[node_id]["feature"] = int(feature)
        nodes[node_id]["threshold"] = float(threshold)
        nodes[node_id]["left"] = left
        nodes[node_id]["right"] = right
        n_leaves += 1
    return nodes


def _class_distribution(labels: np.ndarray, weights: np.ndarray) -> list[float]:
    counts = np.bincount(labels, weights=weights, minlength=N_CLASSES)
    total = counts.sum()
    if total <= 0:
        return [1.0 / N_CLASSES] * N_CLASSES
    return [float(c) for c in counts / total]


def _best_split(X, y, sample_weight, indices, features, min_leaf_size):
    """Scan candidate thresholds on each feature; return the best valid split.

    Candidates are boundaries between distinct sorted values; ties in
    impurity decrease resolve to the lowest feature id, then the lowest
    threshold, making growth deterministic.
    """
    labels = y[indices]
    weights = sample_weight[indices]
    total_w = weights.sum()
    if total_w <= 0:
        return None
    total_counts = np.bincount(labels, weights=weights, minlength=N_CLASSES)
    gini_parent = 1.0 - ((total_counts / total_w) ** 2).sum()
    if gini_parent <= 0.0:
        return None

    best = None
    for feature in features:
        values = X[indices, feature]
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        sorted_labels = labels[order]
        sorted_weights = weights[order]

        boundaries = np.nonzero(sorted_values[:-1] < sorted_values[1:])[0]
        if boundaries.size == 0:
            continue
        left_sizes = boundaries + 1
        valid = (left_sizes >= min_leaf_size) & (len(indices) - left_sizes >= min_leaf_size)
        boundaries = boundaries[valid]
        if boundaries.size == 0:
            continue

        onehot = np.zeros((len(indices), N_CLASSES))
        onehot[np.arange(len(indices)), sorted_labels] = sorted_weights
        cum_counts = np.cumsum(onehot, axis=0)
        cum_weights = np.cumsum(sorted_weights)

        left_w = cum_weights[boundaries]
        right_w = total_w - left_w
        left_counts = cum_counts[boundaries]
        right_counts = total_counts - left_counts
        with np.errstate(divide="ignore", invalid="ignore"):
            gini_left = 1.0 - np.where(
                left_w > 0, (left_counts**2).sum(axis=1) / left_w**2, 1.0
            )
            gini_right = 1.0 - np.where(
                right_w > 0, (right_counts**2).sum(axis=1) / right_w**2, 1.0
            )
        decrease = gini_parent - (left_w * gini_left + right_w * gini_right) / total_w
        pick = int(np.argmax(decrease))
        if decrease[pick] <= 1e-12:
            continue
        if best is None or decrease[pick] > best[0]:
            threshold = float(sorted_values[boundaries[pick]])
            mask = values <= threshold
            best = (
                float(decrease[pick]),
                int(feature),
                threshold,
                indices[mask],
                indices[~mask],
            )
    return best


def tree_apply(nodes: list[dict], X: np.ndarray) -> np.ndarray:
    """Route a matrix of rows to leaf distributions, vectorized per node."""
    n = X.shape[0]
    out = np.empty((n, N_CLASSES))
    stack = [(0, np.arange(n))]
    while stack:
        node_id, rows = stack.pop()
        node = nodes[node_id]
        if node["feature"] < 0:
            out[rows] = node["dist"]
            continue
        mask = X[rows, node["feature"]] <= node["threshold"]
        left_rows = rows[mask]
        right_rows = rows[~mask]
        if left_rows.size:
            stack.append((node["left"], left_rows))
        if right_rows.size:
            stack.append((node["right"], right_rows))
    return out


def tree_apply_row(nodes: list[dict], row: list[float]) -> list[float]:
    """Scalar walk for single predictions; avoids array overhead."""
    node = nodes[0]
    while node["feature"] >= 0:
        if row[node["feature"]] <= node["threshold"]:
            node = nodes[node["left"]]
        else:
            node = nodes[node["right"]]
    return node["dist"]


def balanced_weights(y: np.ndarray) -> np.ndarray:
    """Sample weights that give each observed class equal total mass."""
    counts = np.bincount(y, minlength=N_CLASSES)
    present = counts > 0
    per_class = np.zeros(N_CLASSES)
    per_class[present] = 1.0 / (present.sum() * counts[present])
    return per_class[y]


def _sample_weights(y: np.ndarray, hyperparameters: dict) -> np.ndarray | None:
    if hyperparameters.get("class_weight") == "balanced":
        return balanced_weights(y)
    return None


def fit_decision_tree(X, y, seed, hyperparameters) -> dict:
    del seed
    nodes = grow_tree(
        X,
        y,
        sample_weight=_sample_weights(y, hyperparameters),
        max_depth=hyperparameters.get("max_depth"),
        min_leaf_size=hyperparameters.get("min_leaf_size", 1),
        max_leaf_nodes=hyperparameters.get("max_leaf_nodes"),
    )
    return {"nodes": nodes}


def fit_random_forest(X, y, seed, hyperparameters) -> dict:
    n_trees = hyperparameters.get("n_trees", 10)
    bootstrap = hyperparameters.get("bootstrap", True)
    subset = hyperparameters.get("feature_subset", 2)
    subset = min(subset, X.shape[1])
    seeds = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for tree_seed in seeds:
        rng = np.random.default_rng(tree_seed)
        if bootstrap:
            sample = rng.integers(0, len(y), len(y))
            Xb, yb = X[sample], y[sample]
        else:
            Xb, yb = X, y
        trees.append(
            grow_tree(
                Xb,
                yb,
                sample_weight=_sample_weights(yb, hyperparameters),
                max_depth=hyperparameters.get("max_depth"),
                min_leaf_size=hyperparameters.get("min_leaf_size", 1),
                max_leaf_nodes=hyperparameters.get("max_leaf_nodes"),
                feature_subset=subset,
                rng=rng,
            )
        )
    return {"trees": trees}


class TreePredictor:
    def __init__(self, parameters: dict):
        self.nodes = parameters["nodes"]

    def scores_matrix(self, X: np.ndarray) -> np.ndarray:
        return tree_apply(self.nodes, X)

    def scores_row(self, row: list[float]) -> list[float]:
        return tree_apply_row(self.nodes, row)


class ForestPredictor:
    """Soft-voting ensemble: scores are the mean of per-tree leaf distributions."""

    def __init__(self, parameters: dict):
        self.trees = parameters["trees"]

    def scores_matrix(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros((X.shape[0], N_CLASSES))
        for nodes in self.trees:
            acc += tree_apply(nodes, X)
        return acc / len(self.trees)

    def scores_row(self, row: list[float]) -> list[float]:
        acc = [0.0] * N_CLASSES
        for nodes in self.trees:
            dist = tree_apply_row(nodes, row)
            for i in range(N_CLASSES):
                acc[i] += dist[i]
        n = len(self.trees)
        return [v / n for v in acc]
