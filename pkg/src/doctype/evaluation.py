"""Stratified cross-validation, weighted metrics, sweeps, and ablations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .ingest import DOC_TYPES, FEATURE_IDS, DocType
from .labeling import LabeledExample, stratified_split
from .models import baseline_random_predict, dataset_matrix, predict_batch, train
from .seeding import derive_seed
from .stats import Imputer


@dataclass
class EvalReport:
    """Per-class and support-weighted precision/recall/F1 plus the confusion matrix.

    Confusion rows are true classes, columns predicted, both in DocType order.
    """

    confusion: list[list[int]]
    per_class_precision: dict[DocType, float]
    per_class_recall: dict[DocType, float]
    per_class_f1: dict[DocType, float]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    n_examples: int

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion,
            "per_class": {
                t.label: {
                    "precision": self.per_class_precision[t],
                    "recall": self.per_class_recall[t],
                    "f1": self.per_class_f1[t],
                }
                for t in DOC_TYPES
            },
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
            "n_examples": self.n_examples,
        }

    def human(self) -> str:
        lines = [
            f"{'class':<10}{'precision':>11}{'recall':>11}{'f1':>11}{'support':>9}"
        ]
        for t in DOC_TYPES:
            support = sum(self.confusion[int(t)])
            lines.append(
                f"{t.label:<10}{self.per_class_precision[t]:>11.4f}"
                f"{self.per_class_recall[t]:>11.4f}{self.per_class_f1[t]:>11.4f}"
                f"{support:>9}"
            )
        lines.append(
            f"{'weighted':<10}{self.weighted_precision:>11.4f}"
            f"{self.weighted_recall:>11.4f}{self.weighted_f1:>11.4f}"
            f"{self.n_examples:>9}"
        )
        return "\n".join(lines)


def evaluate(predictions: Sequence[DocType], truths: Sequence[DocType]) -> EvalReport:
    """Standard multi-class metrics; empty denominators score 0."""
    if len(predictions) != len(truths):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs {len(truths)} truths"
        )
    if not truths:
        raise ValueError("cannot evaluate an empty prediction list")
    k = len(DOC_TYPES)
    confusion = [[0] * k for _ in range(k)]
    for pred, truth in zip(predictions, truths):
        confusion[int(truth)][int(pred)] += 1
    return report_from_confusion(confusion)


def report_from_confusion(confusion: Sequence[Sequence[int]]) -> EvalReport:
    precision, recall, f1 = {}, {}, {}
    n = sum(sum(row) for row in confusion)
    for t in DOC_TYPES:
        i = int(t)
        tp = confusion[i][i]
        predicted = sum(confusion[r][i] for r in range(len(DOC_TYPES)))
        actual = sum(confusion[i])
        precision[t] = tp / predicted if predicted else 0.0
        recall[t] = tp / actual if actual else 0.0
        denom = precision[t] + recall[t]
        f1[t] = 2 * precision[t] * recall[t] / denom if denom else 0.0
    supports = {t: sum(confusion[int(t)]) for t in DOC_TYPES}
    return EvalReport(
        confusion=[list(map(int, row)) for row in confusion],
        per_class_precision=precision,
        per_class_recall=recall,
        per_class_f1=f1,
        weighted_precision=sum(supports[t] * precision[t] for t in DOC_TYPES) / n,
        weighted_recall=sum(supports[t] * recall[t] for t in DOC_TYPES) / n,
        weighted_f1=sum(supports[t] * f1[t] for t in DOC_TYPES) / n,
        n_examples=n,
    )


@dataclass
class CVResult:
    """Per-fold reports plus their across-fold metric means."""

    fold_reports: list[EvalReport]
    mean_weighted_precision: float
    mean_weighted_recall: float
    mean_weighted_f1: float
    pooled_confusion: list[list[int]]

    def to_dict(self) -> dict:
        return {
            "mean_weighted_precision": self.mean_weighted_precision,
            "mean_weighted_recall": self.mean_weighted_recall,
            "mean_weighted_f1": self.mean_weighted_f1,
            "pooled_confusion": self.pooled_confusion,
            "folds": [r.to_dict() for r in self.fold_reports],
        }


def cross_validate(
    kind: str,
    dataset: Sequence[LabeledExample],
    k: int,
    hyperparameters: dict | None = None,
    seed: int = 0,
    transform: str = "identity",
    features: Sequence[str] = FEATURE_IDS,
    folds: Sequence[Sequence[LabeledExample]] | None = None,
) -> CVResult:
    """k-fold CV; imputation and transform fitting see training folds only."""
    if folds is None:
        split = stratified_split(list(dataset), k, 0.0, derive_seed(seed, "cv-folds"))
        folds = split.test_folds
    reports = []
    for i, test_fold in enumerate(folds):
        train_set = [ex for j, fold in enumerate(folds) if j != i for ex in fold]
        test_set = list(test_fold)
        if any(ex.features.f1_authors is None for ex in train_set) or any(
            ex.features.f1_authors is None for ex in test_set
        ):
            imputer = Imputer().fit(train_set)
            train_set = imputer.transform(train_set)
            test_set = imputer.transform(test_set)
        fold_seed = derive_seed(seed, f"fold-{i}")
        model = train(kind, train_set, hyperparameters, fold_seed, transform, features)
        truths = [ex.label for ex in test_set]
        if kind == "baseline-random":
            predictions = baseline_random_predict(
                model, len(test_set), derive_seed(seed, f"fold-{i}-draw")
            )
        else:
            X, _ = dataset_matrix(test_set, model.features)
            labels, _ = predict_batch(model, X)
            predictions = [DocType(int(v)) for v in labels]
        reports.append(evaluate(predictions, truths))
    pooled = [
        [sum(r.confusion[i][j] for r in reports) for j in range(len(DOC_TYPES))]
        for i in range(len(DOC_TYPES))
    ]
    return CVResult(
        fold_reports=reports,
        mean_weighted_precision=float(np.mean([r.weighted_precision for r in reports])),
        mean_weighted_recall=float(np.mean([r.weighted_recall for r in reports])),
        mean_weighted_f1=float(np.mean([r.weighted_f1 for r in reports])),
        pooled_confusion=pooled,
    )


DEFAULT_TRANSFORMS = ("identity", "z-score", "log-scale")

_DEFAULT_GRIDS: dict[str, list[dict]] = {
    "random-forest": [
        {"n_trees": t, "max_depth": d}
        for t, d in itertools.product((5, 10, 20), (2, 3, 4))
    ],
    "knn": [{"k": k} for k in (1, 3, 5, 7)],
    "adaboost": [
        {"rounds": r, "max_depth": d}
        for r, d in itertools.product((10, 25, 50), (1, 2))
    ],
    "linear-svm": [
        {"epochs": e, "step": s}
        for e, s in itertools.product((50, 200), (1e-2, 1e-3))
    ],
    "decision-tree": [{"max_depth": d} for d in (2, 3, 4)],
    "gnb": [{}],
    "baseline-random": [{}],
    "baseline-threshold": [{}],
}


def default_grid(kind: str) -> list[dict]:
    return [dict(point) for point in _DEFAULT_GRIDS[kind]]


#: Tie-break key: among equal mean F1, prefer the smaller model.
_SIZE_KEYS = {
    "random-forest": "n_trees",
    "knn": "k",
    "adaboost": "rounds",
    "decision-tree": "max_depth",
    "linear-svm": "epochs",
}


@dataclass
class SweepEntry:
    hyperparameters: dict
    transform: str
    result: CVResult


@dataclass
class SweepResult:
    entries: list[SweepEntry]
    best_index: int

    @property
    def best(self) -> SweepEntry:
        return self.entries[self.best_index]

    def to_dict(self) -> dict:
        return {
            "best_index": self.best_index,
            "entries": [
                {
                    "hyperparameters": e.hyperparameters,
                    "transform": e.transform,
                    "mean_weighted_f1": e.result.mean_weighted_f1,
                    "mean_weighted_precision": e.result.mean_weighted_precision,
                    "mean_weighted_recall": e.result.mean_weighted_recall,
                }
                for e in self.entries
            ],
        }


def sweep(
    kind: str,
    dataset: Sequence[LabeledExample],
    grid: Sequence[dict] | None = None,
    transforms: Sequence[str] = DEFAULT_TRANSFORMS,
    k: int = 10,
    seed: int = 0,
    features: Sequence[str] = FEATURE_IDS,
    folds: Sequence[Sequence[LabeledExample]] | None = None,
) -> SweepResult:
    """Cross-validate the full grid x transforms product; pick the best mean F1."""
    if grid is None:
        grid = default_grid(kind)
    if not grid:
        raise ValueError("sweep grid must be non-empty")
    entries = []
    for point, transform in itertools.product(grid, transforms):
        result = cross_validate(
            kind, dataset, k, point, seed, transform, features, folds=folds
        )
        entries.append(SweepEntry(dict(point), transform, result))
    size_key = _SIZE_KEYS.get(kind)
    best_index = 0
    for i in range(1, len(entries)):
        best, cand = entries[best_index], entries[i]
        if cand.result.mean_weighted_f1 > best.result.mean_weighted_f1:
            best_index = i
        elif cand.result.mean_weighted_f1 == best.result.mean_weighted_f1 and size_key:
            if (cand.hyperparameters.get(size_key) or 0) < (
                best.hyperparameters.get(size_key) or 0
            ):
                best_index = i
    return SweepResult(entries, best_index)


FEATURE_SUBSETS: tuple[tuple[str, ...], ...] = (
    ("f1",),
    ("f2",),
    ("f3",),
    ("f4",),
    FEATURE_IDS,
)


def ablation(
    dataset: Sequence[LabeledExample],
    kinds: Sequence[str],
    k: int = 10,
    seed: int = 0,
    hyperparameters: Mapping[str, dict] | None = None,
) -> dict[tuple[str, tuple[str, ...]], float]:
    """Mean weighted F1 per (kind, feature subset): each singleton and all four."""
    hyperparameters = hyperparameters or {}
    out: dict[tuple[str, tuple[str, ...]], float] = {}
    for kind in kinds:
        for subset in FEATURE_SUBSETS:
            result = cross_validate(
                kind,
                dataset,
                k,
                hyperparameters.get(kind),
                seed,
                features=subset,
            )
            out[(kind, subset)] = result.mean_weighted_f1
    return out
