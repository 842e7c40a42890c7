"""Shared fixtures: reference bounds, toy datasets, event builders."""

from __future__ import annotations

import numpy as np
import pytest

from doctype.engagement import Click, Impression, LogEvent
from doctype.ingest import DocType, FeatureVector
from doctype.labeling import LabeledExample
from doctype.stats import ThresholdTable

# Published per-class feature bounds (2.5th / 97.5th percentiles after
# outlier removal), frozen here independently of the library copy.
REFERENCE_CELLS = {
    "Research": {"f1": (1.0, 5.0), "f2": (1226.825, 19151.425), "f3": (3.0, 41.0), "f4": (208.2297, 926.8950)},
    "Slides": {"f1": (1.0, 8.0), "f2": (93.6, 7339.8), "f3": (1.0, 74.575), "f4": (8.0625, 722.9375)},
    "Thesis": {"f1": (1.0, 1.0), "f2": (15184.0, 210720.0), "f3": (47.0, 478.0), "f4": (197.7846, 529.9571)},
}


@pytest.fixture
def reference_table() -> ThresholdTable:
    bounds = {
        (DocType.from_label(label), fid): cell
        for label, cells in REFERENCE_CELLS.items()
        for fid, cell in cells.items()
    }
    return ThresholdTable(bounds)


def make_example(
    label: DocType,
    f1: float | None = 1,
    f2: float = 1000,
    f3: float = 10,
    doc_id: str = "",
) -> LabeledExample:
    f4 = f2 / f3 if f3 else 0.0
    return LabeledExample(FeatureVector(f1, f2, f3, f4), label, doc_id)


def toy_dataset(n_per_class: int = 30, seed: int = 0) -> list[LabeledExample]:
    """Separable three-class set: page/word scales differ by class."""
    rng = np.random.default_rng(seed)
    out = []
    scales = {
        DocType.RESEARCH: (3, 5000, 15),
        DocType.SLIDES: (4, 600, 20),
        DocType.THESIS: (1, 70000, 200),
    }
    i = 0
    for label, (f1, f2_scale, f3_scale) in scales.items():
        for _ in range(n_per_class):
            f2 = float(np.rint(f2_scale * rng.uniform(0.7, 1.3)))
            f3 = float(max(1, np.rint(f3_scale * rng.uniform(0.7, 1.3))))
            out.append(make_example(label, f1, f2, f3, doc_id=f"toy-{i}"))
            i += 1
    return out


def make_event(
    engine: str,
    query_id: str,
    impression_types: list[DocType],
    clicked_positions: list[int] = (),
) -> LogEvent:
    impressions = [
        Impression(f"{query_id}-d{i}", i + 1, t) for i, t in enumerate(impression_types)
    ]
    clicks = [Click(f"{query_id}-d{p - 1}", p) for p in clicked_positions]
    return LogEvent(engine, query_id, impressions, clicks)


def random_events(n: int, seed: int) -> list[LogEvent]:
    rng = np.random.default_rng(seed)
    events = []
    for i in range(n):
        engine = "search" if rng.random() < 0.5 else "recommender"
        size = int(rng.integers(1, 11 if engine == "search" else 6))
        types = [DocType(int(v)) for v in rng.integers(0, 3, size)]
        clicked = [p + 1 for p in range(size) if rng.random() < 0.15]
        events.append(make_event(engine, f"q{i}", types, clicked))
    return events
