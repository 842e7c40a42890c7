"""Run configuration: schema, validation, and the config hash."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .ingest import DocType
from .models import KINDS
from .stats import TRANSFORM_KINDS

DEFAULT_PROPORTIONS = {
    DocType.RESEARCH: 0.55,
    DocType.SLIDES: 0.10,
    DocType.THESIS: 0.35,
}


@dataclass
class RunConfig:
    """Everything a pipeline run needs; one seed drives all stages."""

    seed: int = 0
    records_path: str | None = None
    labeled_path: str | None = None
    model_path: str | None = None
    log_path: str | None = None
    output_dir: str = "out"
    proportions: dict[DocType, float] = field(
        default_factory=lambda: dict(DEFAULT_PROPORTIONS)
    )
    sample_total: int | None = None
    k_folds: int = 10
    validation_fraction: float = 0.2
    quantile_lo: float = 0.025
    quantile_hi: float = 0.975
    sweep_kinds: tuple[str, ...] = ("random-forest", "adaboost")
    sweep_transforms: tuple[str, ...] = ("identity", "z-score", "log-scale")
    sweep_grids: dict[str, list[dict]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "paths": {
                "records": self.records_path,
                "labeled": self.labeled_path,
                "model": self.model_path,
                "log": self.log_path,
                "output_dir": self.output_dir,
            },
            "proportions": {t.label: p for t, p in self.proportions.items()},
            "sample_total": self.sample_total,
            "k_folds": self.k_folds,
            "validation_fraction": self.validation_fraction,
            "quantiles": {"lo": self.quantile_lo, "hi": self.quantile_hi},
            "sweep": {
                "kinds": list(self.sweep_kinds),
                "transforms": list(self.sweep_transforms),
                "grids": self.sweep_grids,
            },
        }

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> RunConfig:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(payload)


def config_from_dict(payload: dict) -> RunConfig:
    if not isinstance(payload, dict):
        raise ConfigError("config must be a JSON object")
    cfg = RunConfig()
    try:
        cfg.seed = int(payload.get("seed", cfg.seed))
        paths = payload.get("paths", {})
        cfg.records_path = paths.get("records")
        cfg.labeled_path = paths.get("labeled")
        cfg.model_path = paths.get("model")
        cfg.log_path = paths.get("log")
        cfg.output_dir = paths.get("output_dir", cfg.output_dir)
        if "proportions" in payload:
            cfg.proportions = {
                DocType.from_label(name): float(v)
                for name, v in payload["proportions"].items()
            }
        cfg.sample_total = payload.get("sample_total", cfg.sample_total)
        cfg.k_folds = int(payload.get("k_folds", cfg.k_folds))
        cfg.validation_fraction = float(
            payload.get("validation_fraction", cfg.validation_fraction)
        )
        quantiles = payload.get("quantiles", {})
        cfg.quantile_lo = float(quantiles.get("lo", cfg.quantile_lo))
        cfg.quantile_hi = float(quantiles.get("hi", cfg.quantile_hi))
        sweep = payload.get("sweep", {})
        cfg.sweep_kinds = tuple(sweep.get("kinds", cfg.sweep_kinds))
        cfg.sweep_transforms = tuple(sweep.get("transforms", cfg.sweep_transforms))
        cfg.sweep_grids = {
            kind: [dict(point) for point in points]
            for kind, points in sweep.get("grids", {}).items()
        }
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    total = sum(cfg.proportions.values())
    if abs(total - 1.0) > 1e-9:
        raise ConfigError(f"class proportions must sum to 1, got {total}")
    if cfg.k_folds < 2:
        raise ConfigError(f"k_folds must be at least 2, got {cfg.k_folds}")
    if not 0.0 <= cfg.validation_fraction < 1.0:
        raise ConfigError(
            f"validation_fraction must be in [0, 1), got {cfg.validation_fraction}"
        )
    if not 0.0 <= cfg.quantile_lo < cfg.quantile_hi <= 1.0:
        raise ConfigError(
            f"quantile levels must satisfy 0 <= lo < hi <= 1, "
            f"got ({cfg.quantile_lo}, {cfg.quantile_hi})"
        )
    if cfg.sample_total is not None and cfg.sample_total < 0:
        raise ConfigError(f"sample_total must be nonnegative, got {cfg.sample_total}")
    for kind in cfg.sweep_kinds:
        if kind not in KINDS:
            raise ConfigError(f"unknown sweep kind: {kind!r}")
    for transform in cfg.sweep_transforms:
        if transform not in TRANSFORM_KINDS:
            raise ConfigError(f"unknown transform kind: {transform!r}")
    for path_label, path in (
        ("records", cfg.records_path),
        ("labeled", cfg.labeled_path),
        ("log", cfg.log_path),
    ):
        if path is not None and not Path(path).exists():
            raise ConfigError(f"{path_label} path does not exist: {path}")
