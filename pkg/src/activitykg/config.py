"""Run configuration: provider, ontology, store, thresholds, weights."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .applications import EXPERTISE_WEIGHTS, PRIORITY_WEIGHTS
from .errors import ConfigError
from .ontology import OntologySchema, load_ontology
from .providers import ProviderConfig
from .resolution import CANDIDATE_THETA, RELATION_THETA
from .extraction import CONTEXT_BUDGET_CHARS, CONTEXT_ITEMS, CONTEXT_THETA, CONTEXT_TRIPLES_PER_ITEM
from .summarizer import SUMMARY_CAP
from .ingestion import SOURCE_TYPES


@dataclass
class RunConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    ontology_path: str | None = None  # None = packaged default ontology
    store_dir: str | None = None
    thresholds: dict[str, float] = field(
        default_factory=lambda: {"candidate": CANDIDATE_THETA, "relation": RELATION_THETA, "context": CONTEXT_THETA}
    )
    context: dict[str, int] = field(
        default_factory=lambda: {"m": CONTEXT_ITEMS, "r": CONTEXT_TRIPLES_PER_ITEM, "budget": CONTEXT_BUDGET_CHARS}
    )
    context_enabled: bool = True  # A/B switch: extraction with vs. without graph context
    expertise_weights: dict[str, float] = field(default_factory=lambda: dict(EXPERTISE_WEIGHTS))
    priority_weights: dict[str, float] = field(default_factory=lambda: dict(PRIORITY_WEIGHTS))
    decay_half_life_days: float = 180.0
    summary_cap: int = SUMMARY_CAP
    batch_size: int = 16
    sources: dict[str, bool] = field(default_factory=lambda: {s: True for s in SOURCE_TYPES})
    compact_every: int = 1000
    lenient_parse: bool = False
    adjudicator: str = "rule"  # "rule" | "provider"
    api_key: str | None = None

    def __post_init__(self) -> None:
        for name, value in self.thresholds.items():
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"threshold {name}={value} outside [0,1]")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.summary_cap < 1:
            raise ConfigError("summary_cap must be >= 1")
        if self.adjudicator not in ("rule", "provider"):
            raise ConfigError(f"unknown adjudicator {self.adjudicator!r}")

    def load_schema(self) -> OntologySchema:
        if self.ontology_path is None:
            text = resources.files("activitykg.data").joinpath("default.ontology").read_text("utf-8")
        else:
            path = Path(self.ontology_path)
            if not path.exists():
                raise ConfigError(f"ontology file not found: {path}")
            text = path.read_text("utf-8")
        return load_ontology(text)

    def echo(self) -> dict:
        """Config summary embedded in reports for reproducibility."""
        return {
            "provider_mode": self.provider.mode,
            "embedding_dim": self.provider.embedding_dim,
            "thresholds": dict(sorted(self.thresholds.items())),
            "context": dict(sorted(self.context.items())),
            "context_enabled": self.context_enabled,
            "expertise_weights": dict(sorted(self.expertise_weights.items())),
            "priority_weights": dict(sorted(self.priority_weights.items())),
            "decay_half_life_days": self.decay_half_life_days,
            "summary_cap": self.summary_cap,
            "batch_size": self.batch_size,
            "adjudicator": self.adjudicator,
        }


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON config file into a RunConfig."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        obj = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc.msg}") from None
    provider = ProviderConfig(**obj.pop("provider", {}))
    known = {f for f in RunConfig.__dataclass_fields__ if f != "provider"}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    cfg = RunConfig(provider=provider, **obj)
    if cfg.ontology_path is not None and not Path(cfg.ontology_path).exists():
        raise ConfigError(f"ontology file not found: {cfg.ontology_path}")
    return cfg
