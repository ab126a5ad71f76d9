"""Application configuration shared by the CLI subcommands and the HTTP service."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dialogue import DEFAULT_MATCH_THRESHOLD, DEFAULT_SUGGESTION_BATCH, DEFAULT_TOP_K
from .normalize import DEFAULT_MERGE_THRESHOLD
from .ranking import RankerParams


class ConfigError(Exception):
    pass


@dataclass
class AppConfig:
    dataset: str = ""
    lexicons: list[str] = field(default_factory=list)
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD
    match_threshold: float = DEFAULT_MATCH_THRESHOLD
    ranker: RankerParams = RankerParams()
    top_k: int = DEFAULT_TOP_K
    suggestion_batch: int = DEFAULT_SUGGESTION_BATCH
    # scraper
    backend: str = "fixture-map"
    list_source: str = ""
    predefined: str = ""
    resolver_map: str = ""
    fixture_pages: str = ""
    cache_dir: str = ""
    politeness_delay: float = 1.0
    list_region: str = ".all-disease"
    # service
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: list[str] = field(default_factory=list)
    session_ttl: float = 1800.0

    def validate(self, mode: str) -> None:
        """Check invariants; `mode` is the subcommand about to run."""
        problems = []
        if not 0 < self.merge_threshold <= 1:
            problems.append(f"merge_threshold must be in (0, 1], got {self.merge_threshold}")
        if not 0 < self.match_threshold <= 1:
            problems.append(f"match_threshold must be in (0, 1], got {self.match_threshold}")
        if self.top_k < 1:
            problems.append(f"top_k must be >= 1, got {self.top_k}")
        if self.suggestion_batch < 1:
            problems.append(f"suggestion_batch must be >= 1, got {self.suggestion_batch}")
        if mode in ("chat", "serve") and not self.dataset:
            problems.append("dataset path required")
        if mode == "build-dataset":
            if not self.list_source:
                problems.append("list_source required")
            if self.backend == "fixture-map" and not (self.resolver_map and self.fixture_pages):
                problems.append("fixture backend requires resolver_map and fixture_pages")
            if self.backend == "title-search" and not self.cache_dir:
                problems.append("title-search backend requires cache_dir")
        if problems:
            raise ConfigError("; ".join(problems))


def load_config_file(path: str | Path) -> dict:
    """JSON config file: top-level keys are subcommand names mapping to flag defaults."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return data
