"""Run configuration: ``key = value`` config files merged with command-line flags."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

from .freqmodel import THRESHOLD_MODES
from .grid import GridSpec
from .metrics import MetricKind


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    inputs: List[Path] = field(default_factory=list)
    lexicon: Optional[Path] = None
    lang: str = "es"
    min_prob: float = 0.6
    inclusive_prob: bool = False
    grid: GridSpec = field(default_factory=GridSpec)
    threshold: int = 0
    threshold_mode: str = "per-concept"
    metric: MetricKind = MetricKind.JENSEN_SHANNON
    concept: str = "all"
    out: Path = Path("out")
    model: Optional[Path] = None
    accent_fold: bool = False
    both_references: bool = False
    allow_cells: Optional[Path] = None
    workers: int = 1

    @property
    def model_path(self) -> Path:
        return self.model if self.model is not None else self.out / "model.csv"

    def validate(self, need_inputs: bool = False, need_model: bool = False) -> "RunConfig":
        """Check ranges and that every referenced path exists."""
        if not 0.0 <= self.min_prob <= 1.0:
            raise ConfigError(f"min-prob must lie in [0, 1], got {self.min_prob}")
        if self.threshold < 0:
            raise ConfigError(f"threshold must be >= 0, got {self.threshold}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ConfigError(f"threshold-mode must be one of {', '.join(THRESHOLD_MODES)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.lexicon is not None and not Path(self.lexicon).is_file():
            raise ConfigError(f"lexicon not found: {self.lexicon}")
        if self.allow_cells is not None and not Path(self.allow_cells).is_file():
            raise ConfigError(f"cell allow-list not found: {self.allow_cells}")
        if need_inputs:
            if not self.inputs:
                raise ConfigError("no --input given")
            for p in self.inputs:
                if not Path(p).is_file():
                    raise ConfigError(f"input not found: {p}")
        if need_model and not self.model_path.is_file():
            raise ConfigError(f"frequency model not found: {self.model_path} (run 'ingest' first)")
        return self


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _coerce(key: str, raw: Any) -> Any:
    if key in ("inputs", "input"):
        if isinstance(raw, (list, tuple)):
            return [Path(p) for p in raw]
        return [Path(p.strip()) for p in str(raw).split(",") if p.strip()]
    if key in ("lexicon", "out", "model", "allow_cells"):
        return None if raw is None else Path(raw)
    if key == "min_prob":
        return float(raw)
    if key in ("threshold", "workers"):
        return int(raw)
    if key == "grid":
        return raw if isinstance(raw, GridSpec) else GridSpec.parse(str(raw))
    if key == "metric":
        return MetricKind.parse(raw)
    if key in ("accent_fold", "both_references", "inclusive_prob"):
        if isinstance(raw, bool):
            return raw
        try:
            return _BOOL[str(raw).strip().lower()]
        except KeyError:
            raise ConfigError(f"{key}: expected a boolean, got {raw!r}") from None
    return str(raw)


def parse_config_text(text: str) -> Dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment, quotes are optional."""
    values: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        values[key.replace("-", "_")] = value
    return values


def build_config(overrides: Iterable[Mapping[str, Any]]) -> RunConfig:
    """Apply mappings in order onto the defaults (later wins); None values are ignored."""
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig()
    for mapping in overrides:
        for key, raw in mapping.items():
            if raw is None:
                continue
            name = "inputs" if key == "input" else key
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                setattr(cfg, name, _coerce(name, raw))
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"bad value for {key}: {exc}") from None
    return cfg


def config_digest(settings: Mapping[str, Any]) -> str:
    """Stable hash of the settings that determine an output."""
    blob = json.dumps(settings, sort_keys=True, ensure_ascii=False, default=str)
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()
