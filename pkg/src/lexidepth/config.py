"""Pipeline configuration: flat ``key = value`` files overridden by CLI flags."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields

from .errors import UsageError

OUTPUT_ENV = "LEXIDEPTH_OUTPUT_DIR"


@dataclass
class PipelineConfig:
    input: list[str] = field(default_factory=list)
    matrix: str | None = None
    classes: str | None = None
    delimiter: str = "auto"
    missing: str = "?"
    normalize: str = "none"
    min_support: int = 1
    precision: int = 6
    linkage: str = "average"
    tree_k: int | None = None
    mds: str = "classical"
    dim: int = 2
    mds_max_iter: int = 300
    depth: str = "spatial"
    level: float = 0.05
    resamples: int = 1000
    grid: int = 200
    margin: float = 0.2
    k: int = 3
    trim: float = 0.1
    max_iter: int = 100
    split: float = 0.8
    repeats: int = 20
    fallback_k: int = 5
    seed: int = 0
    out: str = ""
    plots: bool = True

    def __post_init__(self):
        if not self.out:
            self.out = os.environ.get(OUTPUT_ENV, "lexidepth-out")

    def validate(self) -> "PipelineConfig":
        checks = [
            (self.normalize in ("none", "length"), "normalize must be none or length"),
            (self.min_support >= 0, "min_support must be >= 0"),
            (self.precision >= 0, "precision must be >= 0"),
            (self.linkage in ("single", "complete", "average"), "linkage must be single, complete or average"),
            (self.tree_k is None or self.tree_k >= 1, "tree_k must be positive"),
            (self.mds in ("classical", "nonmetric"), "mds must be classical or nonmetric"),
            (self.dim >= 1, "dim must be positive"),
            (self.mds_max_iter >= 1, "mds_max_iter must be positive"),
            (self.depth in ("spatial", "l1"), "depth must be spatial or l1"),
            (0 < self.level < 1, "level must lie in (0, 1)"),
            (self.resamples >= 1, "resamples must be positive"),
            (self.grid >= 2, "grid must be at least 2"),
            (self.margin >= 0, "margin must be non-negative"),
            (self.k >= 1, "k must be positive"),
            (0 <= self.trim < 1, "trim must lie in [0, 1)"),
            (self.max_iter >= 1, "max_iter must be positive"),
            (0 < self.split < 1, "split must lie in (0, 1)"),
            (self.repeats >= 1, "repeats must be positive"),
            (self.fallback_k >= 1, "fallback_k must be positive"),
        ]
        for ok, message in checks:
            if not ok:
                raise UsageError(message)
        if not self.input and not self.matrix:
            raise UsageError("no input: give --input WORDLIST or --matrix FILE")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f for f in fields(PipelineConfig)}


def _coerce(name: str, raw: str):
    default = PipelineConfig.__dataclass_fields__[name].default
    if name == "input":
        return [p.strip() for p in raw.split(",") if p.strip()]
    if name in ("matrix", "classes"):
        return raw or None
    if name == "tree_k":
        return int(raw) if raw not in ("", "none") else None
    if name == "plots":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"plots: expected a boolean, got {raw!r}")
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, keys may use dashes."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise UsageError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise UsageError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return values


def load_config(path: str | None, overrides: dict) -> PipelineConfig:
    """Defaults, then the config file, then non-None ``overrides`` (CLI flags)."""
    values = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config(fh.read(), path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values).validate()
