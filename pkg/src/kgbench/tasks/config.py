"""Thresholds shared by the matching and linking tasks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class SimilarityConfig:
    entityThreshold: float = 0.99
    relationThreshold: float = 0.5
    linkThreshold: float = 0.8
    csvRecordThreshold: float = 0.5
    csvSchemaThreshold: float = 0.1
    maxIterations: int = 3

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "maxIterations":
                if isinstance(value, bool) or int(value) != value or value < 1:
                    raise ValueError("maxIterations must be a positive integer")
                object.__setattr__(self, f.name, int(value))
            else:
                value = float(value)
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"{f.name} must lie in [0, 1], got {value}")
                object.__setattr__(self, f.name, value)

    @classmethod
    def from_config(cls, cfg: dict) -> "SimilarityConfig":
        """Pick the known keys out of a task config; other keys are ignored."""
        names = {f.name for f in fields(cls)}
        return cls(**{k: _coerce(v) for k, v in cfg.items() if k in names})

    def to_dict(self) -> dict:
        return asdict(self)


def _coerce(value):
    # CLI overrides arrive as strings
    if isinstance(value, str):
        return float(value) if any(c in value for c in ".eE") else int(value)
    return value


def config_schema(*keys: str) -> dict:
    defaults = SimilarityConfig()
    return {
        k: {"type": "integer" if k == "maxIterations" else "number", "default": getattr(defaults, k)}
        for k in keys
    }
