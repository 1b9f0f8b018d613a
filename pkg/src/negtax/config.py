"""Flat sectioned config file; flags override; the API key comes only from
the NEGTAX_API_KEY environment variable."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .evalharness import Bm25Params


class ConfigError(Exception):
    pass


@dataclass
class OracleConfig:
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4o-mini"
    temperature: float = 0.0
    rate_limit: int | None = None
    mode: str = "replay"
    transcript_dir: str | None = None


@dataclass
class EvalConfig:
    bm25: Bm25Params = field(default_factory=Bm25Params)
    batch_size: int = 64
    timeout_s: float = 120.0


@dataclass
class Config:
    oracle: OracleConfig = field(default_factory=OracleConfig)
    wordnet_dir: str | None = None
    wikipedia_endpoint: str = "https://en.wikipedia.org/w/api.php"
    eval: EvalConfig = field(default_factory=EvalConfig)
    seed: int = 0

    def validate(self) -> None:
        if self.oracle.mode not in ("live", "record", "replay"):
            raise ConfigError(f"oracle mode must be live|record|replay, got {self.oracle.mode!r}")
        if self.oracle.mode == "replay":
            if not self.oracle.transcript_dir:
                raise ConfigError("replay mode requires oracle.transcript_dir")
            if not Path(self.oracle.transcript_dir).is_dir():
                raise ConfigError(
                    f"transcript_dir does not exist: {self.oracle.transcript_dir}"
                )


def load_config(path=None) -> Config:
    cfg = Config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file: {path}")

    def get(section, key, default=None):
        return parser.get(section, key, fallback=default)

    cfg.oracle = OracleConfig(
        endpoint=get("oracle", "endpoint", cfg.oracle.endpoint),
        model=get("oracle", "model", cfg.oracle.model),
        temperature=float(get("oracle", "temperature", cfg.oracle.temperature)),
        rate_limit=(
            int(get("oracle", "rate_limit")) if get("oracle", "rate_limit") else None
        ),
        mode=get("oracle", "mode", cfg.oracle.mode),
        transcript_dir=get("oracle", "transcript_dir"),
    )
    cfg.wordnet_dir = get("paths", "wordnet_dir")
    cfg.wikipedia_endpoint = get("wikipedia", "endpoint", cfg.wikipedia_endpoint)
    cfg.eval = EvalConfig(
        bm25=Bm25Params(
            k1=float(get("eval", "bm25_k1", 1.2)),
            b=float(get("eval", "bm25_b", 0.75)),
        ),
        batch_size=int(get("eval", "batch_size", 64)),
        timeout_s=float(get("eval", "timeout_s", 120)),
    )
    cfg.seed = int(get("run", "seed", 0))
    return cfg
