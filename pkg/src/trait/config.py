"""Run configuration: TOML parsing and validation.

A single config file drives the pipeline; CLI flags override config keys.
``validate_config`` returns human-readable violations naming the field and
the constraint, and the CLI exits with status 2 when any are present.
"""

import os
from dataclasses import dataclass, field

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from trait.errors import ConfigError


@dataclass
class RunConfig:
    seed: int = 42
    out_dir: str = "run"
    # input paths
    raw: str | None = None
    corpus: str | None = None
    sent_emb: str | None = None
    word_emb: str | None = None
    # output paths (resolved against out_dir when relative)
    graph: str = "graph.bin"
    model: str = "model.bin"
    estimates: str = "estimates.json"
    profiles: str = "profiles.json"
    # hyperparameters
    T: int = 20
    S: int = 2
    beta: float = 5.0
    gamma: float | None = None
    lam: float = 1.0
    epsilon: float = 0.3
    rho: float = 0.7
    promotion_threshold: float = 0.5
    promotion_top_k: int = 10
    alpha_high: float = 5.0
    alpha_zero: float = 0.0
    alpha_base: float = 0.05
    iterations: int = 1000
    burn_in: int = 500
    check_every: int = 100
    # normalization
    stemming: bool = True
    min_token_freq: int = 1
    # evaluation
    coherence_top_n: int = 20
    profile_top_k: int = 30
    coherence_window: str = "document"
    stages: list = field(default_factory=list)

    def resolve(self, name: str) -> str:
        value = getattr(self, name)
        if value is None:
            return None
        if os.path.isabs(value):
            return value
        if name in ("raw", "corpus", "sent_emb", "word_emb") and os.path.exists(value):
            return value
        return os.path.join(self.out_dir, value)


_HYPER_KEYS = {
    "T", "S", "beta", "gamma", "lambda", "epsilon", "rho",
    "promotion_threshold", "promotion_top_k", "alpha_high", "alpha_zero",
    "alpha_base", "iterations", "burn_in", "check_every",
}
_PATH_KEYS = {"raw", "corpus", "sent_emb", "word_emb", "graph", "model",
              "estimates", "profiles"}
_NORM_KEYS = {"stemming", "min_token_freq"}
_EVAL_KEYS = {"coherence_top_n", "profile_top_k", "coherence_window"}


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    cfg = RunConfig()
    for key in ("seed", "out_dir", "stages"):
        if key in raw:
            setattr(cfg, key, raw[key])
    for section, keys in (("paths", _PATH_KEYS), ("hyper", _HYPER_KEYS),
                          ("normalize", _NORM_KEYS), ("evaluation", _EVAL_KEYS)):
        body = raw.get(section, {})
        for key, value in body.items():
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            setattr(cfg, "lam" if key == "lambda" else key, value)
    return cfg


def validate_config(cfg: RunConfig) -> list:
    """All constraint violations, empty when the config is runnable."""
    v = []
    if not isinstance(cfg.T, int) or cfg.T < 2:
        v.append(f"hyper.T: must be an integer >= 2, got {cfg.T!r}")
    if not isinstance(cfg.S, int) or cfg.S < 2:
        v.append(f"hyper.S: must be an integer >= 2, got {cfg.S!r}")
    if cfg.lam < 0:
        v.append(f"hyper.lambda: lambda >= 0 is required, got {cfg.lam}")
    if not 0.0 <= cfg.epsilon <= 1.0:
        v.append(f"hyper.epsilon: must lie in [0, 1], got {cfg.epsilon}")
    if not -1.0 <= cfg.rho <= 1.0:
        v.append(f"hyper.rho: must lie in [-1, 1], got {cfg.rho}")
    if cfg.beta <= 0:
        v.append(f"hyper.beta: must be > 0, got {cfg.beta}")
    if cfg.gamma is not None and cfg.gamma <= 0:
        v.append(f"hyper.gamma: must be > 0, got {cfg.gamma}")
    if cfg.iterations < 0:
        v.append(f"hyper.iterations: must be >= 0, got {cfg.iterations}")
    if cfg.burn_in < 0:
        v.append(f"hyper.burn_in: must be >= 0, got {cfg.burn_in}")
    if not -1.0 <= cfg.promotion_threshold <= 1.0:
        v.append(f"hyper.promotion_threshold: must lie in [-1, 1], got {cfg.promotion_threshold}")
    if cfg.promotion_top_k < 1:
        v.append(f"hyper.promotion_top_k: must be >= 1, got {cfg.promotion_top_k}")
    if not cfg.alpha_high > cfg.alpha_base > cfg.alpha_zero >= 0:
        v.append("hyper.alpha: high > base > zero >= 0 is required")
    if cfg.min_token_freq < 1:
        v.append(f"normalize.min_token_freq: must be >= 1, got {cfg.min_token_freq}")
    if cfg.coherence_window not in ("document", "sentence"):
        v.append(f"evaluation.coherence_window: unknown policy {cfg.coherence_window!r}")
    if cfg.epsilon > 0 and not cfg.word_emb:
        v.append("paths.word_emb: required when epsilon > 0")
    if not cfg.raw and not cfg.corpus:
        v.append("paths: either raw or corpus must be set")
    for name in ("raw", "corpus", "sent_emb", "word_emb"):
        value = getattr(cfg, name)
        if value and not os.path.exists(value):
            if name == "corpus" and cfg.raw:
                continue  # produced by the preprocess stage
            v.append(f"paths.{name}: file does not exist: {value}")
    return v
