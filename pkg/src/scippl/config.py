"""Run configuration: flat key = value files, overridable by CLI flags.

The SCIPPL_CONFIG environment variable supplies the default config path.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

ENV_CONFIG = "SCIPPL_CONFIG"


@dataclass
class RunConfig:
    papers: Optional[str] = None
    reviews: Optional[str] = None
    logprobs: Optional[str] = None
    synonyms: Optional[str] = None
    uncertainty_lexicon: Optional[str] = None
    model: Optional[str] = None          # trained model file
    model_id: str = "kn3"
    order: int = 3
    discount: float = 0.75
    cutoff: Optional[str] = None         # YYYY-MM or YYYY-MM-DD
    jif_year: Optional[int] = None
    bins: int = 10
    variance_bins: int = 20
    extremes_bins: int = 3               # pooled top/bottom bin count for tests
    jif_extreme: float = 0.05            # top/bottom JIF share
    delay_extreme: float = 0.01          # top/bottom delay share
    rating_extreme: float = 0.05
    comment_split: float = 0.20          # top/bottom comment groups
    word_min_count: int = 20
    bootstrap_reps: int = 1000
    stability_max_k: int = 10
    stability_reps: int = 3
    seed: int = 0
    out: str = "out"
    svg: bool = False

    def outdir(self) -> Path:
        path = Path(self.out)
        path.mkdir(parents=True, exist_ok=True)
        return path


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, kind, raw: str):
    raw = raw.strip()
    if kind is bool or name == "svg":
        low = raw.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ValueError(f"config key {name}: expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


def load_config_file(path) -> dict:
    """Parse flat `key = value` lines; # starts a comment."""
    known = {f.name: f.type for f in fields(RunConfig)}
    types = {f.name: (bool if f.default is False or f.default is True else
                      type(f.default) if f.default is not None else str)
             for f in fields(RunConfig)}
    # explicit types for optional-int/float keys
    types.update({"jif_year": int, "seed": int, "bins": int, "order": int,
                  "variance_bins": int, "extremes_bins": int,
                  "word_min_count": int, "bootstrap_reps": int,
                  "stability_max_k": int, "stability_reps": int,
                  "discount": float, "jif_extreme": float,
                  "delay_extreme": float, "rating_extreme": float,
                  "comment_split": float, "svg": bool})
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, _, raw = stripped.partition("=")
            key = key.strip().replace("-", "_")
            if key not in known:
                raise ValueError(f"{path}:{line_no}: unknown config key {key!r}")
            out[key] = _coerce(key, types.get(key, str), raw)
    return out


def build_config(config_path: Optional[str], overrides: dict) -> RunConfig:
    """Layer config file values under CLI overrides (flag wins)."""
    values = {}
    path = config_path or os.environ.get(ENV_CONFIG)
    if path:
        values.update(load_config_file(path))
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return RunConfig(**values)
