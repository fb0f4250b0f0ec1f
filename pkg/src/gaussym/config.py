"""Run-time tolerances and knobs shared by every module.

Values come from, in increasing priority: built-in defaults, a JSON file named by
the ``GAUSSYM_CONFIG`` environment variable, and explicit overrides.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, replace
from typing import Any

ENV_VAR = "GAUSSYM_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    tau_sympl: float = 1e-9
    tau_phys: float = 1e-8
    tau_inv: float = 1e-8
    seed: int = 0
    n_probes: int = 6
    word_length: int = 3
    fock_cutoff: int = 30
    fock_tail: float = 1e-8
    log_base: str = "e"
    output_format: str = "json"

    def __post_init__(self) -> None:
        for name in ("tau_sympl", "tau_phys", "tau_inv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.log_base not in ("e", "2"):
            raise ValueError("log_base must be 'e' or '2'")
        if self.output_format not in ("json", "csv"):
            raise ValueError("output_format must be 'json' or 'csv'")

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def load_config(path: str | None = None, **overrides: Any) -> RunConfig:
    """Build a config from defaults, an optional JSON file and keyword overrides."""
    cfg = RunConfig()
    path = path or os.environ.get(ENV_VAR)
    if path:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(cfg.as_dict())
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **data)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides) if overrides else cfg


_ACTIVE = load_config()


def get_config() -> RunConfig:
    return _ACTIVE


def set_config(cfg: RunConfig) -> None:
    global _ACTIVE
    _ACTIVE = cfg
