"""Run configuration: a JSON file plus command-line overrides (flags win)."""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError
from .verify import SUITES, Calibration
from .zeta import EvalConfig

OUTPUT_ENV = "ZETALAB_OUTPUT"


@dataclass(frozen=True)
class ScanConfig:
    T_list: tuple = (1000.0, 2000.0, 5000.0)
    H_list: tuple = (10.0, 50.0, 100.0)
    k_list: tuple = (1, 2)
    U_list: tuple = (10.0,)
    G_list: tuple = (10.0, 50.0)

    def __post_init__(self):
        for f in fields(self):
            values = getattr(self, f.name)
            if not values:
                raise ConfigError(f"scan.{f.name}", "must be nonempty")
            if any(not math.isfinite(v) or v <= 0 for v in values):
                raise ConfigError(f"scan.{f.name}", "entries must be positive")


@dataclass(frozen=True)
class RunConfig:
    t_max: float = 1e4
    divisor_limit: int = 4_100_000
    c_step: float = 0.5
    eval: EvalConfig = field(default_factory=EvalConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    calibration: Calibration = field(default_factory=Calibration)
    output_dir: str = "."
    checkpoint_every: int = 10_000
    workers: int = 1
    suite: str = "all"

    def __post_init__(self):
        if not self.t_max >= 1:
            raise ConfigError("t_max", "must be >= 1")
        need = math.ceil(4 * self.t_max / (2 * math.pi))
        if self.divisor_limit < need:
            raise ConfigError("divisor_limit", f"must be >= 4 t_max / 2pi = {need}")
        if not self.c_step > 0:
            raise ConfigError("c_step", "must be positive")
        if self.checkpoint_every < 1:
            raise ConfigError("checkpoint_every", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if self.suite not in SUITES:
            raise ConfigError("suite", f"must be one of {', '.join(SUITES)}")

    @property
    def out(self):
        """Output directory, resolved against $ZETALAB_OUTPUT when relative."""
        path = Path(self.output_dir)
        if not path.is_absolute():
            path = Path(os.environ.get(OUTPUT_ENV, ".")) / path
        return path

    def to_dict(self):
        return asdict(self)

    def numeric_dict(self):
        """Everything that can change a number; worker count and paths excluded."""
        d = self.to_dict()
        for key in ("output_dir", "workers", "checkpoint_every"):
            d.pop(key)
        return d


_NESTED = {"eval": EvalConfig, "scan": ScanConfig, "calibration": Calibration}


def _build(cls, data, prefix=""):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(prefix + sorted(unknown)[0], "unknown field")
    kw = {}
    for key, value in data.items():
        if key in _NESTED and cls is RunConfig:
            kw[key] = _build(_NESTED[key], value, key + ".")
        elif isinstance(value, list):
            kw[key] = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        else:
            kw[key] = value
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigError(prefix.rstrip(".") or "config", str(exc)) from None


def load_config(path=None, overrides=None):
    """Read ``path`` (JSON) if given, then apply dotted ``overrides``.

    ``overrides`` maps names such as ``"t_max"`` or ``"eval.em_terms"`` to
    values; ``None`` values are ignored so unset flags never win.
    """
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        head, _, tail = key.partition(".")
        if tail:
            data.setdefault(head, {})[tail] = value
        else:
            data[key] = value
    return _build(RunConfig, data)


def with_overrides(cfg, **kw):
    return replace(cfg, **kw)
