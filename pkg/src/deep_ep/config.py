"""Run configuration: defaults, JSON files and command-line overrides."""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .network import SPARSITY_L1_COEFF, Hyperparams
from .training import RULES, TASKS

__all__ = ["ConfigError", "RunConfig", "load_config", "OUT_ENV"]

OUT_ENV = "DEEP_EP_OUT"


class ConfigError(ValueError):
    pass


def _default_out() -> str:
    return os.environ.get(OUT_ENV, "runs")


@dataclass(frozen=True)
class RunConfig:
    task: str = "xor"
    rule: str = "deep"
    compare: bool = False
    prune: bool = False
    runs: int = 10
    epochs: int = 2000
    n_input: int = 2
    n_hidden: int = 5
    n_output: int = 1
    out: str = dataclasses.field(default_factory=_default_out)
    hyperparams: Hyperparams = dataclasses.field(default_factory=Hyperparams)

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; valid tasks are {{{', '.join(TASKS)}}}")
        if self.rule not in RULES:
            raise ConfigError(f"unknown rule {self.rule!r}; valid rules are {{{', '.join(RULES)}}}")
        for name in ("runs", "epochs", "n_output"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("n_input", "n_hidden"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def architecture(self) -> tuple[int, int, int]:
        return self.n_input + self.n_hidden + self.n_output, self.n_input, self.n_output

    def to_dict(self) -> dict:
        flat = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "hyperparams"}
        flat.update(dataclasses.asdict(self.hyperparams))
        return flat


_RUN_FIELDS = {f.name: f for f in fields(RunConfig) if f.name != "hyperparams"}
_HP_FIELDS = {f.name: f for f in fields(Hyperparams)}
_TYPES = {**{k: f.type for k, f in _RUN_FIELDS.items()}, **{k: f.type for k, f in _HP_FIELDS.items()}}


def _coerce(key: str, value):
    expected = _TYPES[key]
    if expected == "bool":
        ok = isinstance(value, bool)
    elif expected == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif expected == "float":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    else:
        ok = isinstance(value, str)
    if not ok:
        raise ConfigError(f"{key}: expected {expected}, got {type(value).__name__} {value!r}")
    return value


def _read_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    # a run manifest carries its resolved config under "config"
    if isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Resolve defaults, then the JSON file at ``path``, then ``overrides``.

    Keys are the ``RunConfig`` field names plus every ``Hyperparams`` field,
    in one flat namespace. ``None`` values in ``overrides`` are ignored so
    unset command-line flags fall through. A pruned run with no explicit
    ``l1_coeff`` gets ``SPARSITY_L1_COEFF``.
    """
    merged: dict = {}
    if path is not None:
        merged.update(_read_file(path))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(merged) - set(_TYPES))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    values = {k: _coerce(k, v) for k, v in merged.items()}
    if values.get("prune") and "l1_coeff" not in values:
        values["l1_coeff"] = SPARSITY_L1_COEFF
    try:
        hp = Hyperparams(**{k: v for k, v in values.items() if k in _HP_FIELDS})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    run = {k: v for k, v in values.items() if k in _RUN_FIELDS}
    if "task" in run:
        run["task"] = run["task"].lower()
    return RunConfig(**run, hyperparams=hp)
