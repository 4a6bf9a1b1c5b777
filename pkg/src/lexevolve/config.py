"""Run configuration: one JSON document plus ``--set key=value`` overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .metrics import EXPONENTIAL, LINEAR
from .scoring import SCORERS
from .tokenize import TokenChannel


class ConfigError(ValueError):
    pass


@dataclass
class DatasetSpec:
    path: str
    name: str | None = None
    split: str = "test"

    @property
    def label(self) -> str:
        return self.name or Path(self.path).name


@dataclass
class EvolveSection:
    steps: int = 20
    seed_program: str | None = None
    evaluator: dict[str, Any] = field(default_factory=lambda: {"kind": "scorer"})
    mutator: dict[str, Any] = field(default_factory=lambda: {"kind": "param-jitter"})
    params: dict[str, Any] = field(default_factory=dict)
    include_programs: bool = True


@dataclass
class RunConfig:
    datasets: list[DatasetSpec] = field(default_factory=list)
    scorer: str = "bm25"
    params: dict[str, Any] = field(default_factory=dict)
    channels: list[str] | None = None
    output_dir: str = "runs"
    run_tag: str | None = None
    gain: str = EXPONENTIAL
    workers: int = 1
    seed: int = 0
    evolve: EvolveSection = field(default_factory=EvolveSection)

    @property
    def tag(self) -> str:
        return self.run_tag or self.scorer

    def channel_list(self) -> list[TokenChannel]:
        if self.channels is None:
            return list(SCORERS[self.scorer].channels)
        return [TokenChannel(c) for c in self.channels]

    def validate(self, require_datasets: bool = True) -> "RunConfig":
        if self.scorer not in SCORERS:
            raise ConfigError(f"unknown scorer {self.scorer!r}; choose from {sorted(SCORERS)}")
        if self.gain not in (EXPONENTIAL, LINEAR):
            raise ConfigError(f"gain must be {EXPONENTIAL!r} or {LINEAR!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.channel_list()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if require_datasets and not self.datasets:
            raise ConfigError("no datasets configured")
        for ds in self.datasets:
            root = Path(ds.path)
            for rel in ("corpus.jsonl", "queries.jsonl", f"qrels/{ds.split}.tsv"):
                if not (root / rel).is_file():
                    raise ConfigError(f"dataset {ds.label}: missing {root / rel}")
        return self


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    return cls(**data)


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    data = dict(data)
    datasets = data.pop("datasets", [])
    if not isinstance(datasets, list):
        raise ConfigError("datasets: expected a list")
    evolve = data.pop("evolve", {})
    try:
        cfg = _build(RunConfig, data, "config")
        cfg.datasets = [
            DatasetSpec(path=d) if isinstance(d, str) else _build(DatasetSpec, d, f"datasets[{i}]")
            for i, d in enumerate(datasets)
        ]
        cfg.evolve = _build(EvolveSection, evolve, "evolve")
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def parse_override(item: str) -> tuple[list[str], Any]:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"--set expects key=value, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_override(data: dict[str, Any], path: list[str], value: Any) -> None:
    node: Any = data
    for i, part in enumerate(path[:-1]):
        if isinstance(node, list):
            node = node[int(part)]
            continue
        if part not in node or not isinstance(node[part], (dict, list)):
            node[part] = {}
        node = node[part]
    last = path[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def load_config(path: str | os.PathLike | None, overrides: list[str] = ()) -> RunConfig:
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    for item in overrides:
        keys, value = parse_override(item)
        try:
            apply_override(data, keys, value)
        except (IndexError, ValueError, TypeError) as exc:
            raise ConfigError(f"cannot apply --set {item!r}: {exc}") from None
    return config_from_dict(data)
