"""Experiment configuration: JSON document plus command-line overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .network import NetworkConfig, ParameterError
from .policies import KINDS

SCHEMA_VERSION = 1
SEED_ENV = "MFDLAB_SEED"


@dataclass
class TrainerConfig:
    alpha: float = 0.2
    beta: float = 0.05
    iterations: int = 6000
    training_density: float = 0.2
    init_scale: float = 1.0

    def validate(self):
        if not self.alpha > 0:
            raise ParameterError("trainer.alpha", "must be positive")
        if not self.beta > 0:
            raise ParameterError("trainer.beta", "must be positive")
        if self.iterations < 1:
            raise ParameterError("trainer.iterations", "must be >= 1")
        if not 0 <= self.training_density <= 1:
            raise ParameterError("trainer.training_density", "must lie in [0, 1]")
        if not self.init_scale >= 0:
            raise ParameterError("trainer.init_scale", "must be nonnegative")


@dataclass
class ExperimentConfig:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    policy: str = "lqf"
    densities: list = field(default_factory=lambda: [round(0.1 * i, 10) for i in range(1, 10)])
    reps: int = 50
    warmup_cycles: int = 4
    measure_cycles: int = 4
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    seed: int = 0
    out: str = "results"
    jobs: int = 1
    weights: str | None = None

    def validate(self):
        self.network.validate()
        for pol in self.policy.split(","):
            if pol not in KINDS:
                raise ParameterError("policy", f"unknown policy {pol!r}; choose from {KINDS}")
            if pol == "neural" and not self.weights:
                raise ParameterError("weights", "neural policy needs --weights")
        ks = np.asarray(self.densities, dtype=float)
        if ks.ndim != 1 or ks.size == 0 or ((ks <= 0) | (ks > 1)).any():
            raise ParameterError("densities", "need values in (0, 1]")
        if np.any(np.diff(ks) <= 0):
            raise ParameterError("densities", "must be strictly increasing")
        if self.reps < 2:
            raise ParameterError("reps", "must be >= 2")
        if self.warmup_cycles < 0:
            raise ParameterError("warmup_cycles", "must be >= 0")
        if self.measure_cycles < 1:
            raise ParameterError("measure_cycles", "must be >= 1")
        if self.jobs < 1:
            raise ParameterError("jobs", "must be >= 1")
        self.trainer.validate()

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["version"] = SCHEMA_VERSION
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, 0))


def _build(cls, data: dict, prefix: str):
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ParameterError(f"{prefix}{key}", "unknown configuration field")
    return data


def from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    version = data.pop("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParameterError("version", f"unsupported config version {version}")
    net = _build(NetworkConfig, data.pop("network", {}), "network.")
    trainer = _build(TrainerConfig, data.pop("trainer", {}), "trainer.")
    _build(ExperimentConfig, data, "")
    try:
        network = NetworkConfig(**{**dataclasses.asdict(NetworkConfig()), **net})
    except TypeError as exc:
        raise ParameterError("network", str(exc)) from exc
    return ExperimentConfig(network=network, trainer=TrainerConfig(**trainer), **data)


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError("config", f"invalid JSON: {exc}") from exc
    return from_dict(data)
