"""Experiment configuration: JSON ingestion, overrides and validation."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .quadrature import Method
from .reference import TEST_FUNCTIONS

__all__ = [
    "EXPERIMENTS",
    "CaputoDirectBlock",
    "ConfigError",
    "DiskWaveBlock",
    "ExperimentConfig",
    "PsiStabilityBlock",
    "ToyPdeBlock",
    "apply_overrides",
    "load_config",
]

EXPERIMENTS = ("caputo-direct", "psi-stability", "toy-pde", "disk-wave")


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


@dataclass
class CaputoDirectBlock:
    function: str = "exp"
    mittag_a: float = 2.0
    L_values: list[int] = field(default_factory=list)
    dt_values: list[float] = field(default_factory=list)
    samples: int = 16


@dataclass
class PsiStabilityBlock:
    function: str = "exp"
    dt_values: list[float] = field(default_factory=list)
    n_steps: int = 0
    samples: int = 32
    panels: int = 64


@dataclass
class ToyPdeBlock:
    k: float = 10.0
    c: float = 100.0
    n_t: int = 64
    n_x: int = 64


@dataclass
class DiskWaveBlock:
    c0: float = 100.0
    tau: float = 1.0
    sensors: int = 70
    sensor_radius: float = 0.5
    sensor_every: int = 1
    snapshot_every: int = 100
    grid: int = 101
    grid_snapshots: int = 5
    initial: str = "dipole"
    paper_literal_scheme: bool = False


_BLOCKS = {
    "caputo": CaputoDirectBlock,
    "psi": PsiStabilityBlock,
    "toy": ToyPdeBlock,
    "disk": DiskWaveBlock,
}

DISK_INITIAL = ("dipole", "zero")


@dataclass
class ExperimentConfig:
    """One experiment invocation. Unset lists fall back to the scalar ``L`` / ``dt``."""

    experiment: str
    method: str = "birk-song"
    alpha: float = 0.5
    L: int = 60
    dt: float = 2.0**-10
    T: float = 1.0
    K: int = 40
    out: str = "out"
    caputo: CaputoDirectBlock = field(default_factory=CaputoDirectBlock)
    psi: PsiStabilityBlock = field(default_factory=PsiStabilityBlock)
    toy: ToyPdeBlock = field(default_factory=ToyPdeBlock)
    disk: DiskWaveBlock = field(default_factory=DiskWaveBlock)

    # -- (de)serialization ----------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("missing required key 'experiment'")
        for name, block_cls in _BLOCKS.items():
            raw = data.get(name, {})
            if isinstance(raw, block_cls):
                continue
            if not isinstance(raw, dict):
                raise ConfigError(f"'{name}' must be an object")
            bad = set(raw) - {f.name for f in fields(block_cls)}
            if bad:
                raise ConfigError(f"unknown keys in '{name}': {sorted(bad)}")
            data[name] = block_cls(**raw)
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    # -- validation -----------------------------------------------------------

    def validate(self) -> None:
        def need(ok, msg):
            if not ok:
                raise ConfigError(msg)

        def positive_int(v, name):
            need(isinstance(v, int) and not isinstance(v, bool) and v >= 1, f"{name} must be a positive integer")

        def positive(v, name):
            need(_is_number(v) and v > 0 and math.isfinite(v), f"{name} must be a positive number")

        need(self.experiment in EXPERIMENTS, f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        try:
            Method.parse(self.method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        need(_is_number(self.alpha) and 0.0 < self.alpha < 1.0, "alpha must lie in (0, 1)")
        positive_int(self.L, "L")
        positive_int(self.K, "K")
        positive(self.dt, "dt")
        positive(self.T, "T")
        need(isinstance(self.out, str) and self.out, "out must be a directory name")

        c = self.caputo
        need(c.function in TEST_FUNCTIONS, f"unknown test function {c.function!r}")
        positive(c.mittag_a, "caputo.mittag_a")
        need(isinstance(c.L_values, list) and isinstance(c.dt_values, list), "caputo L_values/dt_values must be lists")
        for v in c.L_values:
            positive_int(v, "caputo.L_values entry")
        for v in c.dt_values:
            positive(v, "caputo.dt_values entry")
        positive_int(c.samples, "caputo.samples")

        s = self.psi
        need(s.function in TEST_FUNCTIONS, f"unknown test function {s.function!r}")
        need(isinstance(s.dt_values, list), "psi.dt_values must be a list")
        for v in s.dt_values:
            positive(v, "psi.dt_values entry")
        need(isinstance(s.n_steps, int) and s.n_steps >= 0, "psi.n_steps must be a non-negative integer")
        positive_int(s.samples, "psi.samples")
        positive_int(s.panels, "psi.panels")

        positive(self.toy.k, "toy.k")
        positive(self.toy.c, "toy.c")
        positive_int(self.toy.n_t, "toy.n_t")
        positive_int(self.toy.n_x, "toy.n_x")

        d = self.disk
        positive(d.c0, "disk.c0")
        need(_is_number(d.tau) and d.tau >= 0, "disk.tau must be non-negative")
        need(isinstance(d.sensors, int) and d.sensors >= 0, "disk.sensors must be a non-negative integer")
        need(_is_number(d.sensor_radius) and 0.0 <= d.sensor_radius <= 1.0, "disk.sensor_radius must lie in [0, 1]")
        positive_int(d.sensor_every, "disk.sensor_every")
        positive_int(d.snapshot_every, "disk.snapshot_every")
        positive_int(d.grid, "disk.grid")
        need(isinstance(d.grid_snapshots, int) and d.grid_snapshots >= 0, "disk.grid_snapshots must be >= 0")
        need(d.initial in DISK_INITIAL, f"disk.initial must be one of {DISK_INITIAL}")
        need(isinstance(d.paper_literal_scheme, bool), "disk.paper_literal_scheme must be a boolean")

        if self.experiment in ("toy-pde", "disk-wave"):
            n = round(self.T / self.dt)
            need(n >= 1 and abs(n * self.dt - self.T) <= 1e-9 * max(self.T, 1.0), "T must be a multiple of dt")
        if self.experiment == "toy-pde":
            need(self.K >= 3, "K must be at least 3 for the toy problem")


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Apply ``key=value`` overrides; dotted keys reach into blocks, values parse as JSON."""
    data = json.loads(json.dumps(data))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} does not address a block")
        node[parts[-1]] = _parse_value(text)
    return data


def load_config(path, overrides: list[str] | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    return ExperimentConfig.from_dict(apply_overrides(data, overrides or []))
