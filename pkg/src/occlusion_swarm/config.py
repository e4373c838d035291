"""Scenario configuration: nested dataclasses, YAML loading, dotted overrides."""

from __future__ import annotations

import dataclasses
import math
import os
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml


class ConfigError(ValueError):
    pass


@dataclass
class ShapeSpec:
    """Object shape. Rect/U/L use width/height/wall; Arc uses radius/thickness/opening/segments."""

    kind: str = "Rect"
    width: float = 1.0
    height: float = 0.6
    wall: float = 0.2
    radius: float = 0.8
    thickness: float = 0.2
    opening_deg: float = 180.0
    segments: int = 6


@dataclass
class ObjectPose:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0


@dataclass
class Placement:
    """``kind`` is ``random`` (uniform in ``region``) or ``grid``."""

    kind: str = "random"
    rows: int = 2
    cols: int = 3
    spacing: float = 0.3
    center: list = field(default_factory=lambda: [-2.0, 0.0])
    # xmin, xmax, ymin, ymax; empty means the whole arena
    region: list = field(default_factory=list)
    # radians; null draws a uniform random heading per robot
    heading: Optional[float] = None
    object_clearance: float = 0.2


@dataclass
class Arena:
    width: float = 6.0
    height: float = 6.0


@dataclass
class SensorParams:
    sensor_count: int = 8
    max_range: float = 0.12
    detect_threshold: float = 0.06
    noise: float = 0.0
    walls_sensed: bool = True


@dataclass
class ControllerParams:
    attach_count: int = 4
    standoff: float = 0.04
    front_block: float = 0.02
    k_wall: float = 12.0
    k_align: float = 8.0
    k_beacon: float = 2.0
    k_orient: float = 3.0
    v_follow: float = 0.05
    v_approach: float = 0.08
    v_push: float = 0.06
    omega_turn: float = 1.5
    omega_scan: float = 1.0
    theta_tol: float = 0.05
    random_walk_ticks: int = 40
    lost_ticks: int = 100
    beacon_range: float = 5.0
    push_reeval: bool = True
    distinguish_walls: bool = False


@dataclass
class DynamicsParams:
    robot_radius: float = 0.05
    v_max: float = 0.1
    omega_max: float = math.pi
    k_t: float = 0.02
    k_r: float = 0.05
    contact_eps: float = 0.005
    collision_passes: int = 3
    attach_eps: float = 0.06


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    experiment: str = "Transport"
    shape: ShapeSpec = field(default_factory=ShapeSpec)
    object_pose: ObjectPose = field(default_factory=ObjectPose)
    object_orientation_deg: float = 0.0
    robot_count: int = 6
    placement: Placement = field(default_factory=Placement)
    seed: int = 0
    # null places the light above the object (fill) ; transport default is 2 m east
    light: Optional[list] = None
    arena: Arena = field(default_factory=Arena)
    dt: float = 0.05
    max_steps: int = 40000
    goal_radius: float = 0.3
    fill_epsilon: float = 0.25
    decimation: int = 10
    controller: ControllerParams = field(default_factory=ControllerParams)
    sensors: SensorParams = field(default_factory=SensorParams)
    dynamics: DynamicsParams = field(default_factory=DynamicsParams)

    # -- derived -----------------------------------------------------------
    def light_position(self) -> tuple[float, float]:
        if self.light is not None:
            return float(self.light[0]), float(self.light[1])
        if self.experiment == "Fill":
            return self.object_pose.x, self.object_pose.y
        return self.object_pose.x + 2.0, self.object_pose.y

    def object_heading(self) -> float:
        return self.object_pose.heading + math.radians(self.object_orientation_deg)

    def bounds(self) -> tuple[float, float, float, float]:
        w, h = self.arena.width / 2, self.arena.height / 2
        return -w, w, -h, h

    def validate(self) -> "ScenarioConfig":
        if self.experiment not in ("Fill", "Transport"):
            raise ConfigError(f"experiment must be Fill or Transport, got {self.experiment!r}")
        if self.shape.kind not in ("U", "L", "Arc", "Rect"):
            raise ConfigError(f"shape.kind must be U, L, Arc or Rect, got {self.shape.kind!r}")
        if self.placement.kind not in ("random", "grid"):
            raise ConfigError(f"placement.kind must be random or grid, got {self.placement.kind!r}")
        if self.robot_count < 1:
            raise ConfigError("robot_count must be >= 1")
        if self.max_steps < 0:
            raise ConfigError("max_steps must be >= 0")
        if self.dt <= 0 or self.arena.width <= 0 or self.arena.height <= 0:
            raise ConfigError("dt and arena dimensions must be positive")
        if self.decimation < 1:
            raise ConfigError("decimation must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.sensors.detect_threshold > self.sensors.max_range:
            raise ConfigError("sensors.detect_threshold must not exceed sensors.max_range")
        if self.sensors.sensor_count < 3:
            raise ConfigError("sensors.sensor_count must be >= 3")
        if self.dynamics.robot_radius <= 0:
            raise ConfigError("dynamics.robot_radius must be positive")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def with_overrides(self, changes: dict) -> "ScenarioConfig":
        """Copy with dotted-key overrides applied (``{"controller.k_wall": 5}``)."""
        return apply_overrides(self, changes)


def _hints(cls) -> dict:
    return typing.get_type_hints(cls)


def _build(cls, data: Any, path: str = ""):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(data).__name__}")
    hints = _hints(cls)
    names = [f.name for f in dataclasses.fields(cls)]
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(path + k for k in unknown)}; "
                          f"valid keys: {', '.join(path + n for n in names)}")
    kwargs = {}
    for name in names:
        if name not in data:
            continue
        tp = hints[name]
        value = data[name]
        if dataclasses.is_dataclass(tp):
            kwargs[name] = _build(tp, value, f"{path}{name}.")
        else:
            kwargs[name] = _coerce(tp, value, path + name)
    return cls(**kwargs)


def _coerce(tp, value, key):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union:
        if value is None and type(None) in args:
            return None
        tp = next(a for a in args if a is not type(None))
        origin = typing.get_origin(tp)
    if tp is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if tp is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if tp is bool and isinstance(value, bool):
        return value
    if tp is str and isinstance(value, str):
        return value
    if (tp is list or origin is list) and isinstance(value, (list, tuple)):
        return list(value)
    raise ConfigError(f"{key}: expected {getattr(tp, '__name__', tp)}, got {value!r}")


def from_dict(data: dict) -> ScenarioConfig:
    return _build(ScenarioConfig, data or {})


def valid_keys(cls=ScenarioConfig, prefix: str = "") -> list[str]:
    out = []
    hints = _hints(cls)
    for f in dataclasses.fields(cls):
        tp = hints[f.name]
        if dataclasses.is_dataclass(tp):
            out += valid_keys(tp, f"{prefix}{f.name}.")
        else:
            out.append(prefix + f.name)
    return out


def parse_override(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def _flatten(overrides: dict, prefix: str = "") -> dict:
    """``{"controller": {"k_wall": 5}}`` -> ``{"controller.k_wall": 5}``; leaves stay as given."""
    sections = {f.name for f in dataclasses.fields(ScenarioConfig)
                if dataclasses.is_dataclass(_hints(ScenarioConfig)[f.name])}
    out = {}
    for key, value in overrides.items():
        full = prefix + key
        if isinstance(value, dict) and not prefix and key in sections:
            out.update(_flatten(value, full + "."))
        else:
            out[full] = value
    return out


def apply_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    """Return a copy of ``cfg`` with dotted-key overrides applied."""
    data = cfg.to_dict()
    keys = valid_keys()
    for key, value in _flatten(overrides).items():
        if key not in keys:
            raise ConfigError(f"unknown override key {key!r}; valid keys: {', '.join(keys)}")
        node = data
        parts = key.split(".")
        for p in parts[:-1]:
            node = node[p]
        node[parts[-1]] = value
    return from_dict(data)


def load_config(path: str | os.PathLike, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Parse a YAML scenario file, apply overrides, validate.

    The seed falls back to ``SWARM_SIM_SEED`` when the file does not set one.
    """
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: top level must be a mapping")
    if "seed" not in data and os.environ.get("SWARM_SIM_SEED"):
        try:
            data["seed"] = int(os.environ["SWARM_SIM_SEED"])
        except ValueError as exc:
            raise ConfigError("SWARM_SIM_SEED must be an integer") from exc
    cfg = from_dict(data)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg.validate()


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
