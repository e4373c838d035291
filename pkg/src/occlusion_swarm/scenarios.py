"""Scenario construction: object shapes, robot placement, initial world."""

from __future__ import annotations

import math

import numpy as np

from .behaviors import Led, Role
from .config import ConfigError, ScenarioConfig, ShapeSpec
from .dynamics import Robot, World, initial_state
from .geometry import ConvexPolygon, Footprint, Pose2, Vec2, footprint_separation

R = ConvexPolygon.rectangle


def build_shape(spec: ShapeSpec) -> Footprint:
    """Footprint in its local frame (bounding-box centre at the origin for
    Rect/U/L; circle centre for Arc)."""
    k = spec.kind
    if k in ("Rect", "U", "L"):
        w, h, t = spec.width, spec.height, spec.wall
        if w <= 0 or h <= 0 or (k != "Rect" and t <= 0):
            raise ConfigError(f"{k}: dimensions must be positive")
        ox, oy = -w / 2, -h / 2
        if k == "Rect":
            parts = [R(ox, oy, ox + w, oy + h)]
        elif k == "U":
            if 2 * t >= w or t >= h:
                raise ConfigError("U: wall too thick for the outer size")
            parts = [R(ox, oy, ox + w, oy + t),
                     R(ox, oy + t, ox + t, oy + h),
                     R(ox + w - t, oy + t, ox + w, oy + h)]
        else:
            if t >= w or t >= h:
                raise ConfigError("L: wall too thick for the outer size")
            parts = [R(ox, oy, ox + t, oy + h),
                     R(ox + t, oy, ox + w, oy + t)]
        return Footprint(tuple(parts))
    if k == "Arc":
        r_out, r_in = spec.radius, spec.radius - spec.thickness
        n = spec.segments
        if spec.radius <= 0 or spec.thickness <= 0 or r_in <= 0:
            raise ConfigError("Arc: need 0 < thickness < radius")
        if n < 4:
            raise ConfigError("Arc: at least 4 segments")
        if not 0 < spec.opening_deg <= 360:
            raise ConfigError("Arc: opening_deg must be in (0, 360]")
        span = math.radians(spec.opening_deg)
        a0 = -math.pi / 2 - span / 2
        parts = []
        for i in range(n):
            t0, t1 = a0 + span * i / n, a0 + span * (i + 1) / n
            parts.append(ConvexPolygon((
                (r_in * math.cos(t0), r_in * math.sin(t0)),
                (r_out * math.cos(t0), r_out * math.sin(t0)),
                (r_out * math.cos(t1), r_out * math.sin(t1)),
                (r_in * math.cos(t1), r_in * math.sin(t1)),
            )))
        return Footprint(tuple(parts))
    raise ConfigError(f"unknown shape kind {k!r}")


def place_object(cfg: ScenarioConfig) -> Footprint:
    f = build_shape(cfg.shape).with_pose(Pose2(cfg.object_pose.x, cfg.object_pose.y, cfg.object_heading()))
    xmin, xmax, ymin, ymax = cfg.bounds()
    ex = f.extent()
    if ex[0] < xmin or ex[1] > xmax or ex[2] < ymin or ex[3] > ymax:
        raise ConfigError("object does not fit inside the arena")
    return f


def _heading(cfg: ScenarioConfig, rng: np.random.Generator) -> float:
    h = cfg.placement.heading
    return float(rng.uniform(-math.pi, math.pi)) if h is None else float(h)


def place_robots(cfg: ScenarioConfig, obj: Footprint, rng: np.random.Generator) -> list[Robot]:
    """Grid or rejection-sampled uniform placement; never overlapping."""
    pl = cfg.placement
    r = cfg.dynamics.robot_radius
    xmin, xmax, ymin, ymax = cfg.bounds()
    n = cfg.robot_count
    robots: list[Robot] = []

    def fits(x, y, clearance):
        if not (xmin + r <= x <= xmax - r and ymin + r <= y <= ymax - r):
            return False
        if footprint_separation((x, y), obj)[0] < r + clearance:
            return False
        return all(math.hypot(x - o.pose.x, y - o.pose.y) >= 2 * r for o in robots)

    if pl.kind == "grid":
        if pl.rows * pl.cols < n:
            raise ConfigError(f"grid {pl.rows}x{pl.cols} holds fewer than {n} robots")
        cx, cy = pl.center
        for k in range(n):
            i, j = divmod(k, pl.cols)
            x = cx + (j - (pl.cols - 1) / 2) * pl.spacing
            y = cy + ((pl.rows - 1) / 2 - i) * pl.spacing
            if not fits(x, y, 0.0):
                raise ConfigError(f"grid position ({x:.3f}, {y:.3f}) overlaps the object, a wall or a robot")
            robots.append(Robot(k, Pose2(x, y, _heading(cfg, rng)), r, Role.FREE, Led.OFF,
                                initial_state(cfg.experiment)))
        return robots

    region = pl.region or [xmin + r, xmax - r, ymin + r, ymax - r]
    if len(region) != 4 or region[0] >= region[1] or region[2] >= region[3]:
        raise ConfigError("placement.region must be [xmin, xmax, ymin, ymax]")
    attempts = 0
    while len(robots) < n:
        attempts += 1
        if attempts > 2000 * n:
            raise ConfigError(f"placement region too small for {n} robots")
        x = float(rng.uniform(region[0], region[1]))
        y = float(rng.uniform(region[2], region[3]))
        if fits(x, y, pl.object_clearance):
            robots.append(Robot(len(robots), Pose2(x, y, _heading(cfg, rng)), r, Role.FREE, Led.OFF,
                                initial_state(cfg.experiment)))
    return robots


def build_world(cfg: ScenarioConfig) -> World:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    obj = place_object(cfg)
    robots = place_robots(cfg, obj, rng)
    return World(config=cfg, obj=obj, robots=robots, light=Vec2(*cfg.light_position()),
                 bounds=cfg.bounds(), rng=rng)
