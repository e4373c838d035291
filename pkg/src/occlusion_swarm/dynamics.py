"""World state and its fixed-step update.

One tick is synchronous: every robot senses the same snapshot, controllers
decide, then all robots move, the object is pushed, and collisions are
resolved by minimal positional separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .behaviors import (
    BehaviorParams, FillMode, FillObservations, FillState, Led, MotionCommand, Role,
    TransportMode, TransportObservations, TransportState, fill_step, transport_step,
)
from .config import ScenarioConfig
from .geometry import (
    EPS, Footprint, Pose2, Vec2, check_finite, footprint_separation, normalize_angle,
)
from .sensing import (
    LightObservation, ProximityRing, observe_light, readings_from_row, scan_all,
)

__all__ = [
    "MotionCommand", "Role", "Led", "Robot", "World", "integrate_unicycle", "apply_push",
    "resolve_collisions", "step", "Contact",
]


@dataclass
class Robot:
    id: int
    pose: Pose2
    radius: float = 0.05
    role: Role = Role.FREE
    led: Led = Led.OFF
    state: object = None
    # pose in the object frame once the robot is part of the pseudo-object
    anchor: Optional[Pose2] = None
    command: MotionCommand = MotionCommand()

    @property
    def movable(self) -> bool:
        return self.role is not Role.OBJECT


@dataclass
class World:
    config: ScenarioConfig
    obj: Footprint
    robots: list
    light: Vec2
    bounds: tuple  # xmin, xmax, ymin, ymax
    rng: np.random.Generator
    step_index: int = 0
    wall_contact: bool = False
    push_contacts: int = 0
    # (step, robot id, light occluded at entry) for every entry into Push
    push_entries: list = field(default_factory=list)

    @property
    def time(self) -> float:
        return self.step_index * self.config.dt

    @property
    def dt(self) -> float:
        return self.config.dt

    @property
    def ring(self) -> ProximityRing:
        s = self.config.sensors
        return ProximityRing(s.sensor_count, s.max_range)

    def attached_count(self) -> int:
        return sum(1 for r in self.robots if r.anchor is not None)

    def pushing_count(self) -> int:
        return sum(1 for r in self.robots if r.role is Role.PUSHING)

    def snapshot(self) -> dict:
        """Plain-data view of the state, stable across runs."""
        return {
            "step": self.step_index,
            "object": list(self.obj.pose) + [list(d.center) + [d.radius] for d in self.obj.discs],
            "robots": [[r.id, *r.pose, r.role.value, r.led.value,
                        getattr(r.state, "name", None)] for r in self.robots],
            "wall_contact": self.wall_contact,
        }


# ---------------------------------------------------------------------------
# kinematics and pushing
# ---------------------------------------------------------------------------

def integrate_unicycle(p: Pose2, cmd: MotionCommand, dt: float) -> Pose2:
    """Exact unicycle update over ``dt`` (arc when turning, line otherwise)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    v, w = cmd
    th = p.heading
    if abs(w) < 1e-12:
        return Pose2(p.x + v * math.cos(th) * dt, p.y + v * math.sin(th) * dt, normalize_angle(th))
    th1 = th + w * dt
    return Pose2(p.x + v / w * (math.sin(th1) - math.sin(th)),
                 p.y - v / w * (math.cos(th1) - math.cos(th)),
                 normalize_angle(th1))


Contact = tuple  # (point: Vec2, inward_normal: Vec2)


def apply_push(obj: Footprint, contacts: Sequence[Contact], k_t: float = 0.02,
               k_r: float = 0.05) -> tuple[Vec2, float]:
    """Quasi-static push: velocity and spin proportional to summed contact forces."""
    if not contacts:
        return Vec2(0.0, 0.0), 0.0
    c = obj.centroid()
    fx = fy = tz = 0.0
    for p, n in contacts:
        fx += n[0]
        fy += n[1]
        tz += (p[0] - c.x) * n[1] - (p[1] - c.y) * n[0]
    return Vec2(k_t * fx, k_t * fy), k_r * tz


def move_object(world: World, v: Sequence[float], w: float, dt: float) -> None:
    """Rigidly advance the object about its centroid and carry attached robots."""
    c = world.obj.centroid()
    pose = world.obj.pose
    a = w * dt
    ca, sa = math.cos(a), math.sin(a)
    rx, ry = pose.x - c.x, pose.y - c.y
    new = Pose2(c.x + v[0] * dt + ca * rx - sa * ry,
                c.y + v[1] * dt + sa * rx + ca * ry,
                normalize_angle(pose.heading + a))
    _set_object_pose(world, new)


def _set_object_pose(world: World, pose: Pose2) -> None:
    world.obj = world.obj.with_pose(pose)
    for r in world.robots:
        if r.anchor is not None:
            p = pose.apply((r.anchor.x, r.anchor.y))
            r.pose = Pose2(p.x, p.y, normalize_angle(pose.heading + r.anchor.heading))


# ---------------------------------------------------------------------------
# collisions
# ---------------------------------------------------------------------------

def _clamp_robot(r: Robot, bounds) -> None:
    xmin, xmax, ymin, ymax = bounds
    x = min(xmax - r.radius, max(xmin + r.radius, r.pose.x))
    y = min(ymax - r.radius, max(ymin + r.radius, r.pose.y))
    if x != r.pose.x or y != r.pose.y:
        r.pose = Pose2(x, y, r.pose.heading)


def object_wall_gap(obj: Footprint, bounds) -> float:
    """Smallest distance from the object's extreme points to any arena wall."""
    xmin, xmax, ymin, ymax = bounds
    ex = obj.extent()
    return min(ex[0] - xmin, xmax - ex[1], ex[2] - ymin, ymax - ex[3])


def resolve_collisions(world: World) -> World:
    bounds = world.bounds
    xmin, xmax, ymin, ymax = bounds
    obj = world.obj
    ex = obj.extent()
    dx = max(0.0, xmin - ex[0]) - max(0.0, ex[1] - xmax)
    dy = max(0.0, ymin - ex[2]) - max(0.0, ex[3] - ymax)
    if dx or dy:
        p = obj.pose
        _set_object_pose(world, Pose2(p.x + dx, p.y + dy, p.heading))
        obj = world.obj
    if object_wall_gap(obj, bounds) <= EPS:
        world.wall_contact = True

    c = obj.centroid()
    reach = obj.bounding_radius_local
    movable = [r for r in world.robots if r.movable]
    fixed = [r for r in world.robots if not r.movable and r.anchor is None]
    for _ in range(world.config.dynamics.collision_passes):
        moved = False
        for r in movable:
            x, y = r.pose.x, r.pose.y
            if math.hypot(x - c.x, y - c.y) > reach + r.radius:
                continue
            d, nx, ny = footprint_separation((x, y), obj)
            if d < r.radius:
                k = r.radius - d
                r.pose = Pose2(x + k * nx, y + k * ny, r.pose.heading)
                moved = True
        for i, a in enumerate(movable):
            for b in movable[i + 1:] + fixed:
                ddx, ddy = b.pose.x - a.pose.x, b.pose.y - a.pose.y
                lim = a.radius + b.radius
                if abs(ddx) >= lim or abs(ddy) >= lim:
                    continue
                dist = math.hypot(ddx, ddy)
                if dist >= lim:
                    continue
                if dist > 0:
                    ux, uy = ddx / dist, ddy / dist
                else:
                    ux, uy = 1.0, 0.0
                overlap = lim - dist
                share = 0.5 if b.movable else 0.0
                ka = overlap * (1.0 - share)
                kb = overlap * share
                a.pose = Pose2(a.pose.x - ka * ux, a.pose.y - ka * uy, a.pose.heading)
                if kb:
                    b.pose = Pose2(b.pose.x + kb * ux, b.pose.y + kb * uy, b.pose.heading)
                moved = True
        for r in movable:
            _clamp_robot(r, bounds)
        if not moved:
            break
    for r in movable:
        _clamp_robot(r, bounds)
    return world


# ---------------------------------------------------------------------------
# the tick
# ---------------------------------------------------------------------------

def _scene_arrays(world: World, sensing: Sequence[int]):
    obj = world.obj
    segs = []
    for poly in obj.world_parts:
        for a, b in poly.edges():
            segs.append((a.x, a.y, b.x, b.y))
    if world.config.sensors.walls_sensed and not world.config.controller.distinguish_walls:
        xmin, xmax, ymin, ymax = world.bounds
        segs += [(xmin, ymin, xmax, ymin), (xmax, ymin, xmax, ymax),
                 (xmax, ymax, xmin, ymax), (xmin, ymax, xmin, ymin)]
    discs = [(d.center.x, d.center.y, d.radius) for d in obj.world_discs]
    owner = [-1] * len(discs)
    row = {idx: k for k, idx in enumerate(sensing)}
    for i, r in enumerate(world.robots):
        if r.anchor is not None:
            continue
        discs.append((r.pose.x, r.pose.y, r.radius))
        owner.append(row.get(i, -1))
    polys = [np.array([(a.x, a.y, b.x, b.y) for a, b in p.edges()]) for p in obj.world_parts]
    return (np.array(segs, dtype=float).reshape(-1, 4), np.array(discs, dtype=float).reshape(-1, 3),
            np.array(owner, dtype=int), polys)


def sense(world: World, indices: Sequence[int]) -> np.ndarray:
    """Proximity distances (inf = nothing) for the given robot indices."""
    robots = world.robots
    poses = np.array([tuple(robots[i].pose) for i in indices], dtype=float).reshape(-1, 3)
    radii = np.array([robots[i].radius for i in indices], dtype=float)
    segs, discs, owner, polys = _scene_arrays(world, indices)
    dist = scan_all(poses, radii, world.ring, segs, discs, owner, polys)
    noise = world.config.sensors.noise
    if noise > 0:
        jitter = world.rng.uniform(-noise, noise, size=dist.shape)
        dist = np.where(np.isfinite(dist), np.clip(dist + jitter, 0.0, world.ring.max_range), dist)
    return dist


def _beacon(pose: Pose2, light: Vec2, beacon_range: float) -> LightObservation:
    dx, dy = light.x - pose.x, light.y - pose.y
    if math.hypot(dx, dy) > beacon_range:
        return LightObservation(False, None)
    return LightObservation(True, normalize_angle(math.atan2(dy, dx) - pose.heading))


def step(world: World) -> World:
    cfg = world.config
    params = BehaviorParams.from_config(cfg)
    robots = world.robots
    obj = world.obj
    centroid = obj.centroid()
    fill = cfg.experiment == "Fill"

    active = [i for i, r in enumerate(robots) if r.movable]
    dist = sense(world, active)

    # decide on the snapshot; nothing is mutated until every robot has decided
    outputs = []
    for k, i in enumerate(active):
        r = robots[i]
        prox = readings_from_row(dist[k])
        if fill:
            obs = FillObservations(prox, _beacon(r.pose, world.light, cfg.controller.beacon_range))
            outputs.append(fill_step(r.state, obs, params, world.rng))
        else:
            light = observe_light(r.pose, world.light, obj)
            obs = TransportObservations(prox, light, r.pose, centroid)
            out = transport_step(r.state, obs, params)
            if out.state.mode is TransportMode.PUSH and r.state.mode is not TransportMode.PUSH:
                world.push_entries.append((world.step_index, r.id, not light.visible))
            outputs.append(out)

    dyn = cfg.dynamics
    for k, i in enumerate(active):
        r = robots[i]
        out = outputs[k]
        r.state = out.state
        r.led = out.led
        if out.role is not None:
            r.role = out.role
        r.command = out.command.clamped(dyn.v_max, dyn.omega_max)
        if r.role is Role.OBJECT:
            r.command = MotionCommand()
            d, _, _ = footprint_separation((r.pose.x, r.pose.y), world.obj)
            # only robots resting inside the cavity join the pseudo-object
            if d - r.radius <= dyn.attach_eps and world.obj.hull_contains_disc((r.pose.x, r.pose.y), r.radius):
                world.obj = world.obj.with_world_disc((r.pose.x, r.pose.y), r.radius)
                local = world.obj.pose.inverse_apply((r.pose.x, r.pose.y))
                r.anchor = Pose2(local.x, local.y, normalize_angle(r.pose.heading - world.obj.pose.heading))
            continue
        r.pose = integrate_unicycle(r.pose, r.command, cfg.dt)

    contacts = []
    obj = world.obj
    for r in robots:
        if r.role is not Role.PUSHING:
            continue
        d, nx, ny = footprint_separation((r.pose.x, r.pose.y), obj)
        if d - r.radius <= dyn.contact_eps:
            contacts.append((Vec2(r.pose.x - d * nx, r.pose.y - d * ny), Vec2(-nx, -ny)))
    world.push_contacts = len(contacts)
    if contacts:
        v, w = apply_push(obj, contacts, dyn.k_t, dyn.k_r)
        move_object(world, v, w, cfg.dt)

    resolve_collisions(world)
    world.step_index += 1
    return world


def initial_state(experiment: str):
    return FillState() if experiment == "Fill" else TransportState()
