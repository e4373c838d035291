"""Decentralised controllers as explicit finite state machines.

Both controllers are pure transition functions
``(state, observations, params) -> StepOutput``; they read only their own
observations, so there is no channel for explicit communication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .config import ControllerParams, ScenarioConfig
from .geometry import Pose2, Vec2, normalize_angle
from .sensing import LightObservation, ProximityReadings, active_count


class Role(str, Enum):
    FREE = "Free"
    OBJECT = "ObjectRobot"
    PUSHING = "PushingRobot"


class Led(str, Enum):
    OFF = "Off"
    RED = "Red"
    BLUE = "Blue"


class MotionCommand(NamedTuple):
    linear: float = 0.0
    angular: float = 0.0

    def clamped(self, v_max: float, omega_max: float) -> "MotionCommand":
        return MotionCommand(min(v_max, max(-v_max, self.linear)),
                             min(omega_max, max(-omega_max, self.angular)))


STOP = MotionCommand(0.0, 0.0)


class NoContact(ValueError):
    """Wall following was asked to act with nothing in sensor range."""


@dataclass(frozen=True)
class BehaviorParams:
    ctl: ControllerParams
    detect_threshold: float = 0.06
    radius: float = 0.05
    dt: float = 0.05

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> "BehaviorParams":
        return cls(cfg.controller, cfg.sensors.detect_threshold, cfg.dynamics.robot_radius, cfg.dt)


# ---------------------------------------------------------------------------
# states and observations
# ---------------------------------------------------------------------------

class FillMode(str, Enum):
    SCAN = "Scan"
    RANDOM_WALK = "RandomWalk"
    APPROACH = "ApproachObject"
    WALL_FOLLOW = "WallFollow"
    ATTACHED = "Attached"


class TransportMode(str, Enum):
    ORIENT = "OrientToObject"
    MOVE = "MoveToObject"
    WALL_FOLLOW = "WallFollow"
    ALIGN_PUSH = "AlignPush"
    PUSH = "Push"
    STOPPED = "Stopped"


@dataclass(frozen=True)
class FillState:
    mode: FillMode = FillMode.SCAN
    # RandomWalk: ticks left; Scan: unused
    steps_left: int = 0
    # Scan: accumulated rotation; RandomWalk: rotation still to perform
    turn: float = 0.0
    lost: int = 0

    @property
    def name(self) -> str:
        return self.mode.value


@dataclass(frozen=True)
class TransportState:
    mode: TransportMode = TransportMode.ORIENT
    lost: int = 0
    reason: Optional[str] = None

    @property
    def name(self) -> str:
        return self.mode.value


class FillObservations(NamedTuple):
    proximity: ProximityReadings
    beacon: LightObservation


class TransportObservations(NamedTuple):
    proximity: ProximityReadings
    goal_light: LightObservation
    own_pose: Pose2
    object_centroid: Vec2


class StepOutput(NamedTuple):
    state: object
    command: MotionCommand
    led: Led
    role: Optional[Role] = None  # set when the role changes this tick


# ---------------------------------------------------------------------------
# left-hand wall following
# ---------------------------------------------------------------------------

def _sector(n: int):
    spacing = 2 * math.pi / n
    front, left_side, back_left = [], [], []
    for i in range(n):
        a = normalize_angle(i * spacing)
        if abs(a) <= math.pi / 6:
            front.append((i, a))
        elif math.pi / 6 < a <= math.pi / 2 + 1e-9:
            left_side.append((i, a))
        elif math.pi / 2 + 1e-9 < a < 5 * math.pi / 6 + 1e-9:
            back_left.append((i, a))
    return front, left_side, back_left


def left_hand_wall_command(proximity: ProximityReadings, params: BehaviorParams) -> MotionCommand:
    """Keep the followed surface on the left at the configured standoff.

    Inner corner (front blocked): turn right in place. Surface ahead but not
    yet on the left: turn right in place. Left side lost but something still
    sensed (convex corner): arc left around it.
    """
    d = proximity.distances
    if all(x is None for x in d):
        raise NoContact("no proximity readings")
    c, r = params.ctl, params.radius
    front, left_side, back_left = _sector(len(d))

    fronts = [d[i] for i, _ in front if d[i] is not None]
    front_dist = min(fronts) if fronts else None
    if front_dist is not None and front_dist <= c.front_block:
        return MotionCommand(0.0, -c.omega_turn)

    lateral = [(r + d[i]) * math.sin(a) - r for i, a in left_side if d[i] is not None]
    if lateral:
        err = min(lateral) - c.standoff
        w = c.k_wall * err
        fl = [(r + d[i]) * math.sin(a) for i, a in left_side if d[i] is not None and a < math.pi / 2 - 1e-9]
        bl = [(r + d[i]) * math.sin(a) for i, a in back_left if d[i] is not None]
        if fl and bl:
            w += c.k_align * (min(fl) - min(bl))
        v = c.v_follow * max(0.2, 1.0 - abs(w) / c.omega_turn)
        return MotionCommand(v, w)

    ahead = front_dist is not None or any(
        d[i] is not None for i in range(len(d)) if -math.pi / 2 < normalize_angle(2 * math.pi * i / len(d)) < 0)
    if ahead:
        return MotionCommand(0.0, -c.omega_turn)
    v = 0.6 * c.v_follow
    return MotionCommand(v, v / (r + c.standoff))


def _follow_or_lost(proximity, params):
    """Wall command plus a flag telling whether contact was lost this tick."""
    try:
        return left_hand_wall_command(proximity, params), False
    except NoContact:
        c = params.ctl
        v = 0.6 * c.v_follow
        return MotionCommand(v, v / (params.radius + c.standoff)), True


def _avoid(proximity: ProximityReadings, params: BehaviorParams) -> Optional[MotionCommand]:
    """Reactive turn away from anything close ahead; None when clear."""
    d = proximity.distances
    n = len(d)
    left = right = False
    for i, x in enumerate(d):
        if x is None or x > params.detect_threshold:
            continue
        a = normalize_angle(2 * math.pi * i / n)
        if abs(a) < math.pi / 2:
            if a >= 0:
                left = True
            else:
                right = True
    if left:
        return MotionCommand(0.0, -params.ctl.omega_turn)
    if right:
        return MotionCommand(0.0, params.ctl.omega_turn)
    return None


# ---------------------------------------------------------------------------
# concave filling
# ---------------------------------------------------------------------------

def _approach(bearing: float, c: ControllerParams) -> MotionCommand:
    w = c.k_beacon * bearing
    v = c.v_approach * max(0.0, math.cos(bearing))
    return MotionCommand(v, w)


def fill_step(s: FillState, obs: FillObservations, params: BehaviorParams,
              rng: Optional[np.random.Generator] = None) -> StepOutput:
    c = params.ctl
    mode = s.mode
    if mode is FillMode.ATTACHED:
        raise ValueError("fill_step called on an attached robot")

    if mode is FillMode.SCAN:
        if obs.beacon.visible:
            return StepOutput(FillState(FillMode.APPROACH), _approach(obs.beacon.bearing, c), Led.OFF)
        turned = s.turn + abs(c.omega_scan) * params.dt
        if turned >= 2 * math.pi:
            turn = float(rng.uniform(-math.pi, math.pi)) if rng is not None else 0.0
            return StepOutput(FillState(FillMode.RANDOM_WALK, c.random_walk_ticks, turn), STOP, Led.OFF)
        return StepOutput(replace(s, turn=turned), MotionCommand(0.0, c.omega_scan), Led.OFF)

    if mode is FillMode.RANDOM_WALK:
        if s.steps_left <= 0:
            return StepOutput(FillState(FillMode.SCAN), MotionCommand(0.0, c.omega_scan), Led.OFF)
        left = s.steps_left - 1
        avoid = _avoid(obs.proximity, params)
        if avoid is not None:
            return StepOutput(replace(s, steps_left=left), avoid, Led.OFF)
        if abs(s.turn) > 1e-9:
            step = min(abs(s.turn), c.omega_turn * params.dt)
            w = math.copysign(step / params.dt, s.turn)
            return StepOutput(replace(s, steps_left=left, turn=s.turn - math.copysign(step, s.turn)),
                              MotionCommand(0.0, w), Led.OFF)
        cmd = MotionCommand(c.v_follow, 0.0)
        if left == 0:
            return StepOutput(FillState(FillMode.SCAN), cmd, Led.OFF)
        return StepOutput(replace(s, steps_left=left), cmd, Led.OFF)

    if mode is FillMode.APPROACH:
        if active_count(obs.proximity, params.detect_threshold) > 0:
            cmd, _ = _follow_or_lost(obs.proximity, params)
            return StepOutput(FillState(FillMode.WALL_FOLLOW), cmd, Led.RED)
        if not obs.beacon.visible:
            return StepOutput(FillState(FillMode.SCAN), MotionCommand(0.0, c.omega_scan), Led.OFF)
        return StepOutput(s, _approach(obs.beacon.bearing, c), Led.OFF)

    # WallFollow
    if active_count(obs.proximity, params.detect_threshold) >= c.attach_count:
        return StepOutput(FillState(FillMode.ATTACHED), STOP, Led.BLUE, Role.OBJECT)
    cmd, lost = _follow_or_lost(obs.proximity, params)
    if lost:
        if s.lost + 1 >= c.lost_ticks:
            return StepOutput(FillState(FillMode.SCAN), cmd, Led.RED)
        return StepOutput(replace(s, lost=s.lost + 1), cmd, Led.RED)
    return StepOutput(FillState(FillMode.WALL_FOLLOW), cmd, Led.RED)


# ---------------------------------------------------------------------------
# occlusion-based transport
# ---------------------------------------------------------------------------

def bearing_error(pose: Pose2, target: Vec2) -> float:
    return normalize_angle(math.atan2(target[1] - pose.y, target[0] - pose.x) - pose.heading)


def transport_step(s: TransportState, obs: TransportObservations, params: BehaviorParams) -> StepOutput:
    c = params.ctl
    mode = s.mode
    if mode is TransportMode.STOPPED:
        raise ValueError("transport_step called on a stopped robot")
    err = bearing_error(obs.own_pose, obs.object_centroid)
    turn = MotionCommand(0.0, c.k_orient * err)

    if mode is TransportMode.ORIENT:
        if abs(err) <= c.theta_tol:
            return StepOutput(TransportState(TransportMode.MOVE), turn, Led.OFF)
        return StepOutput(s, turn, Led.OFF)

    if mode is TransportMode.MOVE:
        if active_count(obs.proximity, params.detect_threshold) > 0:
            cmd, _ = _follow_or_lost(obs.proximity, params)
            return StepOutput(TransportState(TransportMode.WALL_FOLLOW), cmd, Led.OFF)
        if abs(err) > math.pi / 4:
            return StepOutput(TransportState(TransportMode.ORIENT), turn, Led.OFF)
        return StepOutput(s, MotionCommand(c.v_approach * math.cos(err), c.k_orient * err), Led.OFF)

    if mode is TransportMode.WALL_FOLLOW:
        if not obs.goal_light.visible:
            return StepOutput(TransportState(TransportMode.ALIGN_PUSH), turn, Led.OFF)
        cmd, lost = _follow_or_lost(obs.proximity, params)
        if lost:
            if s.lost + 1 >= c.lost_ticks:
                return StepOutput(TransportState(TransportMode.ORIENT), turn, Led.OFF)
            return StepOutput(replace(s, lost=s.lost + 1), cmd, Led.OFF)
        return StepOutput(TransportState(TransportMode.WALL_FOLLOW), cmd, Led.OFF)

    if mode is TransportMode.ALIGN_PUSH:
        if abs(err) <= c.theta_tol:
            return StepOutput(TransportState(TransportMode.PUSH), MotionCommand(c.v_push, c.k_orient * err),
                              Led.RED, Role.PUSHING)
        return StepOutput(s, turn, Led.OFF)

    # Push
    if c.push_reeval and obs.goal_light.visible:
        cmd, _ = _follow_or_lost(obs.proximity, params)
        return StepOutput(TransportState(TransportMode.WALL_FOLLOW), cmd, Led.OFF, Role.FREE)
    return StepOutput(s, MotionCommand(c.v_push, c.k_orient * err), Led.RED)
