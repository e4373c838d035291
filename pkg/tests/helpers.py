"""Scripted single-robot worlds shared by the behaviour and acceptance tests."""

from __future__ import annotations

import math

from occlusion_swarm.behaviors import BehaviorParams, left_hand_wall_command
from occlusion_swarm.config import ScenarioConfig
from occlusion_swarm.dynamics import integrate_unicycle
from occlusion_swarm.geometry import ConvexPolygon, Footprint, Pose2, footprint_separation
from occlusion_swarm.sensing import ProximityRing, proximity_scan


def circumnavigate(side: float = 1.0, max_steps: int = 10_000, cfg: ScenarioConfig | None = None):
    """Wall-follow a free-standing square from the middle of its south face.

    Returns (steps, final distance to start, swept angle about the centre,
    min and max rim gap to the square once following).
    """
    cfg = cfg or ScenarioConfig()
    params = BehaviorParams.from_config(cfg)
    ring = ProximityRing(cfg.sensors.sensor_count, cfg.sensors.max_range)
    h = side / 2
    sq = Footprint((ConvexPolygon.rectangle(-h, -h, h, h),))
    r = params.radius
    # heading east along the south face keeps the square on the left (CCW)
    start = Pose2(0.0, -h - r - cfg.controller.standoff, 0.0)
    p = start
    swept = 0.0
    prev = math.atan2(p.y, p.x)
    left_start = False
    gaps = []
    dmax = cfg.dynamics.v_max
    for k in range(1, max_steps + 1):
        prox = proximity_scan(p, ring, [sq], r)
        cmd = left_hand_wall_command(prox, params).clamped(dmax, cfg.dynamics.omega_max)
        p = integrate_unicycle(p, cmd, cfg.dt)
        a = math.atan2(p.y, p.x)
        da = (a - prev + math.pi) % (2 * math.pi) - math.pi
        swept += da
        prev = a
        gaps.append(footprint_separation((p.x, p.y), sq)[0] - r)
        dist = math.hypot(p.x - start.x, p.y - start.y)
        if dist > 4 * r:
            left_start = True
        if left_start and swept > math.pi and dist < 2 * r:
            return k, dist, swept, min(gaps), max(gaps)
    return None, math.hypot(p.x - start.x, p.y - start.y), swept, min(gaps), max(gaps)

