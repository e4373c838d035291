"""Robot-local perception: proximity ring, light sensor, angular extent."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geometry import (
    Disc, Footprint, Obstacle, Pose2, Segment, Vec2, normalize_angle, ray_cast,
    segment_occluded,
)


@dataclass(frozen=True)
class ProximityRing:
    sensor_count: int = 8
    max_range: float = 0.12

    def __post_init__(self):
        if self.sensor_count < 3:
            raise ValueError("sensor_count must be >= 3")
        if not self.max_range > 0:
            raise ValueError("max_range must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.sensor_count

    @property
    def mount_angles(self) -> tuple[float, ...]:
        """Sensor bearings relative to heading; sensor 0 faces forward, CCW order."""
        return tuple(i * self.spacing for i in range(self.sensor_count))


class ProximityReadings(NamedTuple):
    distances: tuple[Optional[float], ...]


class LightObservation(NamedTuple):
    visible: bool
    bearing: Optional[float] = None


def proximity_scan(pose: Pose2, ring: ProximityRing, obstacles: Sequence[Obstacle],
                   robot_radius: float = 0.05) -> ProximityReadings:
    """Cast one ray per sensor from the robot rim.

    ``obstacles`` must already exclude the robot's own body. Hits are not
    labelled: walls, neighbours and the object read the same.
    """
    out = []
    for a in ring.mount_angles:
        th = pose.heading + a
        d = (math.cos(th), math.sin(th))
        rim = (pose.x + robot_radius * d[0], pose.y + robot_radius * d[1])
        out.append(ray_cast(rim, d, obstacles, ring.max_range))
    return ProximityReadings(tuple(out))


def scan_all(poses: np.ndarray, radii: np.ndarray, ring: ProximityRing,
             segments: np.ndarray, discs: np.ndarray, disc_owner: np.ndarray,
             polygons: Sequence[np.ndarray] = ()) -> np.ndarray:
    """Vectorised proximity scan for many robots at once.

    poses: (N, 3) x, y, heading. segments: (S, 4) x0, y0, x1, y1.
    discs: (K, 3) cx, cy, r with ``disc_owner[k]`` the robot index owning the
    disc (-1 for none) so a robot never senses itself. polygons: list of
    (V, 4) CCW edge arrays x0, y0, x1, y1, used to report 0 for rays starting
    inside a part.
    Returns an (N, n) array of distances with ``inf`` for no detection.
    """
    n = ring.sensor_count
    N = len(poses)
    if N == 0:
        return np.zeros((0, n))
    mounts = np.asarray(ring.mount_angles)
    th = poses[:, 2:3] + mounts[None, :]
    dx, dy = np.cos(th), np.sin(th)
    ox = poses[:, 0:1] + radii[:, None] * dx
    oy = poses[:, 1:2] + radii[:, None] * dy
    best = np.full((N, n), np.inf)
    ox_, oy_, dx_, dy_ = (a[:, :, None] for a in (ox, oy, dx, dy))

    if len(segments):
        ax, ay = segments[:, 0], segments[:, 1]
        ex, ey = segments[:, 2] - ax, segments[:, 3] - ay
        den = dx_ * ey - dy_ * ex
        wx, wy = ax - ox_, ay - oy_
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (wx * ey - wy * ex) / den
            s = (wx * dy_ - wy * dx_) / den
        ok = (np.abs(den) >= 1e-15) & (t >= -1e-9) & (s >= -1e-9) & (s <= 1 + 1e-9)
        t = np.where(ok, np.maximum(t, 0.0), np.inf)
        best = np.minimum(best, t.min(axis=2))

    if len(discs):
        wx = ox_ - discs[:, 0]
        wy = oy_ - discs[:, 1]
        cc = wx * wx + wy * wy - discs[:, 2] ** 2
        bb = wx * dx_ + wy * dy_
        disc = bb * bb - cc
        with np.errstate(invalid="ignore"):
            t = -bb - np.sqrt(np.maximum(disc, 0.0))
        t = np.where((disc >= 0) & (bb <= 0), t, np.inf)
        t = np.where(cc <= 0, 0.0, t)
        own = disc_owner[None, :] == np.arange(N)[:, None]
        t = np.where(own[:, None, :], np.inf, t)
        best = np.minimum(best, t.min(axis=2))

    for poly in polygons:
        ax, ay = poly[:, 0], poly[:, 1]
        bx, by = poly[:, 2], poly[:, 3]
        c = (bx - ax) * (oy_ - ay) - (by - ay) * (ox_ - ax)
        inside = (c > 0).all(axis=2)
        best = np.where(inside, 0.0, best)

    return np.where(best <= ring.max_range, best, np.inf)


def readings_from_row(row: np.ndarray) -> ProximityReadings:
    return ProximityReadings(tuple(None if not math.isfinite(d) else float(d) for d in row))


def active_mask(r: ProximityReadings, detect_threshold: float) -> list[bool]:
    return [d is not None and d <= detect_threshold for d in r.distances]


def active_count(r: ProximityReadings, detect_threshold: float) -> int:
    return sum(active_mask(r, detect_threshold))


def longest_circular_run(mask: Sequence[bool]) -> int:
    n = len(mask)
    if all(mask):
        return n
    best = run = 0
    for k in range(2 * n):
        if mask[k % n]:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return min(best, n)


def angular_extent(r: ProximityReadings, ring: ProximityRing,
                   detect_threshold: Optional[float] = None) -> float:
    """Span of the largest contiguous arc of active sensors (radians).

    With every sensor active the span is a full turn.
    """
    thr = ring.max_range if detect_threshold is None else detect_threshold
    mask = active_mask(r, thr)
    k = longest_circular_run(mask)
    if k == 0:
        return 0.0
    if k == ring.sensor_count:
        return 2.0 * math.pi
    return (k - 1) * ring.spacing


def observe_light(pose: Pose2, light: Sequence[float], pseudo_object: Footprint) -> LightObservation:
    """Only the (pseudo-)object occludes; walls and robots sit below the light."""
    if segment_occluded((pose.x, pose.y), light, pseudo_object):
        return LightObservation(False, None)
    bearing = normalize_angle(math.atan2(light[1] - pose.y, light[0] - pose.x) - pose.heading)
    return LightObservation(True, bearing)


def arena_walls(xmin: float, xmax: float, ymin: float, ymax: float) -> tuple[Segment, ...]:
    c = [Vec2(xmin, ymin), Vec2(xmax, ymin), Vec2(xmax, ymax), Vec2(xmin, ymax)]
    return tuple(Segment(c[i], c[(i + 1) % 4]) for i in range(4))


def obstacles_for(robot_index: int, obj: Footprint, robot_discs: Sequence[Disc],
                  walls: Sequence[Segment]) -> list[Obstacle]:
    """Scalar-path obstacle list seen by one robot (its own disc removed)."""
    obs: list[Obstacle] = [obj]
    obs += [d for i, d in enumerate(robot_discs) if i != robot_index]
    obs += list(walls)
    return obs
