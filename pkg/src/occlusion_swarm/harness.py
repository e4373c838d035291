"""Trial execution, stop conditions, metrics and seeded batches."""

from __future__ import annotations

import math
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .behaviors import Role
from .config import ScenarioConfig, apply_overrides
from .dynamics import World, object_wall_gap, step
from .geometry import EPS, boundary_points, concavity_deficiency, footprint_area, segments_occluded
from .scenarios import build_world

SUCCESS_OUTCOMES = ("Success", "FillComplete")

SERIES_COLUMNS = ("step", "time_s", "obj_x", "obj_y", "obj_theta", "attached_count",
                  "deficiency_m2", "pushing_count", "occ_arc_start", "occ_arc_end")
ROBOT_COLUMNS = ("step", "robot_id", "x", "y", "theta", "state", "role", "led")


class OccludedArc(NamedTuple):
    start: float
    end: float
    degenerate: bool = False

    @property
    def span(self) -> float:
        return self.end - self.start

    @property
    def middle(self) -> float:
        return 0.5 * (self.start + self.end)


def occluded_arc(world_or_obj, light=None, resolution_deg: float = 1.0) -> Optional[OccludedArc]:
    """Largest contiguous arc of boundary angles (about the centroid) in shadow.

    Each sample is the outermost boundary point along its ray, nudged
    outward so the object does not occlude the point's own surface. A light
    inside the convex hull (or a fully shadowed boundary) gives a degenerate
    full turn.
    """
    if isinstance(world_or_obj, World):
        obj, light = world_or_obj.obj, world_or_obj.light
    else:
        obj = world_or_obj
    if obj.local_hull.contains(obj.pose.inverse_apply(light), 0.0):
        return OccludedArc(-math.pi, math.pi, True)
    c = obj.centroid()
    n = int(round(360.0 / resolution_deg))
    res = 2 * math.pi / n
    angles = -math.pi + res * (np.arange(n) + 0.5)
    pts = boundary_points(obj, c, angles)
    valid = np.isfinite(pts[:, 0])
    nudge = 1e-7
    pts = pts + nudge * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    mask = np.zeros(n, dtype=bool)
    if valid.any():
        mask[valid] = segments_occluded(pts[valid], light, obj)
    if not mask.any():
        return None
    if mask.all():
        return OccludedArc(-math.pi, math.pi, True)
    # rotate so the scan starts on a lit sample, then take the longest run
    first_lit = int(np.argmin(mask))
    order = np.roll(np.arange(n), -first_lit)
    best_len = best_start = run = 0
    run_start = 0
    for k, idx in enumerate(order):
        if mask[idx]:
            if run == 0:
                run_start = k
            run += 1
            if run > best_len:
                best_len, best_start = run, run_start
        else:
            run = 0
    i0 = order[best_start]
    start = angles[i0] - res / 2
    return OccludedArc(float(start), float(start + best_len * res))


@dataclass
class TrialResult:
    outcome: str
    steps_used: int
    seed: int
    series: list = field(default_factory=list)
    robot_rows: list = field(default_factory=list)
    # (step, attached_before, attached_after, deficiency_before, deficiency_after,
    #  area_gain, all_inside_hull)
    attach_events: list = field(default_factory=list)
    push_entries: list = field(default_factory=list)
    initial_deficiency: float = 0.0
    final_deficiency: float = 0.0
    initial_distance: float = 0.0
    final_distance: float = 0.0
    stray_count: int = 0
    final_object_pose: tuple = (0.0, 0.0, 0.0)

    @property
    def success(self) -> bool:
        return self.outcome in SUCCESS_OUTCOMES

    def column(self, name: str) -> list:
        i = SERIES_COLUMNS.index(name)
        return [row[i] for row in self.series]

    def summary(self) -> dict:
        return {
            "seed": self.seed, "outcome": self.outcome, "steps_used": self.steps_used,
            "initial_deficiency": self.initial_deficiency, "final_deficiency": self.final_deficiency,
            "initial_distance": self.initial_distance, "final_distance": self.final_distance,
            "attached_count": self.series[-1][5] if self.series else 0,
            "stray_count": self.stray_count,
        }


def _light_distance(world: World) -> float:
    c = world.obj.centroid()
    return math.hypot(c.x - world.light.x, c.y - world.light.y)


def adjudicate(world: World, initial_deficiency: float) -> Optional[str]:
    """Stop conditions, checked before every tick."""
    cfg = world.config
    if cfg.experiment == "Transport":
        if world.wall_contact or object_wall_gap(world.obj, world.bounds) <= EPS:
            return "WallContact"
        if _light_distance(world) <= cfg.goal_radius:
            return "Success"
        if world.step_index >= cfg.max_steps:
            return "Timeout"
        return None
    if concavity_deficiency(world.obj) <= cfg.fill_epsilon * initial_deficiency:
        return "FillComplete"
    if world.step_index >= cfg.max_steps:
        return "FillTimeout"
    # nobody left to move: the footprint can no longer change
    if all(r.role is Role.OBJECT for r in world.robots):
        return "FillTimeout"
    return None


def _record(world: World, series: list, robot_rows: list) -> None:
    cfg = world.config
    c = world.obj.centroid()
    arc = occluded_arc(world) if cfg.experiment == "Transport" else None
    series.append((
        world.step_index, round(world.time, 10), c.x, c.y, world.obj.pose.heading,
        world.attached_count(), concavity_deficiency(world.obj), world.pushing_count(),
        arc.start if arc else None, arc.end if arc else None,
    ))
    for r in world.robots:
        robot_rows.append((world.step_index, r.id, r.pose.x, r.pose.y, r.pose.heading,
                           getattr(r.state, "name", ""), r.role.value, r.led.value))


def _hull_contains_discs(obj, before_count: int) -> bool:
    from .geometry import convex_hull, disc_polygon
    base = list(obj.parts) + [disc_polygon(d.center, d.radius) for d in obj.discs[:before_count]]
    hull = convex_hull(v for p in base for v in p.vertices)
    new = obj.discs[before_count:]
    return all(hull.contains(v, 1e-9) for d in new for v in disc_polygon(d.center, d.radius).vertices)


def run_trial(cfg: ScenarioConfig, record: bool = True, world: Optional[World] = None) -> TrialResult:
    """Step a world until a stop condition fires; record decimated series."""
    world = world if world is not None else build_world(cfg)
    cfg = world.config
    init_def = concavity_deficiency(world.obj)
    init_dist = _light_distance(world)
    series: list = []
    robot_rows: list = []
    events: list = []
    last_recorded = -1
    while True:
        outcome = adjudicate(world, init_def)
        if record and (world.step_index % cfg.decimation == 0 or outcome is not None):
            if world.step_index != last_recorded:
                _record(world, series, robot_rows)
                last_recorded = world.step_index
        if outcome is not None:
            break
        before_n, before_obj = len(world.obj.discs), world.obj
        step(world)
        if len(world.obj.discs) != before_n:
            events.append((
                world.step_index, before_n, len(world.obj.discs),
                concavity_deficiency(before_obj), concavity_deficiency(world.obj),
                footprint_area(world.obj) - footprint_area(before_obj),
                _hull_contains_discs(world.obj, before_n),
            ))
    return TrialResult(
        outcome=outcome, steps_used=world.step_index, seed=cfg.seed, series=series,
        robot_rows=robot_rows, attach_events=events, push_entries=list(world.push_entries),
        initial_deficiency=init_def, final_deficiency=concavity_deficiency(world.obj),
        initial_distance=init_dist, final_distance=_light_distance(world),
        stray_count=sum(1 for r in world.robots if r.role is Role.OBJECT and r.anchor is None),
        final_object_pose=tuple(world.obj.pose),
    )


# ---------------------------------------------------------------------------
# batches
# ---------------------------------------------------------------------------

@dataclass
class BatchReport:
    config_name: str
    trials: list

    @property
    def success_rate(self) -> float:
        return sum(t.success for t in self.trials) / len(self.trials)

    @property
    def steps_mean(self) -> float:
        return statistics.fmean(t.steps_used for t in self.trials)

    @property
    def steps_std(self) -> float:
        return statistics.pstdev(t.steps_used for t in self.trials)

    @property
    def final_deficiency_mean(self) -> float:
        return statistics.fmean(t.final_deficiency for t in self.trials)

    def to_dict(self) -> dict:
        return {
            "config": self.config_name,
            "seeds": [t.seed for t in self.trials],
            "success_rate": self.success_rate,
            "steps_mean": self.steps_mean,
            "steps_std": self.steps_std,
            "final_deficiency_mean": self.final_deficiency_mean,
            "outcomes": {o: sum(t.outcome == o for t in self.trials)
                         for o in sorted({t.outcome for t in self.trials})},
            "trials": [t.summary() for t in self.trials],
        }


def _run_seed(args) -> TrialResult:
    cfg, seed, record = args
    return run_trial(apply_overrides(cfg, {"seed": seed}), record=record)


def run_batch(cfg: ScenarioConfig, seeds: Sequence[int], jobs: int = 1, record: bool = False) -> BatchReport:
    """Independent trials per seed; results ordered by seed."""
    if not seeds:
        raise ValueError("run_batch needs at least one seed")
    work = [(cfg, int(s), record) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            trials = list(pool.map(_run_seed, work))
    else:
        trials = [_run_seed(w) for w in work]
    order = sorted(range(len(trials)), key=lambda i: (trials[i].seed, i))
    return BatchReport(cfg.name, [trials[i] for i in order])


def run_sweep(cfg: ScenarioConfig, key: str, values: Iterable, seeds: Sequence[int],
              jobs: int = 1) -> list[tuple[object, BatchReport]]:
    """One batch per value of a dotted config key."""
    return [(v, run_batch(apply_overrides(cfg, {key: v}), seeds, jobs)) for v in values]


def soft_check_nonincreasing(values: Sequence[float], label: str, tol: float = 1e-12) -> bool:
    """Warn (never raise) when a sequence that should not grow does grow."""
    ok = all(b <= a + tol for a, b in zip(values, values[1:]))
    if not ok:
        warnings.warn(f"{label}: expected non-increasing, got {list(values)}", stacklevel=2)
    return ok
