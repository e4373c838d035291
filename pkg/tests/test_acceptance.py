"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL|WARN`` line (visible
with ``pytest -s`` or in ``-v`` output) before asserting.
"""

import json
import math
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from occlusion_swarm.behaviors import FillMode, FillState, Led, Role
from occlusion_swarm.config import apply_overrides, load_config
from occlusion_swarm.dynamics import MotionCommand, integrate_unicycle, sense, step
from occlusion_swarm.geometry import (
    Disc, Footprint, GeometryError, Pose2, Vec2, concavity_deficiency, convex_hull, disc_polygon,
    footprint_area,
)
from occlusion_swarm.harness import occluded_arc, run_batch, run_trial, soft_check_nonincreasing
from occlusion_swarm.logs import comparable_metadata, write_trial_logs
from occlusion_swarm.scenarios import build_world
from occlusion_swarm.sensing import active_count, observe_light, readings_from_row

from tests.helpers import circumnavigate
from tests.oracles import gift_wrap, hull_of_shapes, segment_sampled_occluded, stratified_area

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
SEEDS = list(range(20))


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail, soft=False):
        tag = "PASS" if ok else ("WARN" if soft else "FAIL")
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:>2} {tag}: {detail}")
    return _report


def _random_footprint(rng):
    parts = []
    for _ in range(int(rng.integers(2, 5))):
        c = rng.uniform(-0.7, 0.7, 2)
        while True:
            try:
                parts.append(convex_hull(rng.uniform(-0.35, 0.35, (int(rng.integers(3, 9)), 2)) + c))
                break
            except GeometryError:
                continue
    discs = tuple(Disc(Vec2(*rng.uniform(-0.7, 0.7, 2)), float(rng.uniform(0.05, 0.15)))
                  for _ in range(int(rng.integers(0, 3))))
    return Footprint(tuple(parts), discs)


def _shapes(f):
    polys = [[(v.x, v.y) for v in p.vertices] for p in f.world_parts]
    discs = [((d.center.x, d.center.y), d.radius) for d in f.world_discs]
    return polys, discs


# 1 ---------------------------------------------------------------------------------

def test_criterion_1_geometry_oracles(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_area = worst_def = 0.0
    for i in range(100):
        f = _random_footprint(rng)
        polys, discs = _shapes(f)
        area, hull = stratified_area(polys, discs, hull=hull_of_shapes(polys, discs, disc_samples=256),
                                     cells=500, seed=i)
        worst_area = max(worst_area, abs(footprint_area(f) - area) / area)
        worst_def = max(worst_def, abs(concavity_deficiency(f) - (hull - area)) / (hull - area))
    hull_mismatch = 0
    for _ in range(100):
        pts = [tuple(p) for p in rng.uniform(-1, 1, size=(int(rng.integers(3, 40)), 2))]
        hull_mismatch += {(v.x, v.y) for v in convex_hull(pts).vertices} != gift_wrap(pts)
    elapsed = time.perf_counter() - t0
    ok = worst_area <= 0.01 and worst_def <= 0.01 and hull_mismatch == 0 and elapsed < 30
    report(1, ok, f"area err {worst_area:.4%}, deficiency err {worst_def:.4%}, "
                  f"hull mismatches {hull_mismatch}/100, {elapsed:.1f}s")
    assert ok


# 2 ---------------------------------------------------------------------------------

def test_criterion_2_occlusion_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    disagree = 0
    n = 0
    while n < 1000:
        f = _random_footprint(rng).with_pose(Pose2(*rng.uniform(-0.5, 0.5, 2), rng.uniform(-math.pi, math.pi)))
        robot = rng.uniform(-2, 2, 2)
        light = rng.uniform(-2, 2, 2)
        if f.contains(robot, 0.0) or f.contains(light, 0.0):
            continue
        n += 1
        polys, discs = _shapes(f)
        # the implementation uses exact discs for occlusion, so the oracle does too
        visible = observe_light(Pose2(robot[0], robot[1], rng.uniform(-math.pi, math.pi)), light, f).visible
        disagree += visible == segment_sampled_occluded(robot, light, polys, discs)
    elapsed = time.perf_counter() - t0
    ok = disagree == 0 and elapsed < 10
    report(2, ok, f"{1000 - disagree}/1000 agree, {elapsed:.1f}s")
    assert ok


# 3 ---------------------------------------------------------------------------------

def test_criterion_3_kinematics_closure(report):
    worst = 0.0
    for v, w, n in [(0.1, 1.0, 100), (0.05, math.pi, 40), (0.08, 0.3, 419), (0.1, 2.2, 7)]:
        p0 = Pose2(0.3, -0.4, 0.9)
        p = p0
        dt = 2 * math.pi / w / n
        for _ in range(n):
            p = integrate_unicycle(p, MotionCommand(v, w), dt)
        worst = max(worst, math.hypot(p.x - p0.x, p.y - p0.y))
    fixed = integrate_unicycle(Pose2(0.3, -0.4, 0.9), MotionCommand(0.0, 0.0), 0.05) == Pose2(0.3, -0.4, 0.9)
    ok = worst < 1e-9 and fixed
    report(3, ok, f"worst closure error {worst:.2e} m, zero command fixed point {fixed}")
    assert ok


# 4 ---------------------------------------------------------------------------------

def test_criterion_4_determinism(report, tmp_path):
    same = True
    for name, overrides in [("rect_transport.yaml", {"seed": 42}), ("u_fill.yaml", {"seed": 7, "max_steps": 3000})]:
        cfg = load_config(SCENARIOS / name, overrides)
        a = write_trial_logs(run_trial(cfg), cfg, tmp_path / "a" / name)
        b = write_trial_logs(run_trial(cfg), cfg, tmp_path / "b" / name)
        for f in ("series.csv", "robots.csv"):
            same &= (a / f).read_bytes() == (b / f).read_bytes()
        ma, mb = (json.loads((d / "meta.json").read_text()) for d in (a, b))
        same &= comparable_metadata(ma) == comparable_metadata(mb)
    report(4, same, "two runs per scenario give byte-identical tables and metadata (timestamp excluded)")
    assert same


# 5 ---------------------------------------------------------------------------------

def _scripted_fill_world(pose):
    cfg = apply_overrides(load_config(SCENARIOS / "u_fill.yaml"), {"robot_count": 1})
    w = build_world(cfg)
    r = w.robots[0]
    r.pose = pose
    r.state = FillState(FillMode.WALL_FOLLOW)
    r.led = Led.RED
    return w, r


def _count_then_step(w, r):
    k = active_count(readings_from_row(sense(w, [0])[0]), w.config.sensors.detect_threshold)
    step(w)
    return k, r.anchor is not None


def test_criterion_5_attachment_trigger(report):
    # U cavity inner corner at (-0.3, -0.3); rim 0.02 from both inner faces, heading west along the base
    w, r = _scripted_fill_world(Pose2(-0.3 + 0.07, -0.3 + 0.07, math.pi))
    corner_count, corner_attached = _count_then_step(w, r)
    corner_ok = corner_count >= 4 and corner_attached and r.role is Role.OBJECT and r.led is Led.BLUE
    # beside the flat base face, mid cavity
    w, r = _scripted_fill_world(Pose2(0.0, -0.3 + 0.07, math.pi))
    flat_count, flat_attached = _count_then_step(w, r)
    flat_ok = flat_count <= 3 and not flat_attached and r.role is Role.FREE
    ok = corner_ok and flat_ok
    report(5, ok, f"corner: {corner_count} active, attached={corner_attached}; "
                  f"flat face: {flat_count} active, attached={flat_attached}")
    assert ok


# 6 ---------------------------------------------------------------------------------

def test_criterion_6_wall_following_closure(report):
    steps, dist, swept, gap_min, _ = circumnavigate(1.0, max_steps=10_000)
    ok = steps is not None and steps < 10_000 and dist < 0.1 and swept > 0 and gap_min > 0
    report(6, ok, f"returned after {steps} steps to {dist:.3f} m from start, swept {math.degrees(swept):.0f} deg CCW")
    assert ok


# 7 ---------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def transport_batch():
    cfg = load_config(SCENARIOS / "rect_transport.yaml")
    t0 = time.perf_counter()
    rep = run_batch(cfg, SEEDS)
    return rep, time.perf_counter() - t0


def test_criterion_7_transport(report, transport_batch):
    rep, elapsed = transport_batch
    wins = [t for t in rep.trials if t.outcome == "Success"]
    closer = all(t.final_distance < 0.3 and t.final_distance < t.initial_distance for t in wins)
    ok = rep.success_rate >= 0.8 and closer and elapsed < 120
    report(7, ok, f"success {len(wins)}/{len(rep.trials)} (need >= 80%), successes end closer: {closer}, "
                  f"outcomes {rep.to_dict()['outcomes']}, {elapsed:.1f}s")
    assert ok


# 8 ---------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fill_batch():
    cfg = load_config(SCENARIOS / "u_fill.yaml")
    t0 = time.perf_counter()
    rep = run_batch(cfg, SEEDS, record=True)
    return rep, time.perf_counter() - t0


def test_criterion_8_fill_rate(report, fill_batch):
    rep, elapsed = fill_batch
    done = sum(t.outcome == "FillComplete" for t in rep.trials)
    best = min(t.final_deficiency for t in rep.trials)
    ok = done / len(rep.trials) >= 0.7 and elapsed < 120
    report(8, ok, f"FillComplete {done}/{len(rep.trials)} (need >= 70%); best final deficiency {best:.4f} "
                  f"vs target {0.25 * 0.48:.2f} m2; mean attached "
                  f"{np.mean([t.summary()['attached_count'] for t in rep.trials]):.1f}; {elapsed:.1f}s")
    assert ok


def test_criterion_8_fill_monotone_at_attachments(report, fill_batch):
    rep, _ = fill_batch
    bad = 0
    for t in rep.trials:
        counts = t.column("attached_count")
        bad += any(b < a for a, b in zip(counts, counts[1:]))
        bad += sum(1 for e in t.attach_events if not (e[2] >= e[1] and e[4] <= e[3]))
    events = sum(len(t.attach_events) for t in rep.trials)
    report("8b", bad == 0, f"{events} attachment events, {bad} violations of count/deficiency monotonicity")
    assert bad == 0


# 9 ---------------------------------------------------------------------------------

def test_criterion_9_parameter_directions(report, transport_batch):
    l_cfg = load_config(SCENARIOS / "l_fill.yaml")
    seeds = list(range(8))
    means = [run_batch(apply_overrides(l_cfg, {"robot_count": n}), seeds).final_deficiency_mean for n in (4, 8, 12)]
    centred, _ = transport_batch
    near = run_batch(load_config(SCENARIOS / "rect_transport_near_wall.yaml"), SEEDS)
    mono = soft_check_nonincreasing(means, "L fill final deficiency vs robot_count")
    wall = near.success_rate < centred.success_rate
    if not wall:
        warnings.warn(f"near-wall success {near.success_rate:.2f} not below centred {centred.success_rate:.2f}")
    report(9, mono and wall, f"L deficiency by robots 4/8/12: {', '.join(f'{m:.4f}' for m in means)}; "
                             f"transport success centred {centred.success_rate:.2f} vs near wall "
                             f"{near.success_rate:.2f}", soft=True)


# 10 --------------------------------------------------------------------------------

def test_criterion_10_occluded_arc(report):
    f = Footprint((disc_polygon((0.0, 0.0), 0.5, 64),))
    light = (1000.0, 0.0)
    coarse = occluded_arc(f, light, resolution_deg=1.0)
    fine = occluded_arc(f, light, resolution_deg=0.1)
    tol = math.radians(5)
    ok = abs(coarse.span - math.pi) <= tol and abs(coarse.span - fine.span) <= tol
    report(10, ok, f"span {math.degrees(coarse.span):.1f} deg at 1 deg sampling, "
                   f"{math.degrees(fine.span):.1f} deg at 0.1 deg")
    assert ok
