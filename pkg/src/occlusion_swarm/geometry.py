"""Planar geometry: convex parts, footprints, hulls, union areas, ray casting
and segment occlusion.

All predicates use the absolute tolerance ``EPS`` (metres).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence, Union

EPS = 1e-9
DISC_SEGMENTS = 32


class GeometryError(ValueError):
    """Raised for degenerate or invalid geometric input."""


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, o):  # type: ignore[override]
        return Vec2(self.x + o[0], self.y + o[1])

    def __sub__(self, o):
        return Vec2(self.x - o[0], self.y - o[1])

    def scale(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


class Pose2(NamedTuple):
    """Planar pose; heading in (-pi, pi]."""

    x: float
    y: float
    heading: float = 0.0

    @property
    def position(self) -> Vec2:
        return Vec2(self.x, self.y)

    def apply(self, p: Sequence[float]) -> Vec2:
        """Map a point from this pose's local frame to the world frame."""
        c, s = math.cos(self.heading), math.sin(self.heading)
        return Vec2(self.x + c * p[0] - s * p[1], self.y + s * p[0] + c * p[1])

    def inverse_apply(self, p: Sequence[float]) -> Vec2:
        c, s = math.cos(self.heading), math.sin(self.heading)
        dx, dy = p[0] - self.x, p[1] - self.y
        return Vec2(c * dx + s * dy, -s * dx + c * dy)


class Disc(NamedTuple):
    center: Vec2
    radius: float


class Segment(NamedTuple):
    a: Vec2
    b: Vec2


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise GeometryError(f"non-finite coordinate {v!r}")


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices."""

    vertices: tuple[Vec2, ...]

    def __post_init__(self):
        vs = tuple(Vec2(float(v[0]), float(v[1])) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        if n < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        for v in vs:
            check_finite(*v)
        for i in range(n):
            a, b, c = vs[i], vs[(i + 1) % n], vs[(i + 2) % n]
            if cross(b.x - a.x, b.y - a.y, c.x - b.x, c.y - b.y) <= 0.0:
                raise GeometryError("polygon is not strictly convex and CCW")

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "ConvexPolygon":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    def edges(self) -> Iterable[tuple[Vec2, Vec2]]:
        vs = self.vertices
        for i in range(len(vs)):
            yield vs[i], vs[(i + 1) % len(vs)]

    def area(self) -> float:
        return polygon_signed_area(self.vertices)

    def transformed(self, pose: Pose2) -> "ConvexPolygon":
        return ConvexPolygon(tuple(pose.apply(v) for v in self.vertices))

    def contains(self, p: Sequence[float], tol: float = EPS) -> bool:
        """Closed containment, with ``tol`` slack outward."""
        px, py = p[0], p[1]
        for a, b in self.edges():
            ex, ey = b.x - a.x, b.y - a.y
            if cross(ex, ey, px - a.x, py - a.y) < -tol * math.hypot(ex, ey):
                return False
        return True


def polygon_signed_area(vs: Sequence[Sequence[float]]) -> float:
    s = 0.0
    n = len(vs)
    for i in range(n):
        x0, y0 = vs[i]
        x1, y1 = vs[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def disc_polygon(center: Sequence[float], radius: float, n: int = DISC_SEGMENTS) -> ConvexPolygon:
    """Inscribed regular n-gon standing in for a disc in hull/area work."""
    cx, cy = center
    return ConvexPolygon(tuple(
        (cx + radius * math.cos(2 * math.pi * k / n), cy + radius * math.sin(2 * math.pi * k / n))
        for k in range(n)
    ))


@dataclass(frozen=True)
class Footprint:
    """Union of convex parts and attached discs, placed rigidly by ``pose``.

    ``parts`` and ``discs`` are expressed in the footprint's local frame.
    """

    parts: tuple[ConvexPolygon, ...]
    discs: tuple[Disc, ...] = ()
    pose: Pose2 = Pose2(0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "discs", tuple(Disc(Vec2(*d[0]), float(d[1])) for d in self.discs))
        if not self.parts:
            raise GeometryError("footprint needs at least one convex part")
        for d in self.discs:
            if not d.radius > 0:
                raise GeometryError("disc radius must be positive")
        check_finite(*self.pose)

    def with_pose(self, pose: Pose2) -> "Footprint":
        f = Footprint(self.parts, self.discs, pose)
        # shape-only caches survive a rigid motion
        for key in ("local_polygons", "local_hull", "_union_moments", "_hull_area", "bounding_radius_local"):
            if key in self.__dict__:
                f.__dict__[key] = self.__dict__[key]
        return f

    def with_world_disc(self, center: Sequence[float], radius: float) -> "Footprint":
        """Attach a disc given in world coordinates."""
        local = self.pose.inverse_apply(center)
        return Footprint(self.parts, self.discs + (Disc(local, radius),), self.pose)

    @cached_property
    def world_parts(self) -> tuple[ConvexPolygon, ...]:
        if self.pose == (0.0, 0.0, 0.0):
            return self.parts
        return tuple(p.transformed(self.pose) for p in self.parts)

    @cached_property
    def world_discs(self) -> tuple[Disc, ...]:
        return tuple(Disc(self.pose.apply(d.center), d.radius) for d in self.discs)

    @cached_property
    def local_polygons(self) -> tuple[ConvexPolygon, ...]:
        """Local-frame parts followed by the polygonised discs."""
        return self.parts + tuple(disc_polygon(d.center, d.radius) for d in self.discs)

    @cached_property
    def area_polygons(self) -> tuple[ConvexPolygon, ...]:
        if self.pose == (0.0, 0.0, 0.0):
            return self.local_polygons
        return tuple(p.transformed(self.pose) for p in self.local_polygons)

    @cached_property
    def bounding_radius_local(self) -> float:
        r = 0.0
        for poly in self.parts:
            for v in poly.vertices:
                r = max(r, math.hypot(v.x, v.y))
        for d in self.discs:
            r = max(r, math.hypot(d.center.x, d.center.y) + d.radius)
        return r

    @cached_property
    def edge_tables(self) -> tuple[tuple[tuple[float, ...], ...], ...]:
        """Per world part: (ax, ay, ex, ey, |e|^2, |e|) for every edge."""
        out = []
        for poly in self.world_parts:
            rows = []
            for a, b in poly.edges():
                ex, ey = b.x - a.x, b.y - a.y
                L2 = ex * ex + ey * ey
                rows.append((a.x, a.y, ex, ey, L2, math.sqrt(L2)))
            out.append(tuple(rows))
        return tuple(out)

    def hull_points(self) -> list[Vec2]:
        return [v for poly in self.area_polygons for v in poly.vertices]

    def contains(self, p: Sequence[float], tol: float = EPS) -> bool:
        if any(part.contains(p, tol) for part in self.world_parts):
            return True
        return any(math.hypot(p[0] - d.center.x, p[1] - d.center.y) <= d.radius + tol
                   for d in self.world_discs)

    def bounding_radius(self, about: Sequence[float]) -> float:
        r = 0.0
        for poly in self.world_parts:
            for v in poly.vertices:
                r = max(r, math.hypot(v.x - about[0], v.y - about[1]))
        for d in self.world_discs:
            r = max(r, math.hypot(d.center.x - about[0], d.center.y - about[1]) + d.radius)
        return r

    def extent(self) -> tuple[float, float, float, float]:
        """World axis-aligned bounds (xmin, xmax, ymin, ymax), discs exact."""
        xs, ys = [], []
        for poly in self.world_parts:
            for v in poly.vertices:
                xs.append(v.x)
                ys.append(v.y)
        for d in self.world_discs:
            xs += [d.center.x - d.radius, d.center.x + d.radius]
            ys += [d.center.y - d.radius, d.center.y + d.radius]
        return min(xs), max(xs), min(ys), max(ys)

    @cached_property
    def _union_moments(self) -> tuple[float, float, float]:
        return _union_moments(self.local_polygons)

    @cached_property
    def local_hull(self) -> ConvexPolygon:
        return convex_hull(v for poly in self.local_polygons for v in poly.vertices)

    @cached_property
    def _hull_area(self) -> float:
        return self.local_hull.area()

    def hull_contains_disc(self, center: Sequence[float], radius: float, tol: float = EPS) -> bool:
        """True if the (polygonised) disc lies inside the current convex hull."""
        local = self.pose.inverse_apply(center)
        return all(self.local_hull.contains(v, tol) for v in disc_polygon(local, radius).vertices)

    def centroid(self) -> Vec2:
        """Area centroid of the union, world frame."""
        a, mx, my = self._union_moments
        return self.pose.apply((mx / a, my / a))


Obstacle = Union[Footprint, Segment, Disc]


# ---------------------------------------------------------------------------
# hulls and areas
# ---------------------------------------------------------------------------

def _drop_flat_vertices(hull: list) -> list:
    """Remove vertices within EPS of the chord between their neighbours."""
    changed = True
    while changed and len(hull) > 3:
        changed = False
        for i in range(len(hull)):
            o, a, p = hull[i - 1], hull[i], hull[(i + 1) % len(hull)]
            cx, cy = p[0] - o[0], p[1] - o[1]
            chord = math.hypot(cx, cy)
            if chord <= EPS:
                continue
            t = ((a[0] - o[0]) * cx + (a[1] - o[1]) * cy) / (chord * chord)
            if 0.0 <= t <= 1.0 and abs(cross(cx, cy, a[0] - o[0], a[1] - o[1])) <= EPS * chord:
                del hull[i]
                changed = True
                break
    return hull


def convex_hull(points: Iterable[Sequence[float]]) -> ConvexPolygon:
    """Monotone-chain hull; collinear boundary points are dropped."""
    pts = sorted(set((float(p[0]), float(p[1])) for p in points))
    if len(pts) < 3:
        raise GeometryError("need at least 3 distinct points")

    def half(seq):
        out: list[tuple[float, float]] = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if cross(a[0] - o[0], a[1] - o[1], p[0] - o[0], p[1] - o[1]) <= 0.0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = _drop_flat_vertices(lower[:-1] + upper[:-1])
    if len(hull) < 3 or abs(polygon_signed_area(hull)) <= EPS * EPS:
        raise GeometryError("points are collinear")
    return ConvexPolygon(tuple(hull))


def _covered_interval(a, b, poly: ConvexPolygon, same_dir_covers: bool):
    """Parameter interval of edge a->b lying inside the closed convex ``poly``.

    Coincident edges: same direction counts as covered only when
    ``same_dir_covers``; opposite direction never counts (the two contributions
    cancel in the boundary integral).
    """
    dx, dy = b[0] - a[0], b[1] - a[1]
    t0, t1 = 0.0, 1.0
    for u, v in poly.edges():
        ex, ey = v.x - u.x, v.y - u.y
        elen = math.hypot(ex, ey)
        f0 = cross(ex, ey, a[0] - u.x, a[1] - u.y) / elen
        fb = cross(ex, ey, b[0] - u.x, b[1] - u.y) / elen
        if abs(f0) <= EPS and abs(fb) <= EPS:
            if ex * dx + ey * dy > 0 and same_dir_covers:
                continue
            return None
        f1 = fb - f0
        if abs(f1) <= 1e-15:
            if f0 < 0:
                return None
            continue
        t = -f0 / f1
        if f1 > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 >= t1:
            return None
    return (t0, t1)


def _union_moments(polys: Sequence[ConvexPolygon]) -> tuple[float, float, float]:
    """Area and first moments of a union of CCW convex polygons.

    Green's theorem over the union boundary: each edge contributes only the
    sub-segments not covered by any other polygon.
    """
    area = mx = my = 0.0
    boxes = []
    for p in polys:
        xs = [v.x for v in p.vertices]
        ys = [v.y for v in p.vertices]
        boxes.append((min(xs), max(xs), min(ys), max(ys)))
    for i, poly in enumerate(polys):
        for a, b in poly.edges():
            exmin, exmax = min(a.x, b.x), max(a.x, b.x)
            eymin, eymax = min(a.y, b.y), max(a.y, b.y)
            intervals = []
            for j, other in enumerate(polys):
                if j == i:
                    continue
                bx = boxes[j]
                if exmax < bx[0] - EPS or exmin > bx[1] + EPS or eymax < bx[2] - EPS or eymin > bx[3] + EPS:
                    continue
                iv = _covered_interval(a, b, other, same_dir_covers=j < i)
                if iv is not None:
                    intervals.append(iv)
            intervals.sort()
            free = []
            cur = 0.0
            for s, e in intervals:
                if s > cur:
                    free.append((cur, s))
                cur = max(cur, e)
            if cur < 1.0:
                free.append((cur, 1.0))
            dx, dy = b.x - a.x, b.y - a.y
            for s, e in free:
                px, py = a.x + s * dx, a.y + s * dy
                qx, qy = a.x + e * dx, a.y + e * dy
                c = px * qy - qx * py
                area += 0.5 * c
                mx += (px + qx) * c / 6.0
                my += (py + qy) * c / 6.0
    return area, mx, my


def union_area(polys: Sequence[ConvexPolygon]) -> float:
    return _union_moments(polys)[0]


def footprint_area(f: Footprint) -> float:
    """Area of the union of parts and (polygonised) discs."""
    return f._union_moments[0]


def concavity_deficiency(f: Footprint) -> float:
    """Hull area minus footprint area, clamped at zero."""
    return max(0.0, f._hull_area - footprint_area(f))


# ---------------------------------------------------------------------------
# ray casting and occlusion
# ---------------------------------------------------------------------------

def ray_segment(ox, oy, dx, dy, a, b) -> Optional[float]:
    ex, ey = b[0] - a[0], b[1] - a[1]
    den = cross(dx, dy, ex, ey)
    if abs(den) < 1e-15:
        return None
    wx, wy = a[0] - ox, a[1] - oy
    t = cross(wx, wy, ex, ey) / den
    s = cross(wx, wy, dx, dy) / den
    if t >= -EPS and -EPS <= s <= 1.0 + EPS:
        return max(t, 0.0)
    return None


def ray_disc(ox, oy, dx, dy, c, r) -> Optional[float]:
    wx, wy = ox - c[0], oy - c[1]
    cc = wx * wx + wy * wy - r * r
    if cc <= 0.0:
        return 0.0
    bb = wx * dx + wy * dy
    disc = bb * bb - cc
    if disc < 0.0 or bb > 0.0:
        return None
    return -bb - math.sqrt(disc)


def ray_polygon(ox, oy, dx, dy, poly: ConvexPolygon) -> Optional[float]:
    if poly.contains((ox, oy), 0.0):
        return 0.0
    best = None
    for a, b in poly.edges():
        t = ray_segment(ox, oy, dx, dy, a, b)
        if t is not None and (best is None or t < best):
            best = t
    return best


def ray_cast(origin: Sequence[float], direction: Sequence[float],
             obstacles: Iterable[Obstacle], max_range: float) -> Optional[float]:
    """Distance to the nearest obstacle along a unit ray, or None past ``max_range``."""
    ox, oy = origin
    dx, dy = direction
    best = math.inf
    for ob in obstacles:
        if isinstance(ob, Footprint):
            hits = [ray_polygon(ox, oy, dx, dy, p) for p in ob.world_parts]
            hits += [ray_disc(ox, oy, dx, dy, d.center, d.radius) for d in ob.world_discs]
        elif isinstance(ob, Disc):
            hits = [ray_disc(ox, oy, dx, dy, ob.center, ob.radius)]
        else:
            hits = [ray_segment(ox, oy, dx, dy, ob[0], ob[1])]
        for t in hits:
            if t is not None and t < best:
                best = t
    return best if best <= max_range else None


def _segment_hits_polygon(ax, ay, bx, by, poly: ConvexPolygon) -> bool:
    dx, dy = bx - ax, by - ay
    t0, t1 = 0.0, 1.0
    for u, v in poly.edges():
        ex, ey = v.x - u.x, v.y - u.y
        elen = math.hypot(ex, ey)
        f0 = cross(ex, ey, ax - u.x, ay - u.y) / elen + EPS
        f1 = cross(ex, ey, dx, dy) / elen
        if f1 == 0.0:
            if f0 < 0:
                return False
            continue
        t = -f0 / f1
        if f1 > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return False
    return t1 > 0.0 and t0 < 1.0


def _segment_hits_disc(ax, ay, bx, by, c, r) -> bool:
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = ((c[0] - ax) * dx + (c[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    px, py = ax + t * dx, ay + t * dy
    return math.hypot(px - c[0], py - c[1]) <= r + EPS


def segment_occluded(a: Sequence[float], b: Sequence[float], f: Footprint) -> bool:
    """True iff segment (a, b) touches the footprint; grazing counts."""
    ax, ay = a
    bx, by = b
    if ax == bx and ay == by:
        raise GeometryError("degenerate segment")
    if any(_segment_hits_polygon(ax, ay, bx, by, p) for p in f.world_parts):
        return True
    return any(_segment_hits_disc(ax, ay, bx, by, d.center, d.radius) for d in f.world_discs)


# ---------------------------------------------------------------------------
# proximity queries used by contact and collision handling
# ---------------------------------------------------------------------------

def closest_point_on_segment(p, a, b) -> tuple[float, float]:
    ex, ey = b[0] - a[0], b[1] - a[1]
    L2 = ex * ex + ey * ey
    t = ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / L2 if L2 > 0 else 0.0
    t = min(1.0, max(0.0, t))
    return a[0] + t * ex, a[1] + t * ey


def footprint_separation(p: Sequence[float], f: Footprint) -> tuple[float, float, float]:
    """Nearest feature of ``f`` to point ``p``.

    Returns ``(distance, nx, ny)`` where the unit normal points from the
    footprint towards ``p``; distance is negative when ``p`` is inside a part.
    """
    px, py = p[0], p[1]
    best = (math.inf, 0.0, 0.0)
    for table in f.edge_tables:
        inside = True
        dmin, cx, cy = math.inf, 0.0, 0.0
        dexit, enx, eny = math.inf, 0.0, 0.0
        for ax, ay, ex, ey, L2, L in table:
            wx, wy = px - ax, py - ay
            side = (ex * wy - ey * wx) / L
            if side < 0.0:
                inside = False
            elif side < dexit:
                dexit, enx, eny = side, ey / L, -ex / L
            t = (wx * ex + wy * ey) / L2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            qx, qy = ax + t * ex, ay + t * ey
            d = math.hypot(px - qx, py - qy)
            if d < dmin:
                dmin, cx, cy = d, qx, qy
        if inside:
            cand = (-dexit, enx, eny)
        elif dmin > 0:
            cand = (dmin, (px - cx) / dmin, (py - cy) / dmin)
        else:
            cand = (0.0, 0.0, 0.0)
        if cand[0] < best[0]:
            best = cand
    for d in f.world_discs:
        wx, wy = px - d.center.x, py - d.center.y
        L = math.hypot(wx, wy)
        dist = L - d.radius
        if dist < best[0]:
            best = (dist, wx / L, wy / L) if L > 0 else (dist, 1.0, 0.0)
    return best


# ---------------------------------------------------------------------------
# batched helpers (numpy); checked against the scalar routines above
# ---------------------------------------------------------------------------

def segments_occluded(starts, end: Sequence[float], f: Footprint):
    """Vectorised ``segment_occluded(start_i, end, f)`` over an (M, 2) array."""
    import numpy as np

    P = np.asarray(starts, dtype=float).reshape(-1, 2)
    dx = end[0] - P[:, 0]
    dy = end[1] - P[:, 1]
    hit = np.zeros(len(P), dtype=bool)
    for table in f.edge_tables:
        t0 = np.zeros(len(P))
        t1 = np.ones(len(P))
        alive = np.ones(len(P), dtype=bool)
        for ax, ay, ex, ey, _L2, L in table:
            f0 = (ex * (P[:, 1] - ay) - ey * (P[:, 0] - ax)) / L + EPS
            f1 = (ex * dy - ey * dx) / L
            zero = f1 == 0.0
            alive &= ~(zero & (f0 < 0))
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(zero, 0.0, -f0 / np.where(zero, 1.0, f1))
            t0 = np.where(~zero & (f1 > 0), np.maximum(t0, t), t0)
            t1 = np.where(~zero & (f1 < 0), np.minimum(t1, t), t1)
        hit |= alive & (t0 <= t1) & (t1 > 0.0) & (t0 < 1.0)
    L2 = dx * dx + dy * dy
    for d in f.world_discs:
        t = ((d.center.x - P[:, 0]) * dx + (d.center.y - P[:, 1]) * dy) / L2
        t = np.clip(t, 0.0, 1.0)
        qx, qy = P[:, 0] + t * dx, P[:, 1] + t * dy
        hit |= np.hypot(qx - d.center.x, qy - d.center.y) <= d.radius + EPS
    return hit


def boundary_points(f: Footprint, center: Sequence[float], angles):
    """Outermost boundary point of ``f`` along each ray from ``center``."""
    import numpy as np

    ang = np.asarray(angles, dtype=float)
    ux, uy = np.cos(ang), np.sin(ang)
    far = 2.0 * f.bounding_radius((center[0], center[1])) + 1.0
    ox, oy = center[0] + far * ux, center[1] + far * uy
    dx, dy = -ux, -uy
    best = np.full(len(ang), np.inf)
    for table in f.edge_tables:
        for ax, ay, ex, ey, _L2, _L in table:
            den = dx * ey - dy * ex
            wx, wy = ax - ox, ay - oy
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (wx * ey - wy * ex) / den
                s = (wx * dy - wy * dx) / den
            ok = (np.abs(den) > 1e-15) & (t >= 0) & (s >= -EPS) & (s <= 1 + EPS)
            best = np.where(ok & (t < best), t, best)
    for d in f.world_discs:
        wx, wy = ox - d.center.x, oy - d.center.y
        bb = wx * dx + wy * dy
        cc = wx * wx + wy * wy - d.radius ** 2
        disc = bb * bb - cc
        t = -bb - np.sqrt(np.maximum(disc, 0.0))
        best = np.where((disc >= 0) & (t >= 0) & (t < best), t, best)
    r = far - best
    return np.stack([center[0] + r * ux, center[1] + r * uy], axis=1)
