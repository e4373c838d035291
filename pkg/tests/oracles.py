"""Independent reference implementations used only by the tests.

Nothing here imports the package's geometry routines; shapes are passed in as
plain vertex lists and (center, radius) tuples.
"""

from __future__ import annotations

import math

import numpy as np


def gift_wrap(points):
    """Brute-force hull vertex set: p->q is a hull edge iff every other point is
    strictly left of it. Assumes general position (no three collinear)."""
    pts = [tuple(map(float, p)) for p in points]
    verts = set()
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            if i == j:
                continue
            ok = True
            for k, r in enumerate(pts):
                if k in (i, j):
                    continue
                if (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]) <= 0:
                    ok = False
                    break
            if ok:
                verts.add(p)
                verts.add(q)
    return verts


def inside_convex(xs, ys, verts):
    """Vectorised closed point-in-convex-polygon (CCW vertices)."""
    ok = np.ones(np.shape(xs), dtype=bool)
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        ok &= (bx - ax) * (ys - ay) - (by - ay) * (xs - ax) >= 0
    return ok


def inside_union(xs, ys, polys, discs=()):
    ok = np.zeros(np.shape(xs), dtype=bool)
    for v in polys:
        ok |= inside_convex(xs, ys, v)
    for (cx, cy), r in discs:
        ok |= (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
    return ok


def stratified_area(polys, discs=(), hull=None, cells: int = 600, seed: int = 0):
    """Jittered Monte-Carlo estimate of union area (and optionally hull area).

    One uniform sample per cell of a ``cells x cells`` grid over the bounding box.
    """
    xs_all = [v[0] for p in polys for v in p] + [c[0] - r for c, r in discs] + [c[0] + r for c, r in discs]
    ys_all = [v[1] for p in polys for v in p] + [c[1] - r for c, r in discs] + [c[1] + r for c, r in discs]
    x0, x1, y0, y1 = min(xs_all), max(xs_all), min(ys_all), max(ys_all)
    rng = np.random.default_rng(seed)
    hx, hy = (x1 - x0) / cells, (y1 - y0) / cells
    gx, gy = np.meshgrid(np.arange(cells), np.arange(cells))
    xs = x0 + (gx + rng.random(gx.shape)) * hx
    ys = y0 + (gy + rng.random(gy.shape)) * hy
    cell = hx * hy
    area = inside_union(xs, ys, polys, discs).sum() * cell
    if hull is None:
        return area
    return area, inside_convex(xs, ys, hull).sum() * cell


def hull_of_shapes(polys, discs=(), disc_samples: int = 720):
    """Ordered CCW hull of polygon vertices plus densely sampled disc rims."""
    pts = [tuple(v) for p in polys for v in p]
    for (cx, cy), r in discs:
        for k in range(disc_samples):
            t = 2 * math.pi * k / disc_samples
            pts.append((cx + r * math.cos(t), cy + r * math.sin(t)))
    pts = sorted(set(pts))

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and ((out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                                     - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(pts[::-1])
    return lower[:-1] + upper[:-1]


def segment_sampled_occluded(a, b, polys, discs=(), samples: int = 10_000) -> bool:
    """Dense point sampling of the open segment (a, b) against the union."""
    t = (np.arange(samples) + 0.5) / samples
    xs = a[0] + t * (b[0] - a[0])
    ys = a[1] + t * (b[1] - a[1])
    return bool(inside_union(xs, ys, polys, discs).any())


def circle_arc_shadow(radius: float, light, center=(0.0, 0.0), step_deg: float = 0.1):
    """Shadowed arc span (radians) of an exact circle seen from a point light.

    A rim point is shadowed when its outward normal faces away from the light
    beyond the tangent point.
    """
    cx, cy = center
    n = int(round(360 / step_deg))
    lit = 0
    for k in range(n):
        t = math.radians((k + 0.5) * step_deg)
        px, py = cx + radius * math.cos(t), cy + radius * math.sin(t)
        if (light[0] - px) * math.cos(t) + (light[1] - py) * math.sin(t) > 0:
            lit += 1
    return math.radians((n - lit) * step_deg)
