"""Planar geometry primitives shared by the data model and the overlay engine.

Everything here works on bare ``(x, y)`` float tuples so it can be used both
while parsing (before domain objects exist) and inside the overlay engine.
All predicates use exact float comparisons; there is no epsilon, which keeps
parse/validate decisions deterministic for identical input bytes.
"""

from __future__ import annotations

from typing import Sequence, Tuple

Pt = Tuple[float, float]


def ring_signed_area(points: Sequence[Pt]) -> float:
    """Shoelace signed area of a closed ring (first point == last point).

    Positive for counterclockwise, negative for clockwise.
    """
    total = 0.0
    for i in range(len(points) - 1):
        x1, y1 = points[i]
        x2, y2 = points[i + 1]
        total += x1 * y2 - x2 * y1
    return 0.5 * total


def bbox_of_points(points: Sequence[Pt]) -> Tuple[float, float, float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def on_segment(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> bool:
    """True iff (px, py) lies on the closed segment (a, b)."""
    if _cross(ax, ay, bx, by, px, py) != 0.0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def segments_intersect(p1: Pt, p2: Pt, p3: Pt, p4: Pt) -> bool:
    """True iff closed segments (p1, p2) and (p3, p4) share at least one point.

    Covers proper crossings, endpoint touches and collinear overlap.
    """
    d1 = _cross(p3[0], p3[1], p4[0], p4[1], p1[0], p1[1])
    d2 = _cross(p3[0], p3[1], p4[0], p4[1], p2[0], p2[1])
    d3 = _cross(p1[0], p1[1], p2[0], p2[1], p3[0], p3[1])
    d4 = _cross(p1[0], p1[1], p2[0], p2[1], p4[0], p4[1])
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0.0 and on_segment(p1[0], p1[1], p3[0], p3[1], p4[0], p4[1]):
        return True
    if d2 == 0.0 and on_segment(p2[0], p2[1], p3[0], p3[1], p4[0], p4[1]):
        return True
    if d3 == 0.0 and on_segment(p3[0], p3[1], p1[0], p1[1], p2[0], p2[1]):
        return True
    if d4 == 0.0 and on_segment(p4[0], p4[1], p1[0], p1[1], p2[0], p2[1]):
        return True
    return False


def ring_self_intersects(points: Sequence[Pt]) -> bool:
    """Check a closed ring for self-contact.

    Non-adjacent edges may not touch at all; adjacent edges may share only
    their common vertex (a collinear double-back counts as a contact).
    Edges are pre-sorted by min-x so the pair scan can bail out early, which
    keeps large well-behaved rings closer to O(E log E) than O(E^2).
    """
    n = len(points) - 1  # edge count; ring is closed
    if n < 3:
        return True
    edges = []
    for i in range(n):
        a, b = points[i], points[i + 1]
        edges.append((min(a[0], b[0]), max(a[0], b[0]), i, a, b))
    edges.sort(key=lambda e: e[0])

    for idx in range(len(edges)):
        min_x1, max_x1, i, a1, b1 = edges[idx]
        for jdx in range(idx + 1, len(edges)):
            min_x2, _, j, a2, b2 = edges[jdx]
            if min_x2 > max_x1:
                break
            lo, hi = (i, j) if i < j else (j, i)
            adjacent = hi - lo == 1 or (lo == 0 and hi == n - 1)
            if adjacent:
                # Shared vertex is fine; doubling back over the neighbour is not.
                if lo == 0 and hi == n - 1:
                    shared = points[0]
                    far1, far2 = points[n - 1], points[1]
                else:
                    shared = points[hi]
                    far1, far2 = points[lo], points[hi + 1]
                cr = _cross(shared[0], shared[1], far1[0], far1[1], far2[0], far2[1])
                if cr == 0.0:
                    dot = (far1[0] - shared[0]) * (far2[0] - shared[0]) + (
                        far1[1] - shared[1]
                    ) * (far2[1] - shared[1])
                    if dot > 0.0:
                        return True
            else:
                if segments_intersect(a1, b1, a2, b2):
                    return True
    return False


def point_on_ring(px: float, py: float, points: Sequence[Pt]) -> bool:
    """True iff the point lies on any edge of the closed ring."""
    for i in range(len(points) - 1):
        ax, ay = points[i]
        bx, by = points[i + 1]
        if on_segment(px, py, ax, ay, bx, by):
            return True
    return False


def point_in_ring_interior(px: float, py: float, points: Sequence[Pt]) -> bool:
    """Even-odd crossing parity for a point assumed NOT on the ring boundary."""
    inside = False
    for i in range(len(points) - 1):
        x1, y1 = points[i]
        x2, y2 = points[i + 1]
        if (y1 > py) != (y2 > py):
            x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_int:
                inside = not inside
    return inside


def point_to_segment_distance(p: Pt, a: Pt, b: Pt) -> float:
    """Euclidean distance from point p to the closed segment (a, b)."""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return ((p[0] - a[0]) ** 2 + (p[1] - a[1]) ** 2) ** 0.5
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length_sq
    t = max(0.0, min(1.0, t))
    proj_x = a[0] + t * dx
    proj_y = a[1] + t * dy
    return ((p[0] - proj_x) ** 2 + (p[1] - proj_y) ** 2) ** 0.5
