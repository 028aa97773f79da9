"""Spatial analysis operations: areas, containment, boolean overlay,
simplification, quantization, bbox queries and the Monte-Carlo area oracle.

All math is planar over EPSG:4326 degree coordinates; areas are square
degrees.  Overlay is exact sweep-line clipping (see ``clipping``); the
Monte-Carlo sampler is an independent check used by the test suite to
validate the exact path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Sequence

import numpy as np

from . import _geom, clipping
from .geo_model import (
    BBox,
    Coordinate,
    Feature,
    Geometry,
    Layer,
    LinearRing,
    LineString,
    MultiPolygon,
    Point,
    Polygon,
    UnsupportedGeometry,
    compute_bbox,
)


class InvalidInput(ValueError):
    """Overlay input violates its preconditions (unnormalized or open rings)."""


class DegenerateAfterQuantization(ValueError):
    """Coordinate rounding collapsed a ring below validity."""


class OverlayOp(Enum):
    INTERSECTION = "intersection"
    UNION = "union"
    DIFFERENCE = "difference"

    @classmethod
    def from_label(cls, label: str) -> "OverlayOp":
        for member in cls:
            if member.value == label:
                return member
        raise ValueError(f"unknown overlay operation {label!r}")


@dataclass
class OverlayStats:
    input_area_a: float
    input_area_b: float
    output_area: float
    output_feature_count: int
    elapsed_ms: float

    def as_json(self) -> dict:
        return {
            "input_area_a": self.input_area_a,
            "input_area_b": self.input_area_b,
            "output_area": self.output_area,
            "output_feature_count": self.output_feature_count,
            "elapsed_ms": self.elapsed_ms,
        }


# ---------------------------------------------------------------------------
# Areas


def ring_area_signed(ring: LinearRing) -> float:
    """Shoelace signed area: positive counterclockwise, negative clockwise."""
    return _geom.ring_signed_area(ring.as_tuples())


def polygon_area(polygon: Polygon) -> float:
    """Unsigned area of the exterior minus its holes."""
    area = abs(ring_area_signed(polygon.exterior))
    for hole in polygon.holes:
        area -= abs(ring_area_signed(hole))
    return area


def multipolygon_area(mp: MultiPolygon) -> float:
    return sum(polygon_area(p) for p in mp.polygons)


def geometry_area(geometry: Geometry) -> float:
    if isinstance(geometry, Polygon):
        return polygon_area(geometry)
    if isinstance(geometry, MultiPolygon):
        return multipolygon_area(geometry)
    raise UnsupportedGeometry(f"{type(geometry).__name__} has no area")


def layer_area(layer: Layer) -> float:
    return sum(geometry_area(f.geometry) for f in layer.features)


# ---------------------------------------------------------------------------
# Containment


def point_in_polygon(point: Coordinate, polygon: Polygon) -> bool:
    """Closed-region membership: the boundary (exterior and hole rings)
    counts as inside; hole interiors do not."""
    px, py = point.x, point.y
    rings = [polygon.exterior.as_tuples()] + [h.as_tuples() for h in polygon.holes]
    for ring in rings:
        if _geom.point_on_ring(px, py, ring):
            return True
    if not _geom.point_in_ring_interior(px, py, rings[0]):
        return False
    for hole in rings[1:]:
        if _geom.point_in_ring_interior(px, py, hole):
            return False
    return True


def point_in_multipolygon(point: Coordinate, mp: MultiPolygon) -> bool:
    return any(point_in_polygon(point, p) for p in mp.polygons)


# ---------------------------------------------------------------------------
# Boolean overlay


def as_multipolygon(geometry: Geometry) -> MultiPolygon:
    if isinstance(geometry, MultiPolygon):
        return geometry
    if isinstance(geometry, Polygon):
        return MultiPolygon((geometry,))
    raise UnsupportedGeometry(f"{type(geometry).__name__} is not areal")


def _check_overlay_input(mp: MultiPolygon, side: str) -> None:
    for p_index, poly in enumerate(mp.polygons):
        rings = [("exterior", poly.exterior)] + [(f"hole {i}", h) for i, h in enumerate(poly.holes)]
        for label, ring in rings:
            pts = ring.points
            if len(pts) < 4 or pts[0] != pts[-1]:
                raise InvalidInput(f"{side} polygon {p_index} {label} ring is not closed")
        if poly.exterior.signed_area() <= 0:
            raise InvalidInput(f"{side} polygon {p_index} exterior is not counterclockwise")
        for i, hole in enumerate(poly.holes):
            if hole.signed_area() >= 0:
                raise InvalidInput(f"{side} polygon {p_index} hole {i} is not clockwise")


def _mp_rings(mp: MultiPolygon) -> list[list[tuple[float, float]]]:
    rings = []
    for poly in mp.polygons:
        rings.append(poly.exterior.as_tuples())
        rings.extend(h.as_tuples() for h in poly.holes)
    return rings


def _mp_from_parts(parts: Sequence[tuple[list, list]]) -> MultiPolygon:
    polygons = []
    for exterior, holes in parts:
        polygons.append(
            Polygon(
                LinearRing(tuple(Coordinate(x, y) for x, y in exterior)),
                tuple(LinearRing(tuple(Coordinate(x, y) for x, y in h)) for h in holes),
            )
        )
    return MultiPolygon(tuple(polygons))


def clip_polygons(a: MultiPolygon, b: MultiPolygon, op: OverlayOp) -> MultiPolygon:
    """Exact boolean combination of two normalized multipolygons.

    Output vertices are snapped to the 1e-9 degree grid and the result is
    normalized (exterior CCW, holes CW); deterministic for fixed input.
    """
    _check_overlay_input(a, "subject")
    _check_overlay_input(b, "clip")
    parts = clipping.boolean_overlay(_mp_rings(a), _mp_rings(b), op.value)
    return _mp_from_parts(parts)


def dissolve_layer(layer: Layer) -> MultiPolygon:
    """Merge all areal features into one multipolygon by iterated union."""
    merged = MultiPolygon(())
    for feature in layer.features:
        part = as_multipolygon(feature.geometry)
        if not merged.polygons:
            merged = clip_polygons(part, MultiPolygon(()), OverlayOp.UNION)
        else:
            merged = clip_polygons(merged, part, OverlayOp.UNION)
    return merged


def overlay_layers(a: Layer, b: Layer, op: OverlayOp) -> tuple[Layer, OverlayStats]:
    """Overlay two areal layers.

    Intersection is pairwise with bbox prefiltering and merged attributes
    (keys prefixed ``a_`` / ``b_``); union and difference dissolve each side
    first and emit at most one feature tagged with the source layer names.
    Output feature order is (index in a, index in b), also under any
    internal parallelism.
    """
    started = time.perf_counter()
    for layer, side in ((a, "a"), (b, "b")):
        for index, feature in enumerate(layer.features):
            if not isinstance(feature.geometry, (Polygon, MultiPolygon)):
                raise UnsupportedGeometry(
                    f"layer {side} feature {index} is not areal"
                )
    area_a = layer_area(a)
    area_b = layer_area(b)

    features: list[Feature] = []
    if op is OverlayOp.INTERSECTION:
        boxes_b = [compute_bbox(g.geometry) for g in b.features]
        for fa in a.features:
            box_a = compute_bbox(fa.geometry)
            mp_a = as_multipolygon(fa.geometry)
            for j, fb in enumerate(b.features):
                if not box_a.intersects(boxes_b[j]):
                    continue
                clipped = clip_polygons(mp_a, as_multipolygon(fb.geometry), op)
                if clipped.polygons:
                    attrs = {f"a_{k}": v for k, v in fa.attributes.items()}
                    attrs.update({f"b_{k}": v for k, v in fb.attributes.items()})
                    features.append(Feature(clipped, attrs))
    else:
        clipped = clip_polygons(dissolve_layer(a), dissolve_layer(b), op)
        if clipped.polygons:
            features.append(
                Feature(clipped, {"source_a": a.name, "source_b": b.name, "op": op.value})
            )

    result = Layer(name=f"{a.name}_{op.value}_{b.name}", features=features)
    stats = OverlayStats(
        input_area_a=area_a,
        input_area_b=area_b,
        output_area=layer_area(result),
        output_feature_count=len(features),
        elapsed_ms=(time.perf_counter() - started) * 1000.0,
    )
    return result, stats


# ---------------------------------------------------------------------------
# Payload reduction


def simplify_chain(points: Sequence[Coordinate], epsilon: float) -> list[Coordinate]:
    """Douglas-Peucker simplification with point-to-segment distance.

    Keeps the first and last points; every removed point lies within
    ``epsilon`` of the simplified chain.  ``epsilon == 0`` returns the input
    unchanged.  A closed ring keeps its closing point and is never reduced
    below 4 points (the floor may retain vertices beyond what epsilon alone
    would keep).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("need at least 2 points")
    if epsilon == 0 or len(pts) == 2:
        return pts

    raw = [(p.x, p.y) for p in pts]
    last = len(raw) - 1
    is_ring = raw[0] == raw[-1] and len(raw) >= 4

    keep = {0, last}
    stack = [(0, last)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo <= 1:
            continue
        max_d = -1.0
        max_i = lo + 1
        for i in range(lo + 1, hi):
            d = _geom.point_to_segment_distance(raw[i], raw[lo], raw[hi])
            if d > max_d:
                max_d = d
                max_i = i
        if max_d > epsilon:
            keep.add(max_i)
            stack.append((lo, max_i))
            stack.append((max_i, hi))

    if is_ring:
        while len(keep) < 4 and len(keep) < len(raw):
            chain = [raw[i] for i in sorted(keep)]

            def to_chain(p: tuple) -> float:
                return min(
                    _geom.point_to_segment_distance(p, chain[k], chain[k + 1])
                    for k in range(len(chain) - 1)
                )

            removed = [i for i in range(len(raw)) if i not in keep]
            keep.add(max(removed, key=lambda i: (to_chain(raw[i]), -i)))

    return [pts[i] for i in sorted(keep)]


def _round_half_away(value: float, decimals: int) -> float:
    exp = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(exp, rounding=ROUND_HALF_UP))


def quantize_geometry(geometry: Geometry, decimals: int) -> Geometry:
    """Round every coordinate half-away-from-zero to ``decimals`` places.

    Idempotent; the per-coordinate error is at most 0.5 * 10^-decimals.
    Raises DegenerateAfterQuantization when rounding collapses a ring below
    validity (duplicate consecutive points, self-intersection, flipped or
    vanished area, hole escaping its exterior).
    """
    if not isinstance(decimals, int) or not 0 <= decimals <= 9:
        raise ValueError("decimals must be an integer in 0..9")

    def q(c: Coordinate) -> Coordinate:
        return Coordinate(_round_half_away(c.x, decimals), _round_half_away(c.y, decimals))

    if isinstance(geometry, Point):
        return Point(q(geometry.coordinate))
    if isinstance(geometry, LineString):
        return LineString(tuple(q(p) for p in geometry.points))

    def q_ring(ring: LinearRing) -> LinearRing:
        return LinearRing(tuple(q(p) for p in ring.points))

    def q_polygon(poly: Polygon) -> Polygon:
        out = Polygon(q_ring(poly.exterior), tuple(q_ring(h) for h in poly.holes))
        _require_valid_polygon(out)
        return out

    if isinstance(geometry, Polygon):
        return q_polygon(geometry)
    return MultiPolygon(tuple(q_polygon(p) for p in geometry.polygons))


def _require_valid_polygon(poly: Polygon) -> None:
    rings = [("exterior", poly.exterior)] + [(f"hole {i}", h) for i, h in enumerate(poly.holes)]
    for label, ring in rings:
        pts = ring.as_tuples()
        for i in range(len(pts) - 1):
            if pts[i] == pts[i + 1]:
                raise DegenerateAfterQuantization(f"{label} collapsed to duplicate points")
        if _geom.ring_self_intersects(pts):
            raise DegenerateAfterQuantization(f"{label} self-intersects after rounding")
    if poly.exterior.signed_area() <= 0:
        raise DegenerateAfterQuantization("exterior area vanished or flipped")
    ext = poly.exterior.as_tuples()
    for i, hole in enumerate(poly.holes):
        if hole.signed_area() >= 0:
            raise DegenerateAfterQuantization(f"hole {i} area vanished or flipped")
        for p in hole.as_tuples()[:-1]:
            if not _geom.point_on_ring(p[0], p[1], ext) and not _geom.point_in_ring_interior(
                p[0], p[1], ext
            ):
                raise DegenerateAfterQuantization(f"hole {i} left the exterior")


# ---------------------------------------------------------------------------
# Queries


def bbox_query(layer: Layer, box: BBox) -> Layer:
    """Sub-layer of features whose geometry bbox intersects ``box``.

    A bbox filter, not an exact clip; closed-interval intersection, feature
    order preserved, fresh layer id.
    """
    features = [f for f in layer.features if compute_bbox(f.geometry).intersects(box)]
    return Layer(name=layer.name, features=features, crs=layer.crs)


# ---------------------------------------------------------------------------
# Monte-Carlo sampling oracle

def _ring_edges(ring: LinearRing) -> tuple:
    pts = np.asarray(ring.as_tuples(), dtype=float)
    return pts[:-1, 0], pts[:-1, 1], pts[1:, 0], pts[1:, 1]


def _vec_ring_masks(xs: np.ndarray, ys: np.ndarray, edges: tuple):
    """(on_boundary, interior_parity) for points against one closed ring.

    Loops over edges with whole-point-vector arithmetic that mirrors the
    scalar predicates in _geom expression for expression, so the vectorized
    and scalar membership decisions are bit-identical.
    """
    x1a, y1a, x2a, y2a = edges
    on = np.zeros(len(xs), dtype=bool)
    parity = np.zeros(len(xs), dtype=bool)
    for k in range(len(x1a)):
        x1 = x1a[k]
        y1 = y1a[k]
        x2 = x2a[k]
        y2 = y2a[k]
        dx = x2 - x1
        dy = y2 - y1
        cross = dx * (ys - y1) - dy * (xs - x1)
        # Exact boundary hits are rare; refine them on the small subset.
        hits = np.flatnonzero(cross == 0.0)
        if hits.size:
            hx = xs[hits]
            hy = ys[hits]
            lo_x, hi_x = (x1, x2) if x1 <= x2 else (x2, x1)
            lo_y, hi_y = (y1, y2) if y1 <= y2 else (y2, y1)
            on[hits[(lo_x <= hx) & (hx <= hi_x) & (lo_y <= hy) & (hy <= hi_y)]] = True
        if dy != 0.0:
            crossing = np.flatnonzero((y1 > ys) != (y2 > ys))
            if crossing.size:
                x_int = x1 + (ys[crossing] - y1) * dx / dy
                parity[crossing[xs[crossing] < x_int]] ^= True
    return on, parity


def membership_mask(xs: np.ndarray, ys: np.ndarray, mp: MultiPolygon) -> np.ndarray:
    """Vectorized twin of point_in_multipolygon: same closed-region
    predicate, identical arithmetic, evaluated for arrays of points.

    Each polygon is tested only against the points inside its bbox, which
    keeps many-part shapes (thousands of small polygons) near O(points).
    """
    result = np.zeros(len(xs), dtype=bool)
    for poly in mp.polygons:
        box = compute_bbox(poly)
        candidates = np.flatnonzero(
            ~result
            & (xs >= box.min_x)
            & (xs <= box.max_x)
            & (ys >= box.min_y)
            & (ys <= box.max_y)
        )
        if candidates.size == 0:
            continue
        cx = xs[candidates]
        cy = ys[candidates]
        on_boundary, inside = _vec_ring_masks(cx, cy, _ring_edges(poly.exterior))
        for hole in poly.holes:
            hole_on, hole_in = _vec_ring_masks(cx, cy, _ring_edges(hole))
            on_boundary |= hole_on
            inside &= ~hole_in
        result[candidates[on_boundary | inside]] = True
    return result


def _sample_box(box: BBox, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    xs = box.min_x + pts[:, 0] * (box.max_x - box.min_x)
    ys = box.min_y + pts[:, 1] * (box.max_y - box.min_y)
    return xs, ys


def _bbox_area(box: BBox) -> float:
    return (box.max_x - box.min_x) * (box.max_y - box.min_y)


def monte_carlo_area(shape: MultiPolygon, box: BBox, n: int, seed: int) -> float:
    """Sampling estimate of a multipolygon's area: area(box) * hits / n.

    The point stream is a deterministic function of the seed, so repeated
    calls with identical arguments return the identical value.  Requires
    the shape to lie within the box.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xs, ys = _sample_box(box, n, seed)
    hits = int(membership_mask(xs, ys, shape).sum())
    return _bbox_area(box) * (hits / n)


def monte_carlo_overlay_area(
    a: MultiPolygon, b: MultiPolygon, op: OverlayOp, box: BBox, n: int, seed: int
) -> float:
    """Sampling estimate of area(a op b) from the two inputs' membership
    predicates alone; independent of the exact clipping path."""
    if n < 1:
        raise ValueError("n must be >= 1")
    xs, ys = _sample_box(box, n, seed)
    in_a = membership_mask(xs, ys, a)
    in_b = membership_mask(xs, ys, b)
    if op is OverlayOp.INTERSECTION:
        hits = in_a & in_b
    elif op is OverlayOp.UNION:
        hits = in_a | in_b
    else:
        hits = in_a & ~in_b
    return _bbox_area(box) * (int(hits.sum()) / n)
