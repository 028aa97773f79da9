"""Vector spatial data model and its canonical GeoJSON subset.

The external format is a strict subset of GeoJSON (RFC 7946): a top-level
FeatureCollection whose features carry Point / LineString / Polygon /
MultiPolygon geometries and flat scalar attribute maps.  Parsing is tolerant
of unknown foreign members (they are dropped); writing is canonical: fixed
key order, sorted attribute keys, shortest round-trip float representation,
no insignificant whitespace.  Canonical bytes are what checksums, storage
and fog-to-cloud transfer operate on.

Coordinates are EPSG:4326 longitude/latitude degrees and all planar math in
this package stays in degree space (areas are square degrees).
"""

from __future__ import annotations

import json
import math
import uuid
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from . import _geom

CRS_TAG = "EPSG:4326"

Scalar = Union[str, int, float, bool, None]


class GeoJsonError(ValueError):
    """Base class for rejections of external spatial input."""


class MalformedJson(GeoJsonError):
    """Input is not UTF-8 JSON or violates the subset's structure."""


class UnsupportedGeometry(GeoJsonError):
    """Geometry type outside the Point/LineString/Polygon/MultiPolygon set."""


class InvalidRing(GeoJsonError):
    """Ring is open, too short, degenerate or self-intersecting."""


class CoordinateOutOfRange(GeoJsonError):
    """Coordinate is non-finite or outside lon [-180, 180] / lat [-90, 90]."""


@dataclass(frozen=True)
class Coordinate:
    x: float
    y: float


@dataclass(frozen=True)
class Point:
    coordinate: Coordinate


@dataclass(frozen=True)
class LineString:
    points: tuple[Coordinate, ...]


@dataclass(frozen=True)
class LinearRing:
    """Closed ring: first point equals last, at least 4 points."""

    points: tuple[Coordinate, ...]

    def signed_area(self) -> float:
        return _geom.ring_signed_area([(p.x, p.y) for p in self.points])

    def reversed(self) -> "LinearRing":
        # Keeps the anchor point first: [p0, p1, .., pk, p0] -> [p0, pk, .., p1, p0]
        pts = self.points
        return LinearRing((pts[0],) + tuple(reversed(pts[1:-1])) + (pts[0],))

    def as_tuples(self) -> list[tuple[float, float]]:
        return [(p.x, p.y) for p in self.points]


@dataclass(frozen=True)
class Polygon:
    exterior: LinearRing
    holes: tuple[LinearRing, ...] = ()


@dataclass(frozen=True)
class MultiPolygon:
    polygons: tuple[Polygon, ...] = ()


Geometry = Union[Point, LineString, Polygon, MultiPolygon]


@dataclass(frozen=True)
class Feature:
    geometry: Geometry
    attributes: dict[str, Scalar] = field(default_factory=dict)


@dataclass
class Layer:
    """A named collection of features.

    ``layer_id`` is node-local identity and is excluded from equality; two
    layers are equal when their content (name, crs, features) is equal,
    which matches what canonical serialization covers.
    """

    name: str
    features: list[Feature] = field(default_factory=list)
    crs: str = CRS_TAG
    layer_id: str = field(default_factory=lambda: uuid.uuid4().hex, compare=False)


@dataclass(frozen=True)
class BBox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def intersects(self, other: "BBox") -> bool:
        return not (
            self.max_x < other.min_x
            or other.max_x < self.min_x
            or self.max_y < other.min_y
            or other.max_y < self.min_y
        )

    def as_list(self) -> list[float]:
        return [self.min_x, self.min_y, self.max_x, self.max_y]


@dataclass(frozen=True)
class Violation:
    """A single invariant breach; ``feature_index`` is -1 for layer-level rules."""

    feature_index: int
    rule: str
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_json(self) -> list[dict]:
        return [
            {"feature_index": v.feature_index, "rule": v.rule, "detail": v.detail}
            for v in self.violations
        ]


# Rule identifiers used in violations (and mapped to parse errors below).
RULE_COORD_RANGE = "CoordinateOutOfRange"
RULE_OPEN_RING = "OpenRing"
RULE_TOO_FEW_POINTS = "TooFewPoints"
RULE_DUPLICATE_POINT = "DuplicateConsecutivePoints"
RULE_SELF_INTERSECTION = "SelfIntersection"
RULE_HOLE_OUTSIDE = "HoleOutsideExterior"
RULE_WINDING = "WindingOrder"
RULE_EMPTY_ATTR = "EmptyAttributeName"
RULE_BAD_ATTR = "NonScalarAttribute"
RULE_CRS = "CrsMismatch"

_RING_RULES = {
    RULE_OPEN_RING,
    RULE_TOO_FEW_POINTS,
    RULE_DUPLICATE_POINT,
    RULE_SELF_INTERSECTION,
    RULE_HOLE_OUTSIDE,
}


# ---------------------------------------------------------------------------
# Parsing


def _as_coordinate(raw: object, where: str) -> Coordinate:
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
    ):
        raise MalformedJson(f"{where}: coordinate must be a [lon, lat] number pair")
    return Coordinate(float(raw[0]), float(raw[1]))


def _as_ring(raw: object, where: str) -> LinearRing:
    if not isinstance(raw, list):
        raise MalformedJson(f"{where}: ring must be an array of positions")
    return LinearRing(tuple(_as_coordinate(p, where) for p in raw))


def _as_polygon(raw: object, where: str) -> Polygon:
    if not isinstance(raw, list) or not raw:
        raise MalformedJson(f"{where}: polygon needs at least an exterior ring")
    rings = [_as_ring(r, where) for r in raw]
    return Polygon(rings[0], tuple(rings[1:]))


def _parse_geometry(raw: object, where: str) -> Geometry:
    if not isinstance(raw, dict):
        raise MalformedJson(f"{where}: geometry must be an object")
    gtype = raw.get("type")
    coords = raw.get("coordinates")
    if gtype in ("GeometryCollection", "MultiPoint", "MultiLineString"):
        raise UnsupportedGeometry(f"{where}: geometry type {gtype} is not supported")
    if gtype not in ("Point", "LineString", "Polygon", "MultiPolygon"):
        raise UnsupportedGeometry(f"{where}: unknown geometry type {gtype!r}")
    if coords is None:
        raise MalformedJson(f"{where}: geometry has no coordinates")
    if gtype == "Point":
        return Point(_as_coordinate(coords, where))
    if gtype == "LineString":
        if not isinstance(coords, list):
            raise MalformedJson(f"{where}: LineString coordinates must be an array")
        return LineString(tuple(_as_coordinate(p, where) for p in coords))
    if gtype == "Polygon":
        return _as_polygon(coords, where)
    if not isinstance(coords, list):
        raise MalformedJson(f"{where}: MultiPolygon coordinates must be an array")
    return MultiPolygon(tuple(_as_polygon(p, where) for p in coords))


def _parse_attributes(raw: object, where: str) -> dict[str, Scalar]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise MalformedJson(f"{where}: properties must be an object or null")
    attrs: dict[str, Scalar] = {}
    for key, value in raw.items():
        if not isinstance(key, str) or not key:
            raise MalformedJson(f"{where}: attribute names must be non-empty strings")
        if isinstance(value, (dict, list)):
            raise MalformedJson(f"{where}: attribute {key!r} must be a scalar")
        if isinstance(value, float) and not math.isfinite(value):
            raise MalformedJson(f"{where}: attribute {key!r} must be finite")
        attrs[key] = value
    return attrs


def _reject_nonfinite(_: str) -> None:
    raise MalformedJson("NaN and Infinity literals are not valid JSON")


def parse_structural(data: bytes, default_name: Optional[str] = None) -> Layer:
    """Parse bytes into an unvalidated, unnormalized Layer.

    Raises MalformedJson / UnsupportedGeometry on structural problems;
    invariant checks (ranges, ring validity) happen separately so callers
    can either fail fast (parse_geojson) or collect a full report (ingest).
    """
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        doc = json.loads(text, parse_constant=_reject_nonfinite)
    except MalformedJson:
        raise
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedJson(f"not parseable as UTF-8 JSON: {exc}") from exc

    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise MalformedJson("top level must be a FeatureCollection object")
    raw_features = doc.get("features")
    if not isinstance(raw_features, list):
        raise MalformedJson("FeatureCollection must carry a features array")

    crs = doc.get("crs", CRS_TAG)
    if crs != CRS_TAG:
        raise MalformedJson(f"crs must be {CRS_TAG!r} (reprojection is unsupported)")

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise MalformedJson("layer name must be a string")

    features = []
    for index, raw in enumerate(raw_features):
        where = f"feature {index}"
        if not isinstance(raw, dict) or raw.get("type") != "Feature":
            raise MalformedJson(f"{where}: must be an object with type 'Feature'")
        if "geometry" not in raw or raw["geometry"] is None:
            raise MalformedJson(f"{where}: geometry is required")
        geometry = _parse_geometry(raw["geometry"], where)
        attributes = _parse_attributes(raw.get("properties"), where)
        features.append(Feature(geometry, attributes))

    layer_id = doc.get("layer_id")
    layer = Layer(name=name or default_name or "layer", features=features, crs=CRS_TAG)
    if isinstance(layer_id, str) and layer_id:
        layer.layer_id = layer_id
    return layer


def _coordinate_violations(geometry: Geometry, index: int) -> list[Violation]:
    out = []
    for c in iter_coordinates(geometry):
        finite = math.isfinite(c.x) and math.isfinite(c.y)
        if not finite or not (-180.0 <= c.x <= 180.0) or not (-90.0 <= c.y <= 90.0):
            out.append(
                Violation(index, RULE_COORD_RANGE, f"coordinate ({c.x}, {c.y}) out of range")
            )
    return out


def _ring_violations(ring: LinearRing, index: int, label: str) -> list[Violation]:
    pts = ring.as_tuples()
    if len(pts) < 4:
        return [Violation(index, RULE_TOO_FEW_POINTS, f"{label} has {len(pts)} points, need 4")]
    if pts[0] != pts[-1]:
        return [Violation(index, RULE_OPEN_RING, f"{label} is not closed")]
    for i in range(len(pts) - 1):
        if pts[i] == pts[i + 1]:
            return [
                Violation(index, RULE_DUPLICATE_POINT, f"{label} repeats point {pts[i]} at {i}")
            ]
    if _geom.ring_self_intersects(pts):
        return [Violation(index, RULE_SELF_INTERSECTION, f"{label} self-intersects")]
    return []


def _polygon_violations(
    poly: Polygon, index: int, check_winding: bool, label: str = "polygon"
) -> list[Violation]:
    out = _ring_violations(poly.exterior, index, f"{label} exterior")
    for h, hole in enumerate(poly.holes):
        out.extend(_ring_violations(hole, index, f"{label} hole {h}"))
    if out:
        return out
    ext_pts = poly.exterior.as_tuples()
    for h, hole in enumerate(poly.holes):
        for p in hole.as_tuples()[:-1]:
            if not _geom.point_on_ring(p[0], p[1], ext_pts) and not _geom.point_in_ring_interior(
                p[0], p[1], ext_pts
            ):
                out.append(
                    Violation(index, RULE_HOLE_OUTSIDE, f"{label} hole {h} leaves the exterior")
                )
                break
    if check_winding:
        if poly.exterior.signed_area() <= 0:
            out.append(Violation(index, RULE_WINDING, f"{label} exterior is not counterclockwise"))
        for h, hole in enumerate(poly.holes):
            if hole.signed_area() >= 0:
                out.append(Violation(index, RULE_WINDING, f"{label} hole {h} is not clockwise"))
    return out


def _feature_violations(feature: Feature, index: int, check_winding: bool) -> list[Violation]:
    out = _coordinate_violations(feature.geometry, index)
    if out:
        return out
    g = feature.geometry
    if isinstance(g, LineString) and len(g.points) < 2:
        out.append(Violation(index, RULE_TOO_FEW_POINTS, "LineString needs at least 2 points"))
    elif isinstance(g, Polygon):
        out.extend(_polygon_violations(g, index, check_winding))
    elif isinstance(g, MultiPolygon):
        for p, poly in enumerate(g.polygons):
            out.extend(_polygon_violations(poly, index, check_winding, f"part {p}"))
    for key, value in feature.attributes.items():
        if not key:
            out.append(Violation(index, RULE_EMPTY_ATTR, "attribute name is empty"))
        if isinstance(value, (dict, list)):
            out.append(Violation(index, RULE_BAD_ATTR, f"attribute {key!r} is not a scalar"))
    return out


def invariant_violations(layer: Layer, check_winding: bool = True) -> list[Violation]:
    out = []
    if layer.crs != CRS_TAG:
        out.append(Violation(-1, RULE_CRS, f"crs is {layer.crs!r}, expected {CRS_TAG!r}"))
    for index, feature in enumerate(layer.features):
        out.extend(_feature_violations(feature, index, check_winding))
    return out


def validate_layer(layer: Layer) -> ValidationReport:
    """Report all invariant violations; an empty report means the layer is valid."""
    return ValidationReport(invariant_violations(layer, check_winding=True))


def _raise_first(violations: Sequence[Violation]) -> None:
    v = violations[0]
    if v.rule == RULE_COORD_RANGE:
        raise CoordinateOutOfRange(v.detail)
    if v.rule in _RING_RULES:
        raise InvalidRing(v.detail)
    raise MalformedJson(v.detail)


def normalize_polygon(poly: Polygon) -> Polygon:
    exterior = poly.exterior if poly.exterior.signed_area() > 0 else poly.exterior.reversed()
    holes = tuple(h if h.signed_area() < 0 else h.reversed() for h in poly.holes)
    return Polygon(exterior, holes)


def normalize_geometry(geometry: Geometry) -> Geometry:
    if isinstance(geometry, Polygon):
        return normalize_polygon(geometry)
    if isinstance(geometry, MultiPolygon):
        return MultiPolygon(tuple(normalize_polygon(p) for p in geometry.polygons))
    return geometry


def normalize_layer(layer: Layer) -> Layer:
    """Fix ring winding in place convention: exterior CCW, holes CW. Idempotent."""
    features = [Feature(normalize_geometry(f.geometry), f.attributes) for f in layer.features]
    return Layer(name=layer.name, features=features, crs=layer.crs, layer_id=layer.layer_id)


def parse_geojson(data: bytes, default_name: Optional[str] = None) -> Layer:
    """Parse, validate and normalize a GeoJSON FeatureCollection.

    Deterministic: identical bytes produce an identical layer or the same
    error variant.  The returned layer has normalized winding and a fresh
    layer_id unless the document carried one.
    """
    layer = parse_structural(data, default_name=default_name)
    violations = invariant_violations(layer, check_winding=False)
    if violations:
        _raise_first(violations)
    return normalize_layer(layer)


# ---------------------------------------------------------------------------
# Canonical serialization


def _geometry_to_json(geometry: Geometry) -> dict:
    if isinstance(geometry, Point):
        return {"type": "Point", "coordinates": [geometry.coordinate.x, geometry.coordinate.y]}
    if isinstance(geometry, LineString):
        return {"type": "LineString", "coordinates": [[p.x, p.y] for p in geometry.points]}
    if isinstance(geometry, Polygon):
        return {"type": "Polygon", "coordinates": _polygon_coords(geometry)}
    return {
        "type": "MultiPolygon",
        "coordinates": [_polygon_coords(p) for p in geometry.polygons],
    }


def _polygon_coords(poly: Polygon) -> list:
    rings = [poly.exterior] + list(poly.holes)
    return [[[p.x, p.y] for p in ring.points] for ring in rings]


def write_geojson(layer: Layer) -> bytes:
    """Canonical serialization: fixed key order, sorted attribute keys,
    shortest round-trip floats, no whitespace.  Two equal layers always
    serialize to identical bytes, so checksums identify content.
    """
    doc = {
        "type": "FeatureCollection",
        "name": layer.name,
        "crs": layer.crs,
        "features": [
            {
                "type": "Feature",
                "geometry": _geometry_to_json(f.geometry),
                "properties": {k: f.attributes[k] for k in sorted(f.attributes)},
            }
            for f in layer.features
        ],
    }
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False, allow_nan=False).encode(
        "utf-8"
    )


# ---------------------------------------------------------------------------
# Extents


def iter_coordinates(geometry: Geometry) -> Iterable[Coordinate]:
    if isinstance(geometry, Point):
        yield geometry.coordinate
    elif isinstance(geometry, LineString):
        yield from geometry.points
    elif isinstance(geometry, Polygon):
        yield from geometry.exterior.points
        for hole in geometry.holes:
            yield from hole.points
    else:
        for poly in geometry.polygons:
            yield from poly.exterior.points
            for hole in poly.holes:
                yield from hole.points


def compute_bbox(geometry: Geometry) -> BBox:
    """Minimal axis-aligned extent of a geometry."""
    coords = list(iter_coordinates(geometry))
    if not coords:
        return BBox(0.0, 0.0, 0.0, 0.0)
    xs = [c.x for c in coords]
    ys = [c.y for c in coords]
    return BBox(min(xs), min(ys), max(xs), max(ys))


def layer_bbox(layer: Layer) -> BBox:
    """Extent of a whole layer; the empty layer gets the degenerate (0,0,0,0)."""
    boxes = [compute_bbox(f.geometry) for f in layer.features if list(iter_coordinates(f.geometry))]
    if not boxes:
        return BBox(0.0, 0.0, 0.0, 0.0)
    return BBox(
        min(b.min_x for b in boxes),
        min(b.min_y for b in boxes),
        max(b.max_x for b in boxes),
        max(b.max_y for b in boxes),
    )
