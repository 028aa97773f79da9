"""Data model, GeoJSON parsing/serialization and validation tests."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrfog.geo_model import (
    BBox,
    Coordinate,
    CoordinateOutOfRange,
    Feature,
    InvalidRing,
    Layer,
    LinearRing,
    LineString,
    MalformedJson,
    MultiPolygon,
    Point,
    Polygon,
    UnsupportedGeometry,
    compute_bbox,
    layer_bbox,
    normalize_layer,
    parse_geojson,
    validate_layer,
    write_geojson,
)

from conftest import square


def fc(*features) -> bytes:
    return json.dumps({"type": "FeatureCollection", "features": list(features)}).encode()


def feat(geometry, properties=None) -> dict:
    return {"type": "Feature", "geometry": geometry, "properties": properties or {}}


def shoelace(coords) -> float:
    # Independent signed-area oracle for normalization checks.
    total = 0.0
    for (x1, y1), (x2, y2) in zip(coords, coords[1:]):
        total += x1 * y2 - x2 * y1
    return total / 2.0


def brute_force_self_intersects(coords) -> bool:
    # Independent oracle: pairwise proper-crossing test over non-adjacent edges.
    n = len(coords) - 1

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            a, b = coords[i], coords[i + 1]
            c, d = coords[j], coords[j + 1]
            d1, d2 = cross(c, d, a), cross(c, d, b)
            d3, d4 = cross(a, b, c), cross(a, b, d)
            if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
                return True
    return False


class TestParse:
    def test_single_point(self):
        layer = parse_geojson(fc(feat({"type": "Point", "coordinates": [1.0, 2.0]})))
        assert len(layer.features) == 1
        assert layer.features[0].geometry == Point(Coordinate(1.0, 2.0))
        assert layer_bbox(layer) == BBox(1.0, 2.0, 1.0, 2.0)

    def test_unclosed_short_ring_rejected(self):
        body = fc(feat({"type": "Polygon", "coordinates": [[[0, 0], [1, 0], [1, 1]]]}))
        with pytest.raises(InvalidRing):
            parse_geojson(body)

    def test_clockwise_exterior_normalized(self):
        cw = [[0, 0], [0, 1], [1, 1], [1, 0], [0, 0]]
        assert shoelace([tuple(p) for p in cw]) < 0
        layer = parse_geojson(fc(feat({"type": "Polygon", "coordinates": [cw]})))
        ext = layer.features[0].geometry.exterior
        assert shoelace(ext.as_tuples()) > 0

    def test_hole_winding_normalized(self):
        # Hole given CCW must come out CW.
        coords = [
            [[0, 0], [4, 0], [4, 4], [0, 4], [0, 0]],
            [[1, 1], [3, 1], [3, 3], [1, 3], [1, 1]],
        ]
        layer = parse_geojson(fc(feat({"type": "Polygon", "coordinates": coords})))
        hole = layer.features[0].geometry.holes[0]
        assert shoelace(hole.as_tuples()) < 0

    def test_not_json(self):
        with pytest.raises(MalformedJson):
            parse_geojson(b"not json")

    def test_geometry_collection_unsupported(self):
        body = fc(feat({"type": "GeometryCollection", "geometries": []}))
        with pytest.raises(UnsupportedGeometry):
            parse_geojson(body)

    def test_top_level_must_be_feature_collection(self):
        with pytest.raises(MalformedJson):
            parse_geojson(json.dumps({"type": "Feature"}).encode())

    def test_coordinate_out_of_range(self):
        with pytest.raises(CoordinateOutOfRange):
            parse_geojson(fc(feat({"type": "Point", "coordinates": [200, 0]})))

    def test_nan_rejected(self):
        body = b'{"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[NaN,0]},"properties":{}}]}'
        with pytest.raises(MalformedJson):
            parse_geojson(body)

    def test_nested_attributes_rejected(self):
        body = fc(feat({"type": "Point", "coordinates": [0, 0]}, {"nested": {"a": 1}}))
        with pytest.raises(MalformedJson):
            parse_geojson(body)

    def test_crs_mismatch_rejected(self):
        doc = {"type": "FeatureCollection", "crs": "EPSG:3857", "features": []}
        with pytest.raises(MalformedJson):
            parse_geojson(json.dumps(doc).encode())

    def test_duplicate_consecutive_points_rejected(self):
        ring = [[0, 0], [1, 0], [1, 0], [1, 1], [0, 0]]
        with pytest.raises(InvalidRing):
            parse_geojson(fc(feat({"type": "Polygon", "coordinates": [ring]})))

    def test_self_intersecting_bowtie_rejected(self):
        bow = [[0, 0], [1, 1], [1, 0], [0, 1], [0, 0]]
        assert brute_force_self_intersects([tuple(p) for p in bow])
        with pytest.raises(InvalidRing):
            parse_geojson(fc(feat({"type": "Polygon", "coordinates": [bow]})))

    def test_parse_errors_deterministic(self):
        bodies = [
            b"not json",
            fc(feat({"type": "Polygon", "coordinates": [[[0, 0], [1, 0], [1, 1]]]})),
            fc(feat({"type": "Point", "coordinates": [200, 0]})),
        ]
        for body in bodies:
            first = second = None
            try:
                parse_geojson(body)
            except Exception as exc:  # noqa: BLE001 - capturing variant identity
                first = (type(exc), str(exc))
            try:
                parse_geojson(body)
            except Exception as exc:  # noqa: BLE001
                second = (type(exc), str(exc))
            assert first == second and first is not None

    def test_name_defaulting(self):
        body = fc(feat({"type": "Point", "coordinates": [0, 0]}))
        assert parse_geojson(body).name == "layer"
        assert parse_geojson(body, default_name="mine").name == "mine"
        named = json.dumps(
            {"type": "FeatureCollection", "name": "doc", "features": []}
        ).encode()
        assert parse_geojson(named, default_name="ignored").name == "doc"


class TestWrite:
    def test_roundtrip_identity(self):
        layer = parse_geojson(fc(feat({"type": "Point", "coordinates": [1.0, 2.0]})))
        data = write_geojson(layer)
        assert parse_geojson(data) == layer

    def test_serialization_deterministic(self):
        layer = parse_geojson(
            fc(feat({"type": "Point", "coordinates": [1.5, -2.25]}, {"b": 1, "a": "x"}))
        )
        assert write_geojson(layer) == write_geojson(layer)

    def test_key_order_and_whitespace(self):
        layer = Layer(name="n", features=[Feature(Point(Coordinate(1.0, 2.0)), {"z": 1, "a": 2})])
        text = write_geojson(layer).decode()
        assert text.startswith('{"type":"FeatureCollection","name":"n","crs":"EPSG:4326","features":[')
        assert '"properties":{"a":2,"z":1}' in text
        assert " " not in text

    def test_shortest_roundtrip_floats(self):
        layer = Layer(name="n", features=[Feature(Point(Coordinate(0.1, 1.0)))])
        assert b"[0.1,1.0]" in write_geojson(layer)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.floats(-180, 180, allow_nan=False).map(lambda v: round(v, 7)),
                st.floats(-90, 90, allow_nan=False).map(lambda v: round(v, 7)),
            ),
            min_size=1,
            max_size=6,
        ),
        st.dictionaries(
            st.text(min_size=1, max_size=8),
            st.one_of(
                st.integers(-10**6, 10**6),
                st.floats(-1e6, 1e6, allow_nan=False),
                st.text(max_size=12),
                st.booleans(),
                st.none(),
            ),
            max_size=4,
        ),
    )
    def test_roundtrip_property(self, coords, attrs):
        features = [Feature(Point(Coordinate(x, y)), dict(attrs)) for x, y in coords]
        if len(coords) >= 2:
            features.append(Feature(LineString(tuple(Coordinate(x, y) for x, y in coords))))
        layer = Layer(name="prop", features=features)
        again = parse_geojson(write_geojson(layer))
        assert again == layer
        assert write_geojson(again) == write_geojson(layer)


class TestValidate:
    def test_valid_layer_empty_report(self):
        layer = Layer(name="ok", features=[Feature(square(0, 0, 1, 1))])
        assert validate_layer(layer).ok

    def test_out_of_range_violation(self):
        layer = Layer(name="bad", features=[Feature(Point(Coordinate(200.0, 0.0)))])
        report = validate_layer(layer)
        assert len(report.violations) == 1
        v = report.violations[0]
        assert v.feature_index == 0 and v.rule == "CoordinateOutOfRange"

    def test_bowtie_violation(self):
        pts = [(0, 0), (1, 1), (1, 0), (0, 1), (0, 0)]
        ring = LinearRing(tuple(Coordinate(x, y) for x, y in pts))
        report = validate_layer(Layer(name="bow", features=[Feature(Polygon(ring))]))
        assert any(v.rule == "SelfIntersection" for v in report.violations)

    def test_winding_violation_flagged(self):
        cw = square(0, 0, 1, 1).exterior.reversed()
        report = validate_layer(Layer(name="w", features=[Feature(Polygon(cw))]))
        assert any(v.rule == "WindingOrder" for v in report.violations)

    def test_hole_outside_exterior(self):
        outer = square(0, 0, 1, 1).exterior
        hole = square(5, 5, 6, 6).exterior.reversed()
        report = validate_layer(Layer(name="h", features=[Feature(Polygon(outer, (hole,)))]))
        assert any(v.rule == "HoleOutsideExterior" for v in report.violations)


class TestNormalize:
    def test_idempotent(self):
        cw_poly = Polygon(square(0, 0, 1, 1).exterior.reversed())
        layer = Layer(name="n", features=[Feature(cw_poly)])
        once = normalize_layer(layer)
        twice = normalize_layer(once)
        assert once == twice
        assert write_geojson(once) == write_geojson(twice)


class TestBBox:
    def test_unit_square(self):
        assert compute_bbox(square(0, 0, 1, 1)) == BBox(0, 0, 1, 1)

    def test_point_degenerate(self):
        assert compute_bbox(Point(Coordinate(3.0, 4.0))) == BBox(3, 4, 3, 4)

    def test_multipolygon(self):
        mp = MultiPolygon((square(0, 0, 1, 1), square(2, 2, 3, 3)))
        assert compute_bbox(mp) == BBox(0, 0, 3, 3)

    def test_layer_bbox_matches_brute_force(self):
        import random

        rng = random.Random(7)
        features = [
            Feature(Point(Coordinate(round(rng.uniform(-170, 170), 5), round(rng.uniform(-80, 80), 5))))
            for _ in range(40)
        ]
        layer = Layer(name="pts", features=features)
        xs = [f.geometry.coordinate.x for f in features]
        ys = [f.geometry.coordinate.y for f in features]
        assert layer_bbox(layer) == BBox(min(xs), min(ys), max(xs), max(ys))
