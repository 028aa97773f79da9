"""Areas, containment, simplification, quantization, queries, sampling."""

import random
from decimal import Decimal

import numpy as np
import pytest

from mrfog.geo_model import (
    BBox,
    Coordinate,
    Feature,
    Layer,
    LinearRing,
    MultiPolygon,
    Point,
    Polygon,
    UnsupportedGeometry,
    compute_bbox,
)
from mrfog.geo_ops import (
    DegenerateAfterQuantization,
    OverlayOp,
    bbox_query,
    layer_area,
    membership_mask,
    monte_carlo_area,
    overlay_layers,
    point_in_multipolygon,
    point_in_polygon,
    polygon_area,
    quantize_geometry,
    ring_area_signed,
    simplify_chain,
)

from conftest import square
from geomgen import random_polyline, star_polygon


def ring(*pts) -> LinearRing:
    return LinearRing(tuple(Coordinate(x, y) for x, y in pts))


class TestAreas:
    def test_unit_square_ccw(self):
        assert ring_area_signed(square(0, 0, 1, 1).exterior) == 1.0

    def test_reversed_square_cw(self):
        assert ring_area_signed(square(0, 0, 1, 1).exterior.reversed()) == -1.0

    def test_right_triangle(self):
        tri = ring((0, 0), (4, 0), (0, 3), (0, 0))
        assert ring_area_signed(tri) == 6.0

    def test_polygon_area_plain(self):
        assert polygon_area(square(0, 0, 1, 1)) == 1.0

    def test_polygon_area_with_hole(self):
        hole = square(0.25, 0.25, 0.75, 0.75).exterior.reversed()
        assert polygon_area(Polygon(square(0, 0, 1, 1).exterior, (hole,))) == 0.75


class TestPointInPolygon:
    def test_inside(self):
        assert point_in_polygon(Coordinate(0.5, 0.5), square(0, 0, 1, 1))

    def test_outside(self):
        assert not point_in_polygon(Coordinate(1.5, 0.5), square(0, 0, 1, 1))

    def test_boundary_counts_inside(self):
        assert point_in_polygon(Coordinate(1.0, 0.5), square(0, 0, 1, 1))
        assert point_in_polygon(Coordinate(0.0, 0.0), square(0, 0, 1, 1))

    def test_inside_hole_is_outside(self):
        hole = square(0.25, 0.25, 0.75, 0.75).exterior.reversed()
        holey = Polygon(square(0, 0, 1, 1).exterior, (hole,))
        assert not point_in_polygon(Coordinate(0.5, 0.5), holey)
        # Hole boundary is region boundary, so it counts inside.
        assert point_in_polygon(Coordinate(0.25, 0.5), holey)


class TestSimplify:
    def test_collinear_midpoint_dropped(self):
        pts = [Coordinate(0, 0), Coordinate(1, 0), Coordinate(2, 0)]
        out = simplify_chain(pts, 0.1)
        assert [(p.x, p.y) for p in out] == [(0, 0), (2, 0)]

    def test_apex_kept_below_epsilon(self):
        pts = [Coordinate(0, 0), Coordinate(1, 1), Coordinate(2, 0)]
        assert len(simplify_chain(pts, 0.5)) == 3

    def test_apex_dropped_above_epsilon(self):
        pts = [Coordinate(0, 0), Coordinate(1, 1), Coordinate(2, 0)]
        out = simplify_chain(pts, 1.5)
        assert [(p.x, p.y) for p in out] == [(0, 0), (2, 0)]

    def test_zero_epsilon_returns_input(self):
        pts = [Coordinate(0, 0), Coordinate(1, 0), Coordinate(2, 0)]
        assert simplify_chain(pts, 0.0) == pts

    def test_ring_floor_of_four_points(self):
        sq = square(0, 0, 1e-3, 1e-3).exterior
        out = simplify_chain(list(sq.points), 10.0)
        assert len(out) >= 4
        assert out[0] == out[-1]

    def test_removed_points_stay_within_epsilon(self):
        rng = random.Random(77)
        for _ in range(25):
            pts = random_polyline(rng, rng.randint(10, 60))
            for eps in (1e-4, 1e-2):
                out = simplify_chain(pts, eps)
                kept = {(p.x, p.y) for p in out}
                chain = [(p.x, p.y) for p in out]
                from mrfog._geom import point_to_segment_distance

                for p in pts:
                    if (p.x, p.y) in kept:
                        continue
                    d = min(
                        point_to_segment_distance((p.x, p.y), chain[i], chain[i + 1])
                        for i in range(len(chain) - 1)
                    )
                    assert d <= eps


class TestQuantize:
    def test_rounding_examples(self):
        assert quantize_geometry(Point(Coordinate(12.3456789, 0.0)), 4).coordinate.x == 12.3457
        assert quantize_geometry(Point(Coordinate(12.3456789, 0.0)), 0).coordinate.x == 12.0

    def test_half_away_from_zero(self):
        assert quantize_geometry(Point(Coordinate(0.05, -0.05)), 1).coordinate == Coordinate(0.1, -0.1)

    def test_idempotent_on_random_geometry(self):
        rng = random.Random(5)
        for _ in range(20):
            poly = star_polygon(rng, 0.0, 0.0, 1.0, 2.0)
            once = quantize_geometry(poly, 5)
            assert quantize_geometry(once, 5) == once

    def test_error_bound_decimal_exact(self):
        rng = random.Random(6)
        for _ in range(200):
            value = rng.uniform(-180.0, 180.0)
            for decimals in (0, 2, 5, 9):
                q = quantize_geometry(Point(Coordinate(value, 0.0)), decimals).coordinate.x
                err = abs(Decimal(repr(value)) - Decimal(repr(q)))
                assert err <= Decimal(1).scaleb(-decimals) / 2

    def test_collapse_rejected(self):
        tiny = square(0, 0, 1e-4, 1e-4)
        with pytest.raises(DegenerateAfterQuantization):
            quantize_geometry(tiny, 2)

    def test_decimals_validated(self):
        with pytest.raises(ValueError):
            quantize_geometry(Point(Coordinate(0, 0)), 10)


class TestBBoxQuery:
    def make_layer(self):
        return Layer(
            name="q",
            features=[Feature(square(0, 0, 1, 1), {"i": 0}), Feature(square(4, 4, 5, 5), {"i": 1})],
        )

    def test_overlapping_box_included(self):
        out = bbox_query(self.make_layer(), BBox(0.5, 0.5, 2, 2))
        assert [f.attributes["i"] for f in out.features] == [0]

    def test_disjoint_box_empty(self):
        assert bbox_query(self.make_layer(), BBox(2, 2, 3, 3)).features == []

    def test_edge_touching_included(self):
        out = bbox_query(self.make_layer(), BBox(1, 0, 2, 1))
        assert [f.attributes["i"] for f in out.features] == [0]

    def test_fresh_layer_id(self):
        layer = self.make_layer()
        assert bbox_query(layer, BBox(-10, -10, 10, 10)).layer_id != layer.layer_id

    def test_matches_brute_force(self):
        rng = random.Random(11)
        features = [
            Feature(square(x, y, x + rng.uniform(0.1, 2), y + rng.uniform(0.1, 2)))
            for x, y in ((rng.uniform(-10, 10), rng.uniform(-10, 10)) for _ in range(60))
        ]
        layer = Layer(name="rand", features=features)
        box = BBox(-3, -3, 3, 3)
        expected = [f for f in features if compute_bbox(f.geometry).intersects(box)]
        assert bbox_query(layer, box).features == expected


class TestMonteCarlo:
    def test_unit_square_estimate(self):
        est = monte_carlo_area(MultiPolygon((square(0, 0, 1, 1),)), BBox(0, 0, 2, 2), 100_000, 42)
        assert abs(est - 1.0) <= 0.02  # 3 sigma for p=0.25 at n=1e5

    def test_empty_shape_exact_zero(self):
        assert monte_carlo_area(MultiPolygon(()), BBox(0, 0, 2, 2), 1000, 7) == 0.0

    def test_shape_equals_box_exact(self):
        shape = MultiPolygon((square(0, 0, 2, 2),))
        assert monte_carlo_area(shape, BBox(0, 0, 2, 2), 1000, 7) == 4.0

    def test_deterministic(self):
        shape = MultiPolygon((square(0, 0, 1, 1),))
        a = monte_carlo_area(shape, BBox(0, 0, 2, 2), 10_000, 3)
        b = monte_carlo_area(shape, BBox(0, 0, 2, 2), 10_000, 3)
        assert a == b

    def test_vectorized_matches_scalar_predicate(self):
        rng = random.Random(13)
        hole = square(0.25, 0.25, 0.75, 0.75).exterior.reversed()
        shape = MultiPolygon((Polygon(square(0, 0, 1, 1).exterior, (hole,)), square(2, 0, 3, 1)))
        xs = np.array([rng.uniform(-0.5, 3.5) for _ in range(500)])
        ys = np.array([rng.uniform(-0.5, 1.5) for _ in range(500)])
        mask = membership_mask(xs, ys, shape)
        for i in range(500):
            assert bool(mask[i]) == point_in_multipolygon(Coordinate(float(xs[i]), float(ys[i])), shape)


class TestOverlayLayers:
    def test_intersection_merges_attributes(self):
        la = Layer(name="A", features=[Feature(square(0, 0, 1, 1), {"m": "iron"})])
        lb = Layer(name="B", features=[Feature(square(0.5, 0.5, 1.5, 1.5), {"s": "S1"})])
        out, stats = overlay_layers(la, lb, OverlayOp.INTERSECTION)
        assert out.features[0].attributes == {"a_m": "iron", "b_s": "S1"}
        assert stats.output_area == pytest.approx(0.25, abs=1e-12)
        assert stats.output_feature_count == 1
        assert out.name == "A_intersection_B"

    def test_self_intersection_preserves_area(self):
        la = Layer(name="A", features=[Feature(square(0, 0, 1, 1)), Feature(square(3, 3, 4, 4))])
        out, stats = overlay_layers(la, la, OverlayOp.INTERSECTION)
        assert abs(stats.output_area - layer_area(la)) < 1e-9

    def test_intersection_with_empty_layer(self):
        la = Layer(name="A", features=[Feature(square(0, 0, 1, 1))])
        out, stats = overlay_layers(la, Layer(name="E"), OverlayOp.INTERSECTION)
        assert out.features == []
        assert stats.output_area == 0.0

    def test_union_dissolves_to_single_feature(self):
        la = Layer(name="A", features=[Feature(square(0, 0, 1, 1)), Feature(square(0.5, 0, 1.5, 1))])
        lb = Layer(name="B", features=[Feature(square(4, 4, 5, 5))])
        out, stats = overlay_layers(la, lb, OverlayOp.UNION)
        assert len(out.features) == 1
        assert out.features[0].attributes == {"source_a": "A", "source_b": "B", "op": "union"}
        assert stats.output_area == pytest.approx(2.5, abs=1e-9)

    def test_difference_dissolves(self):
        la = Layer(name="A", features=[Feature(square(0, 0, 2, 1))])
        lb = Layer(name="B", features=[Feature(square(0, 0, 1, 1)), Feature(square(1, 0, 2, 1))])
        out, stats = overlay_layers(la, lb, OverlayOp.DIFFERENCE)
        assert out.features == []
        assert stats.output_area == 0.0

    def test_non_areal_rejected(self):
        la = Layer(name="A", features=[Feature(Point(Coordinate(0, 0)))])
        with pytest.raises(UnsupportedGeometry):
            overlay_layers(la, la, OverlayOp.INTERSECTION)

    def test_pairwise_output_order(self):
        la = Layer(
            name="A",
            features=[Feature(square(0, 0, 1, 1), {"i": 0}), Feature(square(0, 0, 1, 1), {"i": 1})],
        )
        lb = Layer(
            name="B",
            features=[Feature(square(0, 0, 1, 1), {"j": 0}), Feature(square(0, 0, 1, 1), {"j": 1})],
        )
        out, _ = overlay_layers(la, lb, OverlayOp.INTERSECTION)
        order = [(f.attributes["a_i"], f.attributes["b_j"]) for f in out.features]
        assert order == [(0, 0), (0, 1), (1, 0), (1, 1)]
