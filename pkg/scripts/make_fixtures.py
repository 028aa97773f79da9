#!/usr/bin/env python3
"""Generate the bundled synthetic fixtures and record their oracle values.

Deterministic: fixed seeds, canonical serialization, so regenerating yields
byte-identical files.  Writes:

    fixtures/states_fixture.geojson    6 administrative polygons tiling a
                                       rectangle with shared wavy borders
    fixtures/minerals_fixture.geojson  30 mineral-occurrence polygons with
                                       mineral/tonnage attributes
    fixtures/bench_fixture.geojson     >= 1 MiB coordinate-heavy payload
    tests/data/fixture_expectations.json   digests and oracle-run values

The recorded minerals-by-states intersection count is derived from an exact
boundary-contact predicate (vertex containment + pairwise segment tests),
not from the overlay engine, so it can serve as an independent check.
Minerals whose contact with any state is marginal (touching or overlapping
by less than 2% of the mineral's area) are resampled until every pair is
clearly disjoint or clearly overlapping.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from mrfog import _geom  # noqa: E402
from mrfog.codec import deflate  # noqa: E402
from mrfog.geo_model import (  # noqa: E402
    Coordinate,
    Feature,
    Layer,
    LinearRing,
    MultiPolygon,
    Polygon,
    compute_bbox,
    validate_layer,
    write_geojson,
)
from mrfog.geo_ops import monte_carlo_area, monte_carlo_overlay_area, OverlayOp  # noqa: E402
from mrfog.geo_ops import multipolygon_area, polygon_area  # noqa: E402

REGION_X = (76.0, 84.0)
REGION_Y = (18.0, 24.0)
COLS, ROWS = 3, 2
WAVE_POINTS = 35
WAVE_AMPLITUDE = 0.22
MINERAL_COUNT = 30
MINERALS = ["bauxite", "iron_ore", "coal", "copper", "manganese", "limestone"]
SOLID_OVERLAP = 0.02  # fraction of mineral area below which contact is "marginal"


def rnd6(v: float) -> float:
    return round(v, 6)


def wavy_line(rng: random.Random, p0, p1, vertical: bool) -> list:
    """Polyline from p0 to p1 with a sine offset perpendicular to its axis;
    offset vanishes at the endpoints so shared corners stay exact."""
    amplitude = rng.uniform(0.6, 1.0) * WAVE_AMPLITUDE
    frequency = rng.randint(2, 4)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    pts = [p0]
    for k in range(1, WAVE_POINTS + 1):
        t = k / (WAVE_POINTS + 1)
        x = p0[0] + t * (p1[0] - p0[0])
        y = p0[1] + t * (p1[1] - p0[1])
        offset = amplitude * math.sin(math.pi * t) * math.cos(2.0 * math.pi * frequency * t + phase)
        if vertical:
            x += offset
        else:
            y += offset
        pts.append((rnd6(x), rnd6(y)))
    pts.append(p1)
    return pts


def build_states(rng: random.Random) -> Layer:
    xs = [rnd6(REGION_X[0] + c * (REGION_X[1] - REGION_X[0]) / COLS) for c in range(COLS + 1)]
    ys = [rnd6(REGION_Y[0] + r * (REGION_Y[1] - REGION_Y[0]) / ROWS) for r in range(ROWS + 1)]

    # Shared borders: verticals[c][r] runs bottom-to-top, horizontals[c][r]
    # left-to-right; interior borders get waves, the outer frame stays straight.
    verticals = {}
    for c in range(COLS + 1):
        for r in range(ROWS):
            p0, p1 = (xs[c], ys[r]), (xs[c], ys[r + 1])
            if 0 < c < COLS:
                verticals[(c, r)] = wavy_line(rng, p0, p1, vertical=True)
            else:
                verticals[(c, r)] = [p0, p1]
    horizontals = {}
    for c in range(COLS):
        for r in range(ROWS + 1):
            p0, p1 = (xs[c], ys[r]), (xs[c + 1], ys[r])
            if 0 < r < ROWS:
                horizontals[(c, r)] = wavy_line(rng, p0, p1, vertical=False)
            else:
                horizontals[(c, r)] = [p0, p1]

    features = []
    for r in range(ROWS):
        for c in range(COLS):
            ring = []
            ring.extend(horizontals[(c, r)][:-1])                # bottom, west->east
            ring.extend(verticals[(c + 1, r)][:-1])              # east side, south->north
            ring.extend(reversed(horizontals[(c, r + 1)][1:]))   # top, east->west
            ring.extend(reversed(verticals[(c, r)][1:]))         # west side, north->south
            ring.append(ring[0])
            poly = Polygon(LinearRing(tuple(Coordinate(x, y) for x, y in ring)))
            features.append(Feature(poly, {"state": f"S{r * COLS + c + 1}"}))
    return Layer(name="states_fixture", features=features)


def build_minerals(rng: random.Random, states: Layer) -> Layer:
    state_rings = [f.geometry.exterior.as_tuples() for f in states.features]
    features = []
    while len(features) < MINERAL_COUNT:
        cx = rng.uniform(REGION_X[0] + 0.6, REGION_X[1] - 0.6)
        cy = rng.uniform(REGION_Y[0] + 0.6, REGION_Y[1] - 0.6)
        radius_lo = rng.uniform(0.15, 0.3)
        radius_hi = radius_lo + rng.uniform(0.05, 0.25)
        n = rng.randint(8, 14)
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
        if min(
            [angles[i + 1] - angles[i] for i in range(n - 1)]
            + [2.0 * math.pi - angles[-1] + angles[0]]
        ) <= 0.05:
            continue
        pts = []
        for a in angles:
            r = rng.uniform(radius_lo, radius_hi)
            pts.append((rnd6(cx + r * math.cos(a)), rnd6(cy + r * math.sin(a))))
        pts.append(pts[0])
        ring = pts
        if _geom.ring_self_intersects(ring):
            continue
        if not all_contacts_decisive(ring, state_rings):
            continue
        poly = Polygon(LinearRing(tuple(Coordinate(x, y) for x, y in ring)))
        features.append(
            Feature(
                poly,
                {
                    "mineral": rng.choice(MINERALS),
                    "tonnage": round(rng.uniform(50.0, 5000.0), 1),
                },
            )
        )
    return Layer(name="minerals_fixture", features=features)


def rings_touch(ring_a: list, ring_b: list) -> bool:
    """Exact closed-region contact test for two hole-free simple rings."""
    for p in ring_a[:-1]:
        if _geom.point_on_ring(p[0], p[1], ring_b) or _geom.point_in_ring_interior(
            p[0], p[1], ring_b
        ):
            return True
    for p in ring_b[:-1]:
        if _geom.point_on_ring(p[0], p[1], ring_a) or _geom.point_in_ring_interior(
            p[0], p[1], ring_a
        ):
            return True
    for i in range(len(ring_a) - 1):
        for j in range(len(ring_b) - 1):
            if _geom.segments_intersect(ring_a[i], ring_a[i + 1], ring_b[j], ring_b[j + 1]):
                return True
    return False


def sampled_overlap(ring_m: list, ring_s: list, n: int = 40_000, seed: int = 7) -> float:
    mp_m = MultiPolygon((Polygon(LinearRing(tuple(Coordinate(x, y) for x, y in ring_m))),))
    mp_s = MultiPolygon((Polygon(LinearRing(tuple(Coordinate(x, y) for x, y in ring_s))),))
    box = compute_bbox(mp_m)
    return monte_carlo_overlay_area(mp_m, mp_s, OverlayOp.INTERSECTION, box, n, seed)


def all_contacts_decisive(ring_m: list, state_rings: list) -> bool:
    area_m = abs(_geom.ring_signed_area(ring_m))
    for ring_s in state_rings:
        if rings_touch(ring_m, ring_s):
            if sampled_overlap(ring_m, ring_s) < SOLID_OVERLAP * area_m:
                return False
    return True


def build_bench(rng: random.Random) -> Layer:
    """Grid of small star polygons amounting to > 1 MiB of canonical text."""
    features = []
    cell = 0
    grid = 56  # 56 x 56 = 3136 features
    for gy in range(grid):
        for gx in range(grid):
            cx = REGION_X[0] + (gx + 0.5) * (REGION_X[1] - REGION_X[0]) / grid
            cy = REGION_Y[0] + (gy + 0.5) * (REGION_Y[1] - REGION_Y[0]) / grid
            n = 12
            angles = [(k + rng.uniform(0.15, 0.85)) * 2.0 * math.pi / n for k in range(n)]
            pts = []
            for a in angles:
                r = rng.uniform(0.02, 0.05)
                pts.append((rnd6(cx + r * math.cos(a)), rnd6(cy + r * math.sin(a))))
            pts.append(pts[0])
            poly = Polygon(LinearRing(tuple(Coordinate(x, y) for x, y in pts)))
            features.append(Feature(poly, {"cell": cell, "v": round(rng.uniform(0, 1000), 2)}))
            cell += 1
    return Layer(name="bench_fixture", features=features)


def main() -> None:
    fixtures = REPO / "fixtures"
    fixtures.mkdir(exist_ok=True)
    data_dir = REPO / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    rng = random.Random(20170401)
    states = build_states(rng)
    report = validate_layer(states)
    assert report.ok, report.as_json()
    minerals = build_minerals(random.Random(20170402), states)
    assert validate_layer(minerals).ok
    bench = build_bench(random.Random(20170403))
    assert validate_layer(bench).ok

    states_bytes = write_geojson(states)
    minerals_bytes = write_geojson(minerals)
    bench_bytes = write_geojson(bench)
    assert len(bench_bytes) >= 1 << 20, f"bench fixture only {len(bench_bytes)} bytes"

    (fixtures / "states_fixture.geojson").write_bytes(states_bytes)
    (fixtures / "minerals_fixture.geojson").write_bytes(minerals_bytes)
    (fixtures / "bench_fixture.geojson").write_bytes(bench_bytes)

    # Oracle runs recorded for the test suite.
    state_rings = [f.geometry.exterior.as_tuples() for f in states.features]
    mineral_rings = [f.geometry.exterior.as_tuples() for f in minerals.features]
    pair_count = sum(
        1
        for ring_m in mineral_rings
        for ring_s in state_rings
        if rings_touch(ring_m, ring_s)
    )

    s1 = states.features[0].geometry
    s1_box = compute_bbox(s1)
    s1_mc = monte_carlo_area(MultiPolygon((s1,)), s1_box, 1_000_000, 20170404)

    bench_deflate_len = len(deflate(bench_bytes))
    reduction = 100.0 * (1.0 - bench_deflate_len / len(bench_bytes))
    assert reduction >= 60.0, f"bench fixture deflate reduction only {reduction:.1f}%"

    expectations = {
        "states": {
            "sha256": hashlib.sha256(states_bytes).hexdigest(),
            "feature_count": len(states.features),
            "s1_monte_carlo_area": {
                "value": s1_mc,
                "n": 1_000_000,
                "seed": 20170404,
                "exact_area": polygon_area(s1),
            },
        },
        "minerals": {
            "sha256": hashlib.sha256(minerals_bytes).hexdigest(),
            "feature_count": len(minerals.features),
        },
        "bench": {
            "sha256": hashlib.sha256(bench_bytes).hexdigest(),
            "feature_count": len(bench.features),
            "original_len": len(bench_bytes),
            "deflate_len": bench_deflate_len,
            "deflate_reduction_pct": reduction,
        },
        "overlay": {
            "intersection_feature_count": pair_count,
        },
    }
    (data_dir / "fixture_expectations.json").write_text(
        json.dumps(expectations, indent=2) + "\n"
    )
    print(f"states:   {len(states_bytes):>9} bytes, {len(states.features)} features")
    print(f"minerals: {len(minerals_bytes):>9} bytes, {len(minerals.features)} features")
    print(f"bench:    {len(bench_bytes):>9} bytes, {len(bench.features)} features, "
          f"deflate reduction {reduction:.1f}%")
    print(f"expected minerals x states intersection features: {pair_count}")
    print(f"S1 exact area {polygon_area(s1):.6f} vs MC {s1_mc:.6f}")


if __name__ == "__main__":
    main()
