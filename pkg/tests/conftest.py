import sys
from pathlib import Path

import pytest

# Make sibling test helpers (geomgen) importable regardless of rootdir.
sys.path.insert(0, str(Path(__file__).parent))

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def square(x0: float, y0: float, x1: float, y1: float):
    """Axis-aligned CCW square polygon; handy in many tests."""
    from mrfog.geo_model import Coordinate, LinearRing, Polygon

    pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    return Polygon(LinearRing(tuple(Coordinate(x, y) for x, y in pts)))
