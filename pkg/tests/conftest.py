import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from shapely.geometry import Polygon
from shapely.ops import unary_union

from pacsquares.geometry import UnitSquare, configuration, square_polygon

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def shapely_measure(polys):
    """Independent union oracle: (perimeter, area) via shapely."""
    u = unary_union([Polygon(p) for p in polys])
    return u.length, u.area


def shapely_config(c):
    return shapely_measure([square_polygon(s) for s in c])


def random_oriented(rng, n, box=5.0, grid=None):
    pts = rng.uniform(0.0, box, (n, 2))
    if grid:
        pts = np.round(pts / grid) * grid
    return configuration([tuple(p) for p in pts], oriented=True)


def random_rotated(rng, n, box=3.0):
    return configuration([(*rng.uniform(-box, box, 2), rng.uniform(0, np.pi)) for _ in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit():
    return configuration([UnitSquare(0.0, 0.0)])


def random_step(rng, quarter_grid=False):
    """Random oriented base plus an axis-aligned square placed near it."""
    n = int(rng.integers(1, 9))
    base = random_oriented(rng, n, box=2.5, grid=0.25 if quarter_grid else None)
    anchor = base[int(rng.integers(n))]
    off = rng.uniform(-1.1, 1.1, 2)
    if quarter_grid:
        off = np.round(off * 4) / 4
    return base, UnitSquare(anchor.cx + off[0], anchor.cy + off[1])
