"""Perimeter/area ratios of finite unions of unit squares."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    BoundarySegment,
    Configuration,
    DomainError,
    GeometryError,
    Point,
    Region,
    UnitSquare,
    area,
    configuration,
    measure,
    monte_carlo_area,
    perimeter,
    ratio,
    square_polygon,
    union,
)
from .bounds import (  # noqa: E402
    QuadratureError,
    T_star_closed,
    T_star_exact,
    T_star_numeric,
    gyenes_bound,
    l_star,
    tau_star,
)
from .certify import (  # noqa: E402
    bump_step,
    classify_boundary_strips,
    rectangle_ratio_check,
    strip_bound,
    strip_certificate,
    verify_oriented,
)
from .explore import (  # noqa: E402
    OverlapProfile,
    centered_family,
    circle_union_check,
    clipped_square_pair,
    corner_triangle_delta,
    isoperimetric_removal_bound,
    optimality_filter,
    overlap_profile,
)
from .search import SearchReport, SearchSettings, search  # noqa: E402
