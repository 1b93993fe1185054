"""Thickness of the unit square seen from a boundary point, and the resulting
general perimeter/area bound for unions of arbitrarily rotated unit squares.

The boundary point is p = (x, 0) on the bottom edge of [0, 1]^2 and theta is
the direction of the chord measured from the positive x axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .geometry import DomainError

TWO_PI = 2.0 * math.pi
GENERAL_BOUND_CAP = 5.6


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


def acot(t: float) -> float:
    """Inverse cotangent with values in (0, pi), so acot(0) = pi/2."""
    return math.atan2(1.0, t)


def _check_x(x: float, upper_open: bool = False) -> None:
    if not math.isfinite(x) or x < 0.0 or x > 1.0 or (upper_open and x >= 1.0):
        span = "[0, 1)" if upper_open else "[0, 1]"
        raise DomainError(f"boundary parameter x={x!r} outside {span}")


def breakpoints(x: float) -> tuple:
    """Directions where the chord from (x, 0) hits a corner: (1, 1) and (0, 1)."""
    _check_x(x)
    return acot(1.0 - x), math.pi - acot(x)


def l_star(x: float, theta: float) -> float:
    """Length of the chord from (x, 0) into the unit square in direction theta."""
    _check_x(x)
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= math.pi:
        return 0.0
    b1, b2 = breakpoints(x)
    if theta <= b1:
        return (1.0 - x) / math.cos(theta)
    if theta <= b2:
        return 1.0 / math.sin(theta)
    return -x / math.cos(theta)


def tau_star(x: float, theta: float) -> float:
    """Chord length times the sine of its angle with the bottom edge."""
    _check_x(x)
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= math.pi:
        return 0.0
    b1, b2 = breakpoints(x)
    if theta <= b1:
        return (1.0 - x) * math.tan(theta)
    if theta <= b2:
        return 1.0
    return -x * math.tan(theta)


def T_star_closed(x: float) -> float:
    """Closed form for the full-angle thickness integral, exactly as published.

    It is correct at x = 0 (the only value the bound uses) and at x = 1/2, but
    the two tangent branches are missing their (1 - x) and x factors, so away
    from those points it disagrees with the integral. `T_star_exact` is the
    corrected expression.
    """
    _check_x(x, upper_open=True)
    u = 1.0 - x
    return 0.5 * math.log(1.0 + u * u) - math.log(u) + math.pi - acot(u) - acot(x)


def _tan_branch(u: float) -> float:
    # integral of u*tan over [0, acot(u)]; tends to 0 as u -> 0
    if u == 0.0:
        return 0.0
    return u * (0.5 * math.log1p(u * u) - math.log(u))


def T_star_exact(x: float) -> float:
    """Full-angle thickness integral in closed form; symmetric under x -> 1 - x."""
    _check_x(x)
    return _tan_branch(1.0 - x) + _tan_branch(x) + math.pi - acot(1.0 - x) - acot(x)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float,
                     max_depth: int = 60) -> tuple:
    """Adaptive Simpson quadrature with Richardson correction.

    Returns (value, error_estimate). Raises QuadratureError when a panel
    cannot meet its share of `tol` within `max_depth` bisections.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if b == a:
        return 0.0, 0.0

    def simpson(lo, flo, hi, fhi):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        return mid, fmid, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    fa, fb = f(a), f(b)
    m, fm, whole = simpson(a, fa, b, fb)
    stack = [(a, fa, b, fb, m, fm, whole, tol, 0)]
    total = 0.0
    err = 0.0
    while stack:
        lo, flo, hi, fhi, mid, fmid, s, eps, depth = stack.pop()
        lm, flm, left = simpson(lo, flo, mid, fmid)
        rm, frm, right = simpson(mid, fmid, hi, fhi)
        delta = left + right - s
        if abs(delta) <= 15.0 * eps or hi - lo < 1e-15 * max(1.0, abs(lo)):
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
        elif depth >= max_depth:
            raise QuadratureError(f"no convergence on [{lo!r}, {hi!r}]", err + abs(delta) / 15.0)
        else:
            stack.append((lo, flo, mid, fmid, lm, flm, left, 0.5 * eps, depth + 1))
            stack.append((mid, fmid, hi, fhi, rm, frm, right, 0.5 * eps, depth + 1))
    return total, err


def T_star_numeric(x: float, tol: float = 1e-9) -> float:
    """Integrate tau_star over [0, pi], one panel per smooth branch."""
    _check_x(x, upper_open=True)
    b1, b2 = breakpoints(x)
    u = 1.0 - x
    panels = [
        (lambda t: u * math.tan(t), 0.0, b1),
        (lambda t: 1.0, b1, b2),
        (lambda t: -x * math.tan(t), b2, math.pi),
    ]
    total = 0.0
    for f, lo, hi in panels:
        if hi > lo:
            value, _ = adaptive_simpson(f, lo, hi, tol / 3.0)
            total += value
    return total


def gyenes_bound() -> float:
    """2*pi / T*(0) = 2*pi / (ln(2)/2 + pi/4), the general ratio bound."""
    value = TWO_PI / T_star_closed(0.0)
    if value > GENERAL_BOUND_CAP:
        raise ArithmeticError(f"general bound {value} exceeds {GENERAL_BOUND_CAP}")
    return value


@dataclass(frozen=True)
class ThicknessProfile:
    x: float
    breakpoints: tuple
    closed_form_T: float
    numeric_T: float
    exact_T: float

    @property
    def published_gap(self) -> float:
        return abs(self.closed_form_T - self.numeric_T)

    @property
    def exact_gap(self) -> float:
        return abs(self.exact_T - self.numeric_T)


def thickness_profile(x: float, tol: float = 1e-9) -> ThicknessProfile:
    return ThicknessProfile(x, breakpoints(x), T_star_closed(x), T_star_numeric(x, tol), T_star_exact(x))
