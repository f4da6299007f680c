"""Initial curves: the lambda families and the oracle shapes."""

import numpy as np

from csf.models.curve import DiscreteCurve
from csf.models.family import FamilyName, FamilySpec, lambda_in_range
from csf.types import FloatArray

# Parameter of the trigonometric family that yields a shrinking three-loop
TRIG_THREE_LOOP_LAMBDA = 0.48185154


class FamilyParameterError(ValueError):
    """Raised when a family parameter is outside its valid range."""

    pass


def _grid(n_points: int, offset: float = 0.0) -> FloatArray:
    return 2.0 * np.pi * (np.arange(n_points) + offset) / n_points


def _curve(x: FloatArray, y: FloatArray) -> DiscreteCurve:
    return DiscreteCurve(vertices=np.column_stack([x, y]))


def _require_lambda(family: FamilyName, value: float) -> None:
    if not lambda_in_range(family, value):
        raise FamilyParameterError(f"lambda={value} is outside the range of {family}")


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise FamilyParameterError(f"{name} must be positive, got {value}")


def l_lambda(lam: float, n_points: int) -> DiscreteCurve:
    """L(u) = (cos u, (cos^2 u - lam^2) sin u): two ears and an eye for 0 < lam < 1."""
    _require_lambda(FamilyName.L_LAMBDA, lam)
    u = _grid(n_points)
    return _curve(np.cos(u), (np.cos(u) ** 2 - lam**2) * np.sin(u))


def m_lambda(lam: float, n_points: int) -> DiscreteCurve:
    """Four-loop y = +-x (x^2 - lam^2) sqrt(1 - x^2): two ears, two eyes.

    Traversed as M(u) = (cos u, cos u (cos^2 u - lam^2) sin u). The profile is
    odd in x and vanishes at x = 0, +-lam, +-1, so the curve crosses itself at
    (-lam, 0), (0, 0) and (lam, 0). The half-step grid keeps vertices off
    the crossing at the origin.
    """
    _require_lambda(FamilyName.M_LAMBDA, lam)
    u = _grid(n_points, offset=0.5)
    x = np.cos(u)
    return _curve(x, x * (x**2 - lam**2) * np.sin(u))


def trig_three_loop(lam: float, n_points: int) -> DiscreteCurve:
    """x = sin t, y = (1 - lam (2 + sin^2 t)) cos t; a three-loop for 1/3 < lam < 1/2.

    Crossings sit at (+-sqrt(1/lam - 2), 0). Above 1/2 the curve is embedded,
    which lets a bisection bracket reach past the three-loop range.
    """
    _require_lambda(FamilyName.TRIG_THREE_LOOP, lam)
    theta = _grid(n_points)
    s = np.sin(theta)
    return _curve(s, (1.0 - lam * (2.0 + s**2)) * np.cos(theta))


def circle(radius: float, n_points: int) -> DiscreteCurve:
    _require_positive(radius=radius)
    u = _grid(n_points)
    return _curve(radius * np.cos(u), radius * np.sin(u))


def ellipse(a: float, b: float, n_points: int) -> DiscreteCurve:
    _require_positive(a=a, b=b)
    u = _grid(n_points)
    return _curve(a * np.cos(u), b * np.sin(u))


def figure_eight(n_points: int) -> DiscreteCurve:
    """(sin u, sin u cos u), point-symmetric through its crossing at the origin."""
    u = _grid(n_points, offset=0.5)
    return _curve(np.sin(u), np.sin(u) * np.cos(u))


def limacon(b: float, n_points: int) -> DiscreteCurve:
    """Polar r = b + cos t; for 0 < b < 1 an inner loop sits inside the outer one."""
    _require_lambda(FamilyName.LIMACON, b)
    theta = _grid(n_points, offset=0.5)
    r = b + np.cos(theta)
    return _curve(r * np.cos(theta), r * np.sin(theta))


def build_curve(spec: FamilySpec) -> DiscreteCurve:
    """Construct the initial curve a spec describes."""
    n = spec.n_points
    lam = spec.lambda_ if spec.lambda_ is not None else 0.0
    match spec.family:
        case FamilyName.L_LAMBDA:
            return l_lambda(lam, n)
        case FamilyName.M_LAMBDA:
            return m_lambda(lam, n)
        case FamilyName.TRIG_THREE_LOOP:
            return trig_three_loop(lam, n)
        case FamilyName.LIMACON:
            return limacon(lam, n)
        case FamilyName.CIRCLE:
            return circle(spec.radius, n)
        case FamilyName.ELLIPSE:
            return ellipse(spec.a, spec.b, n)
        case FamilyName.FIGURE_EIGHT:
            return figure_eight(n)
    raise FamilyParameterError(f"unknown family {spec.family}")


def expected_loops(family: FamilyName) -> int:
    """Loop count n the family is designed around (crossings = n - 1)."""
    return {
        FamilyName.L_LAMBDA: 3,
        FamilyName.M_LAMBDA: 4,
        FamilyName.TRIG_THREE_LOOP: 3,
        FamilyName.FIGURE_EIGHT: 2,
        FamilyName.LIMACON: 2,
        FamilyName.CIRCLE: 1,
        FamilyName.ELLIPSE: 1,
    }[family]
