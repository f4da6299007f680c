"""Curve shortening flow simulator and shrinking n-loop experiment harness."""

from csf.types import Lambda, PointCount, Points

__version__ = "0.1.0"
__all__ = ["Lambda", "PointCount", "Points", "__version__"]
