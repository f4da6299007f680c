"""Curve shortening flow utilities."""
