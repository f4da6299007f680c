"""Curve shortening flow services."""
