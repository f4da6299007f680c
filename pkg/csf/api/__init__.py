"""Curve shortening flow endpoints."""
