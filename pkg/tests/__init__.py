"""csf-loops tests."""
