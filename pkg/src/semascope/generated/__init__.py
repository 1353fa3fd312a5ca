"""Committed generated typed-syntax modules."""
