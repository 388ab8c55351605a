"""Shared store for per-criterion acceptance results."""

RESULTS: dict[int, tuple[bool, str, str]] = {}
