"""Canonical flat names for structured identifiers (points, morphisms,
edges) used by reports and serialized documents."""

from __future__ import annotations


def canonical_label(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, tuple):
        return "(" + ",".join(canonical_label(v) for v in value) + ")"
    if isinstance(value, frozenset):
        return "{" + ",".join(sorted(canonical_label(v) for v in value)) + "}"
    return str(value)
