"""Shared error types and tolerance scaling."""

from __future__ import annotations

import os


class NumericalGateError(RuntimeError):
    """A numerical acceptance gate failed (distinct from bad input)."""


def tol_scale() -> float:
    """Global tolerance multiplier from PHASELAB_TOL_SCALE (default 1)."""
    raw = os.environ.get("PHASELAB_TOL_SCALE", "1")
    try:
        val = float(raw)
    except ValueError as exc:
        raise ValueError(f"PHASELAB_TOL_SCALE={raw!r} is not a number") from exc
    if val <= 0:
        raise ValueError("PHASELAB_TOL_SCALE must be positive")
    return val
