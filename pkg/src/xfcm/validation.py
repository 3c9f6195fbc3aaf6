"""Small input-validation helpers used at module boundaries."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .errors import ValidationError


def check_real(value, name: str) -> float:
    """Coerce to float, rejecting NaN and infinities."""
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return v


def check_in_interval(value, name: str, lo: float, hi: float) -> float:
    v = check_real(value, name)
    if not lo <= v <= hi:
        raise ValidationError(f"{name} must lie in [{lo}, {hi}], got {v}")
    return v


def check_unit_interval(value, name: str) -> float:
    """Validate a realisation-like value in [-1, 1]."""
    return check_in_interval(value, name, -1.0, 1.0)


def check_positive(value, name: str) -> float:
    v = check_real(value, name)
    if v <= 0:
        raise ValidationError(f"{name} must be positive, got {v}")
    return v


def check_positive_int(value, name: str) -> int:
    try:
        v = int(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be an integer, got {value!r}") from exc
    if v < 1:
        raise ValidationError(f"{name} must be >= 1, got {v}")
    return v


def check_choice(value, name: str, options: Iterable) -> object:
    opts = tuple(options)
    if value not in opts:
        raise ValidationError(f"{name} must be one of {opts}, got {value!r}")
    return value


def check_distinct(items: Sequence, name: str) -> None:
    seen = set()
    for item in items:
        if item in seen:
            raise ValidationError(f"duplicate {name}: {item!r}")
        seen.add(item)
