"""Polygon area scoring for multi-metric classifier comparison.

The n metric values r_i in [0,1] are placed uniformly around a circle and
the enclosed polygon area is

    area = 1/2 * sum_i r_i * r_{i+1} * sin(2*pi/n),  with r_{n+1} = r_1.

A balanced classifier (all axes high) encloses a large area; a single weak
axis collapses both adjacent triangles.  The raw area is reported by
default; ``normalized=True`` divides by the all-ones maximum.
"""
from __future__ import annotations

import math
from typing import Sequence

PAM_AXES = ("auc_roc", "precision", "recall", "f1", "specificity")


class BadDimension(ValueError):
    """Polygon needs at least 3 axes."""


class OutOfRange(ValueError):
    """All axis values must lie in [0, 1]."""


def pam_area(r: Sequence[float], normalized: bool = False) -> float:
    n = len(r)
    if n < 3:
        raise BadDimension(f"need >= 3 axes, got {n}")
    for v in r:
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"axis value {v!r} outside [0, 1]")
    s = math.sin(2.0 * math.pi / n)
    area = 0.5 * s * sum(r[i] * r[(i + 1) % n] for i in range(n))
    if normalized:
        area /= max_pam_area(n)
    return area


def max_pam_area(n: int) -> float:
    """Area of the all-ones polygon: (n/2) * sin(2*pi/n)."""
    if n < 3:
        raise BadDimension(f"need >= 3 axes, got {n}")
    return 0.5 * n * math.sin(2.0 * math.pi / n)
