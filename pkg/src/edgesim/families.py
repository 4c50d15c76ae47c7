"""Layer family classification.

Five families are defined by ranges over parameter footprint, parameter
reuse, and MAC count. Ranges describe observed clusters, so each edge is
widened by 10% before matching. A layer matching several families resolves
by precedence F3 > F4 > F1 > F2 > F5. Layers matching no family on all
three axes fall back to a footprint+reuse match; anything left over is
Unclassified and can be routed to the nearest family in log space.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .ir import LayerKind, ModelGraph
from .metrics import LayerMetrics, model_metrics


class Family(str, Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    F5 = "F5"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class FamilyRanges:
    param_bytes: tuple[float, float]
    param_reuse: tuple[float, float]
    macs: tuple[float, float]


#: Decimal KB/MB, matching how the ranges are quoted.
FAMILY_RANGES: dict[Family, FamilyRanges] = {
    Family.F1: FamilyRanges((1e3, 100e3), (780.0, 20e3), (30e6, 200e6)),
    Family.F2: FamilyRanges((100e3, 500e3), (81.0, 400.0), (20e6, 100e6)),
    Family.F3: FamilyRanges((0.9e6, 18e6), (0.0, 8.0), (0.1e6, 10e6)),
    Family.F4: FamilyRanges((0.5e6, 2.5e6), (25.0, 64.0), (5e6, 25e6)),
    Family.F5: FamilyRanges((1e3, 100e3), (49.0, 600.0), (0.5e6, 5e6)),
}

#: Multi-match resolution order.
PRECEDENCE = (Family.F3, Family.F4, Family.F1, Family.F2, Family.F5)

BOUNDARY_SLACK = 0.10

#: "Minimal" reuse operationalized as a hard ceiling (an order of magnitude
#: below F4's lower bound); deliberately not slack-widened.
F3_REUSE_CEILING = 8.0


def _in_range(value: float, bounds: tuple[float, float], hard_hi: bool = False) -> bool:
    lo, hi = bounds
    lo_eff = lo * (1.0 - BOUNDARY_SLACK)
    hi_eff = hi if hard_hi else hi * (1.0 + BOUNDARY_SLACK)
    return lo_eff <= value <= hi_eff


def _matches(family: Family, metrics: LayerMetrics, require_macs: bool) -> bool:
    ranges = FAMILY_RANGES[family]
    hard_hi = family is Family.F3
    if not _in_range(metrics.param_bytes, ranges.param_bytes):
        return False
    if not _in_range(metrics.param_reuse, ranges.param_reuse, hard_hi=hard_hi):
        return False
    if require_macs and not _in_range(metrics.macs, ranges.macs):
        return False
    return True


def classify(metrics: LayerMetrics, kind: LayerKind) -> Family:
    """Classify one layer. Pure and deterministic.

    LSTM gates test F3 first on footprint and reuse alone: the family is
    tied to gate MVMs, whose MAC count tracks the footprint and needs no
    separate check.
    """
    if metrics.param_bytes == 0:
        return Family.UNCLASSIFIED
    if kind is LayerKind.LSTM_GATE and _matches(Family.F3, metrics, require_macs=False):
        return Family.F3
    for family in PRECEDENCE:
        if _matches(family, metrics, require_macs=True):
            return family
    for family in PRECEDENCE:
        if _matches(family, metrics, require_macs=False):
            return family
    return Family.UNCLASSIFIED


def _log_center(bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    lo = max(lo, 1.0)  # F3's reuse range starts at 0; center over [1, hi]
    return 0.5 * (math.log10(lo) + math.log10(hi))


_CENTERS = {
    family: (
        _log_center(r.param_bytes),
        _log_center(r.param_reuse),
        _log_center(r.macs),
    )
    for family, r in FAMILY_RANGES.items()
}


def nearest_family(metrics: LayerMetrics) -> Family:
    """Nearest family by Euclidean distance in log space of the three axes."""
    point = (
        math.log10(max(metrics.param_bytes, 1e-9)),
        math.log10(max(metrics.param_reuse, 1e-9)),
        math.log10(max(metrics.macs, 1e-9)),
    )
    best = None
    best_d = math.inf
    for family in PRECEDENCE:
        cx, cy, cz = _CENTERS[family]
        d = (point[0] - cx) ** 2 + (point[1] - cy) ** 2 + (point[2] - cz) ** 2
        if d < best_d:
            best, best_d = family, d
    assert best is not None
    return best


def family_histogram(model: ModelGraph) -> Counter:
    """Counts over parameterized layers only (combine stages excluded)."""
    counts: Counter = Counter()
    mm = model_metrics(model)
    kinds = {layer.id: layer.kind for layer in model.layers}
    for row in mm.rows:
        if row.metrics.param_bytes == 0:
            continue
        counts[classify(row.metrics, kinds[row.layer_id])] += 1
    return counts
