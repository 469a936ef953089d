"""Decay sweep of the squeezing bound over a grid of depths."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from .discs import DiscSearchConfig
from .domain import CERTIFIED_FAMILIES, DomainError, DomainSpec
from .squeezing import (DEFAULT_MARGIN, NO_CERTIFICATE, SqueezingBound, exponent_composition,
                        family_variant, squeezing_upper)

CSV_HEADER = ("delta", "K_axis_upper", "K_diag_lower", "lambda", "r_d", "epsilon", "bound")
NO_DECAY = "no decay evidence"


def geometric_deltas(start: float, end: float, count: int) -> List[float]:
    """``count`` geometrically spaced values from ``start`` to ``end`` inclusive."""
    if count < 1 or not (start > 0 and end > 0):
        raise ValueError("need positive endpoints and count >= 1")
    if count == 1:
        return [float(start)]
    logs = np.linspace(math.log10(start), math.log10(end), count)
    return [float(10.0 ** x) for x in logs]


def parse_delta_range(text: str) -> List[float]:
    """``start:end:count`` (geometric) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("delta range must be start:end:count")
        return geometric_deltas(float(parts[0]), float(parts[1]), int(parts[2]))
    return [float(x) for x in text.split(",") if x.strip()]


def fit_slope(deltas: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(values)`` against ``log(deltas)``."""
    x = np.log(np.asarray(deltas, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    x0 = x - x.mean()
    return float(np.dot(x0, y - y.mean()) / np.dot(x0, x0))


@dataclass
class ExperimentTable:
    family_tag: str
    mode: str
    rows: List[SqueezingBound]
    slope: Optional[float]
    exponent: Optional[Fraction]
    verdict: str
    strictly_decreasing: bool
    notes: List[str] = field(default_factory=list)

    def row_values(self, row: SqueezingBound) -> tuple:
        return (row.delta, row.K_axis_upper, row.K_diag_lower, row.lam, row.r_d,
                row.epsilon, row.bound)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow([repr(float(v)) for v in self.row_values(row)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"family": self.family_tag, "mode": self.mode, "slope": self.slope,
                "theoretical_exponent": None if self.exponent is None else str(self.exponent),
                "theoretical_exponent_float": None if self.exponent is None else float(self.exponent),
                "strictly_decreasing": self.strictly_decreasing, "verdict": self.verdict,
                "notes": list(self.notes)}


def _row(dom, cfg, mode, margin, delta):
    return squeezing_upper(dom, delta, cfg, mode, margin)


def decay_experiment(dom: DomainSpec, deltas: Sequence[float], cfg: DiscSearchConfig | None = None,
                     mode: str = "numeric", margin: float = DEFAULT_MARGIN,
                     jobs: int = 1) -> ExperimentTable:
    """One squeezing bound per depth, plus a log-log slope against the predicted exponent.

    The slope is fitted to ``log(3 eps)`` so rows clamped at the vacuous value 1
    still carry their scaling; ``bound = min(1, 3 eps)`` is what the table reports.
    """
    cfg = cfg or DiscSearchConfig()
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise ValueError("empty delta list")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("delta list must be strictly decreasing")
    certified = dom.family_tag in CERTIFIED_FAMILIES
    if certified and deltas[0] >= dom.locality_radius ** 2:
        raise DomainError("every delta must be below locality_radius^2")
    task = partial(_row, dom, cfg, mode, margin)
    if jobs > 1 and len(deltas) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(task, deltas))
    else:
        rows = [task(d) for d in deltas]
    bounds = [r.bound for r in rows]
    decreasing = all(b < a for a, b in zip(bounds, bounds[1:]))
    notes = []
    if not certified or all(r.diagnostic == NO_CERTIFICATE for r in rows):
        return ExperimentTable(dom.family_tag, mode, rows, None, None, NO_DECAY, decreasing,
                               [NO_CERTIFICATE])
    exponent = exponent_composition(dom.declared_k, family_variant(dom))
    slope = fit_slope(deltas, [3 * r.epsilon for r in rows]) if len(rows) > 1 else None
    clamped = sum(r.bound >= 1 for r in rows)
    if clamped:
        notes.append(f"{clamped} of {len(rows)} rows clamped at the vacuous bound 1")
    if slope is None or slope <= 0:
        verdict = NO_DECAY
    elif mode == "closed_form":
        verdict = ("exponent reproduced" if abs(slope - float(exponent)) <= 1e-12
                   else "exponent mismatch")
    elif decreasing:
        verdict = "decay"
    else:
        verdict = "decay in the unclamped bound only"
    return ExperimentTable(dom.family_tag, mode, rows, slope, exponent, verdict, decreasing, notes)
