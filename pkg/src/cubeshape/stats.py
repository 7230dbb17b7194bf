"""Counting and equidistribution statistics over enumerated records."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import ntheory
from .enumeration import FieldRecord, WindowSet, to_unoriented
from .quad_geodesics import BinaryQuadraticForm, is_ambiguous, pell_fundamental


def cd_constant(D: int) -> float:
    """Leading constant of ``N^Or(V^(Q); X) ~ C_D X^{1/2}``."""
    if D <= 0 or ntheory.is_square(D):
        raise ValueError(f"D = {D} must be a positive nonsquare")
    alpha = 1 if D % 3 == 0 else 2
    return 3 * math.sqrt(3) * pell_fundamental(D).log_eps0 / (3**alpha * D)


def count_vs_asymptotic(records: Sequence[FieldRecord] | int, X: float, D: int | None = None) -> float:
    """``count / (C_D sqrt X)``; ``records`` may be a list or a bare count."""
    if isinstance(records, int):
        count = records
        if D is None:
            raise ValueError("D is required when passing a bare count")
    else:
        count = len(records)
        if D is None:
            if not records:
                return 0.0
            D = BinaryQuadraticForm(*records[0].tzf).disc
    return count / (cd_constant(D) * math.sqrt(X))


def ks_uniform(taus: Iterable[float]) -> float:
    """Kolmogorov-Smirnov distance ``sup |F_emp(t) - t|`` to uniform on [0, 1)."""
    t = np.sort(np.asarray(list(taus), dtype=float))
    n = len(t)
    if n == 0:
        raise ValueError("empty sample")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - t), np.max(t - (i - 1) / n)))


def window_count(records: Iterable[FieldRecord], W: WindowSet) -> int:
    return sum(1 for rec in records if rec.tau in W)


@dataclass
class AuditResult:
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def tame_wild_audit(records: Iterable[FieldRecord]) -> AuditResult:
    """ord_3 of disc(tzf) is 0 when 3 is wild and 2 when 3 is tame."""
    out = AuditResult()
    for rec in records:
        if not rec.maximal or rec.resolvent_disc % 3:
            continue
        k = ntheory.valuation(BinaryQuadraticForm(*rec.tzf).disc, 3)
        expected = {"wild": 0, "tame": 2}.get(rec.three_class)
        if expected is not None and k == expected:
            out.passed += 1
        else:
            out.failed += 1
            out.failures.append((rec.form, rec.three_class, k))
    return out


def shape_separation(records: Sequence[FieldRecord]) -> float:
    """Smallest distance between reduced shapes of the given records.

    Callers pass one record per field (see ``to_unoriented``); a duplicated
    record therefore shows up as distance 0.
    """
    if len(records) < 2:
        raise ValueError("need at least two records")
    pts = np.array([rec.shape for rec in records], dtype=float)
    order = np.argsort(pts[:, 0], kind="stable")
    best = math.inf
    # sweep in x; only neighbours closer than the current best in x can win
    for a in range(len(order)):
        i = order[a]
        for b in range(a + 1, len(order)):
            j = order[b]
            dx = pts[j, 0] - pts[i, 0]
            if dx > best:
                break
            d = math.hypot(dx, pts[j, 1] - pts[i, 1])
            if d < best:
                best = d
    return float(best)


def histogram(taus: Iterable[float], bins: int) -> list[int]:
    if bins < 1:
        raise ValueError("bins must be positive")
    counts = [0] * bins
    for t in taus:
        counts[min(int(t * bins), bins - 1)] += 1
    return counts


def histogram_csv(counts: Sequence[int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_start", "count"])
    n = len(counts)
    for k, c in enumerate(counts):
        w.writerow([f"{k / n:.6f}", c])
    return buf.getvalue()


@dataclass
class StatsSummary:
    D: int
    class_id: str
    X: float | None
    count_oriented: int
    count_unoriented: int
    c_d: float
    count_over_sqrtX: float | None
    ks_statistic: float
    histogram: list[int]
    tame_wild_audit: dict
    min_shape_separation: float | None
    window_counts: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def summarize(records: Sequence[FieldRecord], X: float | None = None, windows: WindowSet | None = None,
              bins: int = 10) -> list[StatsSummary]:
    """One summary per SL_2-class (``class_id`` + orientation) in ``records``."""
    groups: dict[tuple[str, str], list[FieldRecord]] = defaultdict(list)
    for rec in records:
        groups[(rec.class_id, rec.orientation)].append(rec)
    out = []
    for (cid, orient), recs in sorted(groups.items()):
        Q = BinaryQuadraticForm(*recs[0].tzf)
        D = Q.disc
        oriented = [r for r in recs if r.oriented]
        if oriented and len(oriented) == len(recs):
            fields = list(to_unoriented(oriented, is_ambiguous(Q), Q).records)
        else:
            fields = list(recs)
        # distinct orders of one field share a shape, so separate fields only
        maximal_fields = [r for r in fields if r.maximal]
        audit = tame_wild_audit(recs)
        wc = {}
        if windows is not None:
            key = ",".join(f"{lo}:{hi}" for lo, hi in windows.intervals)
            wc[key] = window_count(recs, windows)
        out.append(
            StatsSummary(
                D=D,
                class_id=f"{cid}{orient}",
                X=X,
                count_oriented=len(oriented),
                count_unoriented=len(fields),
                c_d=cd_constant(D),
                count_over_sqrtX=(len(recs) / math.sqrt(X)) if X else None,
                ks_statistic=ks_uniform([r.tau for r in recs]),
                histogram=histogram([r.tau for r in recs], bins),
                tame_wild_audit={"pass": audit.passed, "fail": audit.failed},
                min_shape_separation=shape_separation(maximal_fields) if len(maximal_fields) > 1 else None,
                window_counts=wc,
            )
        )
    return out
