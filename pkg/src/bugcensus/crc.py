"""Capture-recapture estimators of the total bug population.

Five estimators over :class:`~bugcensus.core.FrequencyStats`, one per
classical model family:

* ``M0`` -- every bug equally detectable, every capture alike; the
  maximum-likelihood estimate solved numerically.
* ``MtCH`` -- capture effort varies; Chao's singleton/doubleton form
  ``D + f1^2 / (2 f2)`` with the bias-corrected fallback when f2 = 0.
* ``MhCH`` -- bug detectability varies; the sample-coverage estimate
  ``D / C`` with ``C = 1 - f1 / sum(k f_k)``.
* ``MhJK`` -- first-order jackknife ``D + f1 (t-1)/t``.
* ``Mth`` -- both vary; the coverage estimate inflated by the squared
  coefficient of variation:

      N = D/C + (f1/C) * gamma^2
      gamma^2 = max(D/C * sum(k(k-1) f_k) / (2 sum_{j<k} n_j n_k) - 1, 0)

Estimators needing recapture signal raise :class:`InsufficientDataError`
subclasses rather than returning sentinel values, so monitoring code can
tell "no estimate yet" apart from an estimate equal to D.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .core import BugArrivalTable, FrequencyStats

M0_BRACKET_HIGH = 1e7
M0_TOLERANCE = 1e-6


class EstimatorKind(str, Enum):
    """The five supported estimator families."""

    M0 = "M0"
    MTCH = "MtCH"
    MHCH = "MhCH"
    MHJK = "MhJK"
    MTH = "Mth"


#: Capture sizes found best for each estimator on the reference dataset.
TUNED_SMP_SIZE = {
    EstimatorKind.M0: 8,
    EstimatorKind.MTCH: 8,
    EstimatorKind.MHCH: 6,
    EstimatorKind.MHJK: 3,
    EstimatorKind.MTH: 8,
}


class InsufficientDataError(ValueError):
    """The statistics cannot support an estimate yet."""


class InsufficientCapturesError(InsufficientDataError):
    """Fewer than two captures."""


class InsufficientRecaptureError(InsufficientDataError):
    """No bug has been recaptured, so coverage or likelihood is degenerate."""


@dataclass(frozen=True)
class CrcEstimate:
    """One estimator evaluation at one capture.

    ``coverage`` (C) and ``gamma_sq`` are populated only by the
    coverage-based estimators (Mth, MhCH).
    """

    kind: EstimatorKind
    capture_index: int
    n_hat: float
    n_hat_rounded: int
    coverage: float | None = None
    gamma_sq: float | None = None


def round_half_away(x: float) -> int:
    """Nearest integer, ties away from zero."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def _require_captures(stats: FrequencyStats) -> None:
    if stats.captures < 2:
        raise InsufficientCapturesError(
            f"need at least 2 captures, have {stats.captures}"
        )
    if stats.distinct_bugs < 1:
        raise InsufficientDataError("no bugs detected yet")


def _coverage(stats: FrequencyStats) -> float:
    """Sample coverage C = 1 - f1 / sum(k f_k); requires some recapture."""
    total = stats.total_incidences
    f1 = stats.singletons
    if total <= f1:
        raise InsufficientRecaptureError(
            "all detected bugs are singletons; sample coverage is zero"
        )
    return 1.0 - f1 / total


def _gamma_sq(stats: FrequencyStats, coverage: float) -> float:
    """Squared CV of detection probabilities, floored at zero."""
    pair_sum = sum(k * (k - 1) * count for k, count in stats.seen_exactly.items())
    n = stats.bugs_per_capture
    total = sum(n)
    cross = (total * total - sum(v * v for v in n)) / 2.0
    if cross <= 0:
        raise InsufficientRecaptureError(
            "no two captures both detected bugs; CV term undefined"
        )
    d_over_c = stats.distinct_bugs / coverage
    return max(d_over_c * pair_sum / (2.0 * cross) - 1.0, 0.0)


def estimate_mth(stats: FrequencyStats) -> CrcEstimate:
    """Coverage estimate with heterogeneity inflation (both-vary model)."""
    _require_captures(stats)
    coverage = _coverage(stats)
    gamma_sq = _gamma_sq(stats, coverage)
    n_hat = stats.distinct_bugs / coverage + (stats.singletons / coverage) * gamma_sq
    return CrcEstimate(
        kind=EstimatorKind.MTH,
        capture_index=stats.captures,
        n_hat=n_hat,
        n_hat_rounded=round_half_away(n_hat),
        coverage=coverage,
        gamma_sq=gamma_sq,
    )


def estimate_mhch(stats: FrequencyStats) -> CrcEstimate:
    """Sample-coverage estimate D / C (heterogeneous-bugs model)."""
    _require_captures(stats)
    coverage = _coverage(stats)
    n_hat = stats.distinct_bugs / coverage
    return CrcEstimate(
        kind=EstimatorKind.MHCH,
        capture_index=stats.captures,
        n_hat=n_hat,
        n_hat_rounded=round_half_away(n_hat),
        coverage=coverage,
        gamma_sq=0.0,
    )


def estimate_mtch(stats: FrequencyStats) -> CrcEstimate:
    """Singleton/doubleton estimate D + f1^2/(2 f2), bias-corrected at f2=0."""
    _require_captures(stats)
    f1 = stats.singletons
    f2 = stats.seen_exactly.get(2, 0)
    if f2 > 0:
        n_hat = stats.distinct_bugs + f1 * f1 / (2.0 * f2)
    else:
        n_hat = stats.distinct_bugs + f1 * (f1 - 1) / 2.0
    return CrcEstimate(
        kind=EstimatorKind.MTCH,
        capture_index=stats.captures,
        n_hat=n_hat,
        n_hat_rounded=round_half_away(n_hat),
    )


def estimate_mhjk(stats: FrequencyStats) -> CrcEstimate:
    """First-order jackknife D + f1 (t-1)/t."""
    _require_captures(stats)
    t = stats.captures
    n_hat = stats.distinct_bugs + stats.singletons * (t - 1) / t
    return CrcEstimate(
        kind=EstimatorKind.MHJK,
        capture_index=stats.captures,
        n_hat=n_hat,
        n_hat_rounded=round_half_away(n_hat),
    )


def m0_condition(n: float, stats: FrequencyStats) -> float:
    """Likelihood condition g(N) whose root >= D is the M0 estimate.

    With M = sum(n_j) incidences spread over t captures and the
    homogeneous detection probability profiled out as p = M/(tN):

        g(N) = (1 - M/(tN))^t - (1 - D/N)
    """
    m = stats.total_incidences
    t = stats.captures
    d = stats.distinct_bugs
    return (1.0 - m / (t * n)) ** t - (1.0 - d / n)


def estimate_m0(stats: FrequencyStats) -> CrcEstimate:
    """Homogeneous-model ML estimate, solved by bisection on [D, 1e7]."""
    _require_captures(stats)
    d = stats.distinct_bugs
    m = stats.total_incidences
    if m <= d:
        raise InsufficientRecaptureError(
            "every incidence is a first detection; M0 likelihood is flat"
        )
    lo, hi = float(d), M0_BRACKET_HIGH
    g_lo = m0_condition(lo, stats)
    if abs(g_lo) < 1e-12:
        n_hat = lo
    else:
        if g_lo < 0 or m0_condition(hi, stats) > 0:
            raise InsufficientRecaptureError("no root bracketed for M0 condition")
        while hi - lo > M0_TOLERANCE:
            mid = (lo + hi) / 2.0
            if m0_condition(mid, stats) > 0:
                lo = mid
            else:
                hi = mid
        n_hat = (lo + hi) / 2.0
    return CrcEstimate(
        kind=EstimatorKind.M0,
        capture_index=stats.captures,
        n_hat=n_hat,
        n_hat_rounded=round_half_away(n_hat),
    )


_ESTIMATORS: dict[EstimatorKind, Callable[[FrequencyStats], CrcEstimate]] = {
    EstimatorKind.M0: estimate_m0,
    EstimatorKind.MTCH: estimate_mtch,
    EstimatorKind.MHCH: estimate_mhch,
    EstimatorKind.MHJK: estimate_mhjk,
    EstimatorKind.MTH: estimate_mth,
}


def estimate(stats: FrequencyStats, kind: EstimatorKind) -> CrcEstimate:
    """Runs the estimator of the given kind."""
    return _ESTIMATORS[kind](stats)


def estimate_series(
    snapshots: Iterable[FrequencyStats | BugArrivalTable],
    kind: EstimatorKind,
) -> list[CrcEstimate | None]:
    """One estimate per capture snapshot, ``None`` where data is insufficient."""
    series: list[CrcEstimate | None] = []
    for snap in snapshots:
        stats = snap.stats() if isinstance(snap, BugArrivalTable) else snap
        try:
            series.append(estimate(stats, kind))
        except InsufficientDataError:
            series.append(None)
    return series


def estimate_record(task_id: str, est: CrcEstimate) -> dict:
    """JSON-ready export record for one estimate."""
    return {
        "task_id": task_id,
        "capture_index": est.capture_index,
        "estimator": est.kind.value,
        "n_hat": est.n_hat,
        "n_hat_rounded": est.n_hat_rounded,
        "C": est.coverage,
        "gamma_sq": est.gamma_sq,
    }


def write_estimates_jsonl(
    path: str | Path,
    task_id: str,
    series: Sequence[CrcEstimate | None],
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for est in series:
            if est is not None:
                handle.write(json.dumps(estimate_record(task_id, est)) + "\n")
