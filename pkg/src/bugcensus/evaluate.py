"""Experiment harness: checkpoints, metrics, baselines, tuning, and tests.

The harness replays finished tasks against two checkpoint grids (share
of reports received for total-bug accuracy, share of bugs detected for
required-cost accuracy), compares estimators against a Rayleigh
curve-fitting baseline and a leave-one-out corpus-median baseline, and
summarizes per-method error distributions with medians, population
standard deviations and pairwise Mann-Whitney U tests.

Historical totals are the ground truth everywhere: a task's "actual"
bug count is the number of distinct bugs its full stream ever revealed,
and consumed cost is counted in reports.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .arima import ArimaParams, fit as arima_fit, forecast as arima_forecast, required_cost
from .core import FrequencyStats, Report
from .crc import (
    TUNED_SMP_SIZE,
    EstimatorKind,
    InsufficientDataError,
    estimate as run_estimator,
)
from .decisions import CloseDecision
from .pipeline import TaskRunResult

#: The 19 evaluation levels, 10% through 100% in 5% steps.
CHECKPOINT_LEVELS: tuple[float, ...] = tuple(
    round(0.10 + 0.05 * i, 2) for i in range(19)
)


class CheckpointKind(str, Enum):
    REPORT_PCT = "report_pct"
    BUG_PCT = "bug_pct"


@dataclass(frozen=True)
class Checkpoint:
    kind: CheckpointKind
    level: float

    def __post_init__(self) -> None:
        if round(self.level, 2) not in CHECKPOINT_LEVELS:
            raise ValueError(f"level {self.level} is not on the 19-point grid")


class UndefinedMetricError(ValueError):
    """The metric's denominator is zero."""


def relative_error(predicted: float, actual: float) -> float:
    """(predicted - actual) / actual; negative means underestimate."""
    if actual <= 0:
        raise UndefinedMetricError("relative error needs a positive actual value")
    return (predicted - actual) / actual


def harmonic_f1(pct_bug: float, pct_reduced_cost: float) -> float:
    """Harmonic mean of detection level and cost reduction; 0 at (0, 0)."""
    if pct_bug + pct_reduced_cost == 0:
        return 0.0
    return 2.0 * pct_bug * pct_reduced_cost / (pct_bug + pct_reduced_cost)


def cost_effectiveness(
    result: TaskRunResult, decision: CloseDecision | None = None
) -> tuple[float, float, float]:
    """(%bug, %reducedCost, F1) of a close decision against history."""
    decision = decision or result.close_decision
    if not decision.closed:
        raise ValueError("cost-effectiveness is undefined for an unclosed task")
    if result.total_bugs <= 0 or result.total_reports <= 0:
        raise UndefinedMetricError("task history has no bugs or no reports")
    assert decision.detected_at_close is not None
    assert decision.close_capture_index is not None
    pct_bug = decision.detected_at_close / result.total_bugs
    reports_at_close = decision.close_capture_index * result.smp_size
    pct_reduced = 1.0 - reports_at_close / result.total_reports
    return pct_bug, pct_reduced, harmonic_f1(pct_bug, pct_reduced)


# -- checkpoint extraction --------------------------------------------------


def tag_stream(reports: Sequence[Report]) -> list[str | None]:
    """Bug tag per report, ``None`` for non-bug reports."""
    return [r.bug_tag if r.is_bug else None for r in reports]


def estimate_series_for_stream(
    tags: Sequence[str | None], smp_size: int, kind: EstimatorKind
) -> tuple[list[int | None], list[int]]:
    """Per-capture (n_hat_rounded, detected) series for one stream.

    Uses the same incremental statistics as the live table but skips
    Report object overhead; used by tuning and experiments that re-run a
    corpus under many capture sizes.
    """
    column_counts: dict[str, int] = {}
    freq: dict[int, int] = {}
    row_sums: list[int] = []
    rounded: list[int | None] = []
    detected: list[int] = []
    for start in range(0, len(tags) - smp_size + 1, smp_size):
        window = {t for t in tags[start : start + smp_size] if t is not None}
        for tag in window:
            k = column_counts.get(tag, 0)
            if k:
                freq[k] -= 1
                if not freq[k]:
                    del freq[k]
            column_counts[tag] = k + 1
            freq[k + 1] = freq.get(k + 1, 0) + 1
        row_sums.append(len(window))
        stats = FrequencyStats(
            distinct_bugs=len(column_counts),
            captures=len(row_sums),
            bugs_per_capture=tuple(row_sums),
            seen_exactly=dict(freq),
        )
        try:
            rounded.append(run_estimator(stats, kind).n_hat_rounded)
        except InsufficientDataError:
            rounded.append(None)
        detected.append(len(column_counts))
    return rounded, detected


def checkpoint_errors(
    tags: Sequence[str | None],
    smp_size: int,
    kind: EstimatorKind,
    levels: Sequence[float] = CHECKPOINT_LEVELS,
) -> dict[float, float | None]:
    """Relative error of the predicted total at each report-share level.

    The prediction at level L is the estimate after the last capture
    completed within the first ``ceil(L * total)`` reports; ``None``
    where no estimate existed. Actual totals are historical.
    """
    total = len(tags)
    actual = len({t for t in tags if t is not None})
    if actual == 0:
        return {level: None for level in levels}
    rounded, _ = estimate_series_for_stream(tags, smp_size, kind)
    out: dict[float, float | None] = {}
    for level in levels:
        captures = math.ceil(level * total - 1e-9) // smp_size
        if captures < 1:
            out[level] = None
            continue
        est = rounded[min(captures, len(rounded)) - 1]
        out[level] = None if est is None else relative_error(est, actual)
    return out


def first_seen_indices(tags: Sequence[str | None]) -> list[int]:
    """1-based report index at which each successive unique bug appeared."""
    seen: set[str] = set()
    out: list[int] = []
    for i, tag in enumerate(tags, start=1):
        if tag is not None and tag not in seen:
            seen.add(tag)
            out.append(i)
    return out


# -- Rayleigh baseline -------------------------------------------------------


class RayleighFitError(ValueError):
    """The cumulative curve carries no signal to fit."""


@dataclass(frozen=True)
class RayleighFit:
    """Fitted cumulative defect-arrival curve K * (1 - exp(-x^2 / 2 sigma^2))."""

    k: float
    sigma: float

    def predict(self, x: float) -> float:
        return self.k * (1.0 - math.exp(-(x * x) / (2.0 * self.sigma * self.sigma)))

    def reports_to_reach(self, target_bugs: float) -> float:
        """Inverse of the curve; inf when the target exceeds the asymptote."""
        if target_bugs >= self.k:
            return math.inf
        if target_bugs <= 0:
            return 0.0
        return self.sigma * math.sqrt(-2.0 * math.log(1.0 - target_bugs / self.k))


def rayleigh_fit(points: Sequence[tuple[float, float]]) -> RayleighFit:
    """Least-squares fit of the Rayleigh cumulative curve.

    Seeds a small grid over plausible (K, sigma) pairs and refines each
    with bounded least squares, keeping the best solution; the grid makes
    the fit robust to flat prefixes and early checkpoints.
    """
    if len(points) < 3:
        raise RayleighFitError("need at least 3 points")
    x = np.asarray([p[0] for p in points], dtype=float)
    y = np.asarray([p[1] for p in points], dtype=float)
    if np.any(np.diff(y) < 0):
        raise ValueError("cumulative counts must be non-decreasing")
    y_max = float(y.max())
    if y_max <= 0:
        raise RayleighFitError("all counts are zero")
    x_max = float(x.max())

    def residuals(params: np.ndarray) -> np.ndarray:
        k, sigma = params
        return k * (1.0 - np.exp(-(x * x) / (2.0 * sigma * sigma))) - y

    best: tuple[float, np.ndarray] | None = None
    for k0 in (y_max * 1.05, y_max * 1.5, y_max * 2.5, y_max * 5.0):
        for s0 in (x_max * 0.2, x_max * 0.5, x_max * 0.9, x_max * 1.5, x_max * 3.0):
            sol = least_squares(
                residuals,
                np.array([k0, s0]),
                bounds=([y_max * 1e-6, x_max * 1e-6], [np.inf, np.inf]),
                method="trf",
            )
            sse = float(sol.fun @ sol.fun)
            if best is None or sse < best[0]:
                best = (sse, sol.x)
    assert best is not None
    k, sigma = best[1]
    return RayleighFit(k=float(k), sigma=float(sigma))


def rayleigh_checkpoint_errors(
    tags: Sequence[str | None],
    levels: Sequence[float] = CHECKPOINT_LEVELS,
) -> dict[float, float | None]:
    """Relative error of the Rayleigh-predicted total at each level."""
    total = len(tags)
    actual = len({t for t in tags if t is not None})
    if actual == 0:
        return {level: None for level in levels}
    firsts = first_seen_indices(tags)
    out: dict[float, float | None] = {}
    for level in levels:
        upto = max(3, math.ceil(level * total - 1e-9))
        counts = np.searchsorted(firsts, np.arange(1, upto + 1), side="right")
        points = list(zip(range(1, upto + 1), counts.astype(float)))
        try:
            fitted = rayleigh_fit(points)
        except RayleighFitError:
            out[level] = None
            continue
        out[level] = relative_error(fitted.k, actual)
    return out


# -- Naive baseline ----------------------------------------------------------


def naive_loo_medians(values: Sequence[float]) -> list[float]:
    """Leave-one-out medians: entry i is the median of all other entries."""
    if len(values) < 2:
        raise ValueError("leave-one-out medians need at least 2 tasks")
    arr = np.asarray(values, dtype=float)
    out = []
    for i in range(len(arr)):
        rest = np.delete(arr, i)
        out.append(float(np.nanmedian(rest)))
    return out


def naive_required_cost_matrix(cost_matrix: np.ndarray) -> np.ndarray:
    """Leave-one-out median required cost per (task, checkpoint) cell."""
    if cost_matrix.shape[0] < 2:
        raise ValueError("leave-one-out medians need at least 2 tasks")
    out = np.full_like(cost_matrix, np.nan, dtype=float)
    for i in range(cost_matrix.shape[0]):
        rest = np.delete(cost_matrix, i, axis=0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN columns
            out[i] = np.nanmedian(rest, axis=0)
    return out


# -- Mann-Whitney U ----------------------------------------------------------

EXACT_SIZE_LIMIT = 8


def _rank_data(pooled: Sequence[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


@lru_cache(maxsize=4096)
def _u_counts(n: int, m: int) -> tuple[int, ...]:
    """Number of rank interleavings with each U value (no ties)."""
    if n == 0 or m == 0:
        return (1,)
    with_x = _u_counts(n - 1, m)  # largest pooled value is an x: beats all m y's
    with_y = _u_counts(n, m - 1)
    out = [0] * (n * m + 1)
    for u, c in enumerate(with_x):
        out[u + m] += c
    for u, c in enumerate(with_y):
        out[u] += c
    return tuple(out)


def mann_whitney_exact(u: float, n: int, m: int) -> float:
    """Two-sided exact p-value from the full U distribution (no ties)."""
    counts = _u_counts(n, m)
    total = float(sum(counts))
    u_min = int(min(u, n * m - u))
    return min(2.0 * sum(counts[: u_min + 1]) / total, 1.0)


def mann_whitney_approx(
    u: float, n: int, m: int, tie_term: float = 0.0, has_ties: bool = False
) -> float:
    """Two-sided approximate p-value.

    Without ties the tiny-sample cases min(n, m) <= 2 use the known
    closed-form lattice distributions (discrete uniform for size 1, the
    two-part composition count for size 2); everything else uses the
    normal approximation with continuity correction and tie-corrected
    variance.
    """
    small, large = (n, m) if n <= m else (m, n)
    nm = n * m
    u_min = min(u, nm - u)
    if not has_ties and small <= 2:
        if small == 1:
            return min(2.0 * (math.floor(u_min) + 1) / (large + 1), 1.0)
        total = (large + 1) * (large + 2) / 2.0
        acc = sum(
            v // 2 - max(0, v - large) + 1 for v in range(0, int(math.floor(u_min)) + 1)
        )
        return min(2.0 * acc / total, 1.0)
    size = n + m
    variance = nm / 12.0 * ((size + 1) - tie_term / (size * (size - 1.0)))
    if variance <= 0:
        return 1.0
    z = (abs(u - nm / 2.0) - 0.5) / math.sqrt(variance)
    z = max(z, 0.0)
    return min(2.0 * (1.0 - 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))), 1.0)


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided Mann-Whitney U test p-value.

    Exact enumeration when both samples are small (min size <= 8) and
    tie-free; otherwise the approximation branch.
    """
    n, m = len(a), len(b)
    if n < 1 or m < 1:
        raise ValueError("both samples must be non-empty")
    pooled = list(a) + list(b)
    ranks = _rank_data(pooled)
    r1 = sum(ranks[:n])
    u1 = r1 - n * (n + 1) / 2.0
    distinct = sorted(pooled)
    tie_sizes = []
    i = 0
    while i < len(distinct):
        j = i
        while j + 1 < len(distinct) and distinct[j + 1] == distinct[i]:
            j += 1
        tie_sizes.append(j - i + 1)
        i = j + 1
    has_ties = any(t > 1 for t in tie_sizes)
    tie_term = float(sum(t**3 - t for t in tie_sizes))
    if not has_ties and min(n, m) <= EXACT_SIZE_LIMIT:
        return mann_whitney_exact(u1, n, m)
    return mann_whitney_approx(u1, n, m, tie_term, has_ties)


# -- smpSize tuning ----------------------------------------------------------


def tune_smp_size(
    corpus: Sequence[Sequence[Report]],
    kind: EstimatorKind,
    candidates: Sequence[int] = tuple(range(2, 31)),
    repetitions: int = 1000,
    seed: int = 0,
    subset_fraction: float = 2.0 / 3.0,
    levels: Sequence[float] = CHECKPOINT_LEVELS,
) -> int:
    """Picks the capture size minimizing summed absolute median errors.

    Per repetition a random two-thirds of the tasks is drawn, each
    candidate is scored by the sum over checkpoints of the absolute
    median relative error on that subset, and the repetition's winner is
    the argmin. The returned value is the most frequent winner across
    repetitions, smallest candidate on ties. Results depend only on the
    seed and the set of tasks, not their order.
    """
    if len(corpus) < 3:
        raise ValueError("tuning needs at least 3 tasks")
    streams = sorted(
        ((reports[0].task_id if reports else "", tag_stream(reports)) for reports in corpus),
        key=lambda pair: pair[0],
    )
    tags_by_task = [tags for _, tags in streams]
    n_tasks = len(tags_by_task)

    # errors[candidate][task][level_index], np.nan where undefined
    errors: dict[int, np.ndarray] = {}
    for candidate in candidates:
        matrix = np.full((n_tasks, len(levels)), np.nan)
        for ti, tags in enumerate(tags_by_task):
            errs = checkpoint_errors(tags, candidate, kind, levels)
            for li, level in enumerate(levels):
                if errs[level] is not None:
                    matrix[ti, li] = errs[level]
        errors[candidate] = matrix

    rng = np.random.default_rng(seed)
    subset_size = max(1, round(subset_fraction * n_tasks))
    wins: dict[int, int] = {c: 0 for c in candidates}
    for _ in range(repetitions):
        subset = rng.choice(n_tasks, size=subset_size, replace=False)
        best_candidate = None
        best_score = math.inf
        for candidate in candidates:
            sub = errors[candidate][subset]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                medians = np.nanmedian(sub, axis=0)
            score = float(np.nansum(np.abs(medians)))
            if score < best_score - 1e-12 or (
                abs(score - best_score) <= 1e-12
                and (best_candidate is None or candidate < best_candidate)
            ):
                best_score = score
                best_candidate = candidate
        wins[best_candidate] += 1  # type: ignore[index]
    best = max(wins.items(), key=lambda kv: (kv[1], -kv[0]))
    return best[0]


# -- experiment runner -------------------------------------------------------


@dataclass
class ExperimentTables:
    """Per-method error distributions over the checkpoint grid."""

    checkpoint_kind: CheckpointKind
    levels: tuple[float, ...]
    methods: tuple[str, ...]
    errors: dict[str, np.ndarray]  # method -> tasks x levels, nan = undefined

    def median(self, method: str) -> list[float]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return [float(v) for v in np.nanmedian(self.errors[method], axis=0)]

    def std(self, method: str) -> list[float]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return [float(v) for v in np.nanstd(self.errors[method], axis=0)]

    def pairwise_pvalues(self) -> dict[tuple[str, str], list[float]]:
        out: dict[tuple[str, str], list[float]] = {}
        for i, ma in enumerate(self.methods):
            for mb in self.methods[i + 1 :]:
                ps = []
                for li in range(len(self.levels)):
                    a = self.errors[ma][:, li]
                    b = self.errors[mb][:, li]
                    a = a[~np.isnan(a)]
                    b = b[~np.isnan(b)]
                    if len(a) == 0 or len(b) == 0:
                        ps.append(float("nan"))
                    else:
                        ps.append(mann_whitney_u(list(a), list(b)))
                out[(ma, mb)] = ps
        return out

    def write_csv(self, directory: str | Path) -> None:
        """One file per statistic: rows are methods, columns checkpoints."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        header = ["method"] + [f"{int(round(level * 100))}%" for level in self.levels]
        for name, row_fn in (("median", self.median), ("std", self.std)):
            with open(directory / f"{name}.csv", "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f)
                writer.writerow(header)
                for method in self.methods:
                    writer.writerow([method] + [f"{v:.4f}" for v in row_fn(method)])
        with open(directory / "errors_long.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["method", "level", "task_index", "relative_error"])
            for method in self.methods:
                matrix = self.errors[method]
                for ti in range(matrix.shape[0]):
                    for li, level in enumerate(self.levels):
                        v = matrix[ti, li]
                        if not np.isnan(v):
                            writer.writerow([method, level, ti, f"{v:.6f}"])

    def write_json(self, path: str | Path) -> None:
        payload = {
            "checkpoint_kind": self.checkpoint_kind.value,
            "levels": list(self.levels),
            "methods": list(self.methods),
            "median": {m: self.median(m) for m in self.methods},
            "std": {m: self.std(m) for m in self.methods},
            "mann_whitney_p": {
                f"{a} vs {b}": ps for (a, b), ps in self.pairwise_pvalues().items()
            },
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)


def run_experiment(
    corpus: Sequence[Sequence[Report]],
    kinds: Sequence[EstimatorKind] = tuple(EstimatorKind),
    include_baselines: bool = True,
    checkpoint_kind: CheckpointKind = CheckpointKind.REPORT_PCT,
    smp_sizes: Mapping[EstimatorKind, int] | None = None,
    arima_params: ArimaParams | None = None,
    levels: Sequence[float] = CHECKPOINT_LEVELS,
) -> ExperimentTables:
    """Builds the error tables for estimators and baselines.

    ``REPORT_PCT`` scores total-bug predictions at report-share
    checkpoints. ``BUG_PCT`` scores required-cost predictions: at the
    checkpoint where a share of bugs is reached, predict the cost of the
    next 5% objective and compare with the cost the stream actually
    spent. Deterministic given the corpus.
    """
    smp_sizes = dict(smp_sizes or TUNED_SMP_SIZE)
    tag_lists = [tag_stream(reports) for reports in corpus]
    methods: list[str] = [k.value for k in kinds]
    if include_baselines:
        methods += ["Rayleigh", "Naive"]
    errors = {
        m: np.full((len(tag_lists), len(levels)), np.nan) for m in methods
    }

    if checkpoint_kind is CheckpointKind.REPORT_PCT:
        for ti, tags in enumerate(tag_lists):
            for kind in kinds:
                errs = checkpoint_errors(tags, smp_sizes[kind], kind, levels)
                for li, level in enumerate(levels):
                    if errs[level] is not None:
                        errors[kind.value][ti, li] = errs[level]
            if include_baselines:
                r_errs = rayleigh_checkpoint_errors(tags, levels)
                for li, level in enumerate(levels):
                    if r_errs[level] is not None:
                        errors["Rayleigh"][ti, li] = r_errs[level]
        if include_baselines:
            totals = [len({t for t in tags if t is not None}) for tags in tag_lists]
            loo = naive_loo_medians(totals)
            for ti, (predicted, actual) in enumerate(zip(loo, totals)):
                if actual > 0:
                    err = relative_error(predicted, actual)
                    errors["Naive"][ti, :] = err
    else:
        params = arima_params or ArimaParams()
        primary = kinds[0] if kinds else EstimatorKind.MTH
        actual_costs = np.full((len(tag_lists), len(levels)), np.nan)
        for ti, tags in enumerate(tag_lists):
            cells = _required_cost_errors(
                tags, primary, smp_sizes[primary], params, levels
            )
            for li, (err, actual) in enumerate(cells):
                if actual is not None:
                    actual_costs[ti, li] = actual
                if err is not None:
                    errors[primary.value][ti, li] = err
            if include_baselines:
                r_cells = _rayleigh_cost_errors(tags, levels)
                for li, err in enumerate(r_cells):
                    if err is not None:
                        errors["Rayleigh"][ti, li] = err
        if include_baselines:
            loo = naive_required_cost_matrix(actual_costs)
            for ti in range(len(tag_lists)):
                for li in range(len(levels)):
                    actual = actual_costs[ti, li]
                    predicted = loo[ti, li]
                    if not np.isnan(actual) and actual > 0 and not np.isnan(predicted):
                        errors["Naive"][ti, li] = (predicted - actual) / actual
        methods = [m for m in methods if not np.all(np.isnan(errors[m]))]
        errors = {m: errors[m] for m in methods}

    return ExperimentTables(
        checkpoint_kind=checkpoint_kind,
        levels=tuple(levels),
        methods=tuple(methods),
        errors=errors,
    )


def _window_counts(firsts: Sequence[int], upto_report: int, smp: int) -> list[float]:
    """New-bug counts per completed window of ``smp`` reports."""
    n_windows = upto_report // smp
    counts = [0.0] * n_windows
    for idx in firsts:
        w = (idx - 1) // smp
        if w < n_windows:
            counts[w] += 1.0
    return counts


def _required_cost_errors(
    tags: Sequence[str | None],
    kind: EstimatorKind,
    smp_size: int,
    params: ArimaParams,
    levels: Sequence[float],
) -> list[tuple[float | None, float | None]]:
    """(relative error, actual cost) of next-objective cost per bug level."""
    total = len(tags)
    firsts = first_seen_indices(tags)
    total_bugs = len(firsts)
    out: list[tuple[float | None, float | None]] = []
    rounded, _ = estimate_series_for_stream(tags, smp_size, kind)
    for level in levels:
        next_level = round(level + 0.05, 2)
        if next_level > 1.0 or total_bugs == 0:
            out.append((None, None))
            continue
        here = math.ceil(level * total_bugs - 1e-9)
        there = math.ceil(next_level * total_bugs - 1e-9)
        if here < 1 or there > total_bugs or there <= here:
            out.append((None, None))
            continue
        checkpoint_report = firsts[here - 1]
        actual = float(firsts[there - 1] - checkpoint_report)
        if actual <= 0:
            out.append((None, None))
            continue
        captures = checkpoint_report // smp_size
        n_hat = rounded[captures - 1] if 1 <= captures <= len(rounded) else None
        windows = _window_counts(firsts, checkpoint_report, params.smp_size)
        if n_hat is None or len(windows) < params.train_size:
            out.append((None, actual))
            continue
        window = windows[-params.train_size :]
        model = arima_fit(window, params)
        horizon = arima_forecast(model, window, 100)
        cost = required_cost(next_level, n_hat, here, horizon, params.smp_size)
        predicted = float(cost.extra_reports)
        out.append(((predicted - actual) / actual, actual))
    return out


def _rayleigh_cost_errors(
    tags: Sequence[str | None], levels: Sequence[float]
) -> list[float | None]:
    """Rayleigh-predicted next-objective cost errors per bug level."""
    total = len(tags)
    firsts = first_seen_indices(tags)
    total_bugs = len(firsts)
    out: list[float | None] = []
    for level in levels:
        next_level = round(level + 0.05, 2)
        if next_level > 1.0 or total_bugs == 0:
            out.append(None)
            continue
        here = math.ceil(level * total_bugs - 1e-9)
        there = math.ceil(next_level * total_bugs - 1e-9)
        if here < 1 or there > total_bugs or there <= here:
            out.append(None)
            continue
        checkpoint_report = firsts[here - 1]
        actual = float(firsts[there - 1] - checkpoint_report)
        if actual <= 0:
            out.append(None)
            continue
        counts = np.searchsorted(firsts, np.arange(1, checkpoint_report + 1), side="right")
        points = list(zip(range(1, checkpoint_report + 1), counts.astype(float)))
        try:
            fitted = rayleigh_fit(points)
        except RayleighFitError:
            out.append(None)
            continue
        target_bugs = math.ceil(next_level * fitted.k - 1e-9)
        reach = fitted.reports_to_reach(target_bugs)
        if math.isinf(reach):
            out.append(None)
            continue
        predicted = max(reach - checkpoint_report, 0.0)
        out.append((predicted - actual) / actual)
    return out
