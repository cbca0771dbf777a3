"""ARIMA fitting over sliding windows of per-window bug counts.

The model is the standard ARMA(p, q) recursion on the (optionally
d-times differenced) series

    y_t = c + sum_i phi_i y_{t-i} + sum_j theta_j e_{t-j} + e_t

fitted by conditional least squares: one-step-ahead residuals with
pre-sample errors fixed at zero, summed from t = p. Coefficients are
initialized by a two-stage regression (a long autoregression supplies
residual proxies for the unobserved errors, then y is regressed jointly
on its own lags and the proxy error lags) and refined with a bounded
quasi-Newton minimizer. The refinement is kept only when it does not
worsen the objective, so fits are deterministic and never degrade the
initialization.

Required-cost queries translate a bug-detection objective into reports:
forecast per-window new-bug counts, accumulate until the deficit is
covered, and charge ``windows * smp_size`` reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

COEFFICIENT_BOUND = 2.0
OBJECTIVE_TOLERANCE = 1e-8
MAX_ITERATIONS = 500
DEFAULT_HORIZON_CAP = 100


class WarmUpError(RuntimeError):
    """Forecasts were requested before a full training window exists."""


@dataclass(frozen=True)
class ArimaParams:
    """Model orders and windowing.

    ``train_size`` counts windows used per fit; ``smp_size`` is reports
    per window. Defaults follow the tuned configuration: ARIMA(5, 0, 1)
    on windows of 3 reports, refit over the last 10 windows.
    """

    p: int = 5
    d: int = 0
    q: int = 1
    train_size: int = 10
    smp_size: int = 3

    def __post_init__(self) -> None:
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders p, d, q must be non-negative")
        if self.smp_size < 1:
            raise ValueError("smp_size must be >= 1")
        if self.train_size <= self.p + self.d + self.q:
            raise ValueError(
                f"train_size {self.train_size} must exceed p+d+q = "
                f"{self.p + self.d + self.q} for identifiability"
            )


@dataclass(frozen=True)
class ArimaModel:
    """A fitted model: AR and MA coefficients plus the residual variance."""

    phi: tuple[float, ...]
    theta: tuple[float, ...]
    intercept: float
    sigma_sq: float
    d: int = 0
    fitted_on: int | str | None = None

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)


def difference(series: Sequence[float], d: int) -> list[float]:
    """Applies first differencing ``d`` times; output shrinks by d."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if len(series) <= d:
        raise ValueError(f"series of length {len(series)} too short to difference {d} times")
    values = list(series)
    for _ in range(d):
        values = [b - a for a, b in zip(values, values[1:])]
    return values


def undifference(diffed: Sequence[float], initial: Sequence[float]) -> list[float]:
    """Inverts :func:`difference` given the d dropped leading values.

    ``initial`` holds the first value of each intermediate differencing
    level, outermost first, exactly as needed to reconstruct the original
    series: ``undifference(difference(x, d), heads) == x``.
    """
    values = list(diffed)
    for head in reversed(initial):
        rebuilt = [head]
        for delta in values:
            rebuilt.append(rebuilt[-1] + delta)
        values = rebuilt
    return values


def difference_heads(series: Sequence[float], d: int) -> list[float]:
    """The leading values consumed by each differencing level."""
    heads = []
    values = list(series)
    for _ in range(d):
        heads.append(values[0])
        values = [b - a for a, b in zip(values, values[1:])]
    return heads


def _css_residuals(
    y: np.ndarray, intercept: float, phi: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    """One-step-ahead residuals with pre-sample errors set to zero."""
    p, q = len(phi), len(theta)
    n = len(y)
    errors = np.zeros(n)
    for t in range(p, n):
        pred = intercept
        if p:
            pred += float(phi @ y[t - p : t][::-1])
        for j in range(1, q + 1):
            if t - j >= p:
                pred += theta[j - 1] * errors[t - j]
        errors[t] = y[t] - pred
    return errors[p:]


def _css_objective(params: np.ndarray, y: np.ndarray, p: int, q: int) -> float:
    intercept = params[0]
    phi = params[1 : 1 + p]
    theta = params[1 + p :]
    resid = _css_residuals(y, intercept, phi, theta)
    return float(resid @ resid)


def _two_stage_start(y: np.ndarray, p: int, q: int) -> np.ndarray:
    """Long-AR residual proxies, then a joint regression on y and error lags."""
    n = len(y)
    long_order = min(n - 1, max(p + q, 2 * q, 1))
    rows = [
        np.concatenate(([1.0], y[t - long_order : t][::-1]))
        for t in range(long_order, n)
    ]
    design = np.array(rows)
    target = y[long_order:]
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    proxy = np.zeros(n)
    proxy[long_order:] = target - design @ coef

    start_t = max(p, long_order + q)
    if start_t >= n:
        start_t = max(p, q)
    rows, targets = [], []
    for t in range(start_t, n):
        lag_y = y[t - p : t][::-1] if p else np.empty(0)
        lag_e = np.array([proxy[t - j] for j in range(1, q + 1)])
        rows.append(np.concatenate(([1.0], lag_y, lag_e)))
        targets.append(y[t])
    if not rows:
        return np.zeros(1 + p + q)
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(targets), rcond=None)
    start = np.asarray(coef, dtype=float)
    # Clip AR/MA coefficients into the optimizer's box; keep the intercept.
    start[1:] = np.clip(start[1:], -COEFFICIENT_BOUND, COEFFICIENT_BOUND)
    return start


def fit(
    series: Sequence[float],
    params: ArimaParams,
    window_id: int | str | None = None,
) -> ArimaModel:
    """Fits the model on one training window of raw counts.

    The window is differenced ``params.d`` times before fitting. A
    zero-variance (constant) window short-circuits to the degenerate
    model with the mean as intercept and no optimizer call.
    """
    if len(series) != params.train_size:
        raise ValueError(
            f"expected a window of {params.train_size} values, got {len(series)}"
        )
    y = np.asarray(difference(series, params.d), dtype=float)
    p, q = params.p, params.q
    if np.ptp(y) == 0.0:
        return ArimaModel(
            phi=(0.0,) * p,
            theta=(0.0,) * q,
            intercept=float(y[0]) if len(y) else 0.0,
            sigma_sq=0.0,
            d=params.d,
            fitted_on=window_id,
        )
    start = _two_stage_start(y, p, q)
    start_objective = _css_objective(start, y, p, q)
    bounds = [(None, None)] + [(-COEFFICIENT_BOUND, COEFFICIENT_BOUND)] * (p + q)
    result = minimize(
        _css_objective,
        start,
        args=(y, p, q),
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": MAX_ITERATIONS, "ftol": OBJECTIVE_TOLERANCE},
    )
    best = result.x if result.fun <= start_objective else start
    intercept = float(best[0])
    phi = tuple(float(v) for v in best[1 : 1 + p])
    theta = tuple(float(v) for v in best[1 + p :])
    resid = _css_residuals(y, intercept, np.array(phi), np.array(theta))
    sigma_sq = float(resid @ resid / len(resid)) if len(resid) else 0.0
    return ArimaModel(
        phi=phi,
        theta=theta,
        intercept=intercept,
        sigma_sq=sigma_sq,
        d=params.d,
        fitted_on=window_id,
    )


def forecast(
    model: ArimaModel, history: Sequence[float], horizon: int
) -> list[float]:
    """Iterated one-step forecasts with future errors set to zero.

    ``history`` is the raw count series the model was fitted against (or
    a longer suffix of the same process). Forecasts are produced in the
    differenced space, un-differenced back onto the history, and clamped
    at zero since bug counts cannot be negative.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    y = list(difference(history, model.d))
    if len(y) < model.p:
        raise ValueError(
            f"history provides {len(y)} differenced points, need >= p = {model.p}"
        )
    arr = np.asarray(y, dtype=float)
    errors = list(_css_residuals(arr, model.intercept, np.array(model.phi), np.array(model.theta)))
    errors = [0.0] * model.p + errors
    values = list(y)
    for step in range(horizon):
        t = len(values)
        pred = model.intercept
        for i in range(1, model.p + 1):
            pred += model.phi[i - 1] * values[t - i]
        for j in range(1, model.q + 1):
            if t - j < len(errors):
                pred += model.theta[j - 1] * errors[t - j]
        values.append(pred)
        errors.append(0.0)  # future errors are unknown, use their mean
    raw_forecast = values[len(y):]
    if model.d:
        raw_forecast = _integrate(raw_forecast, history, model.d)
    return [max(v, 0.0) for v in raw_forecast]


def _integrate(deltas: Sequence[float], history: Sequence[float], d: int) -> list[float]:
    """Un-differences forecast deltas against the tail of the raw history."""
    levels = [list(history)]
    for _ in range(d):
        prev = levels[-1]
        levels.append([b - a for a, b in zip(prev, prev[1:])])
    # levels[k] is the k-times differenced history; cumulate back up from
    # the deepest level, seeding each level with its last observed value.
    current = list(deltas)
    for k in range(d - 1, -1, -1):
        last = levels[k][-1]
        rebuilt = []
        for delta in current:
            last = last + delta
            rebuilt.append(last)
        current = rebuilt
    return current


@dataclass(frozen=True)
class CostForecast:
    """Extra reports needed to reach a bug-detection objective."""

    target_pct: float
    target_bugs: int
    extra_reports: int
    horizon_windows: int
    reachable: bool


def required_cost(
    target_pct: float,
    n_hat_rounded: int,
    detected: int,
    window_forecasts: Sequence[float],
    smp_size: int,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
) -> CostForecast:
    """Accumulates forecast per-window bug counts until the objective is met.

    The objective is ``Y = ceil(target_pct * n_hat_rounded)`` bugs; the
    deficit beyond ``detected`` must be covered by forecast new-bug
    arrivals. Reports are charged per whole window. If the deficit
    survives the horizon cap the objective is flagged unreachable (and
    costed at the full capped horizon, which keeps cost monotone in the
    target).
    """
    if not 0 < target_pct <= 1:
        raise ValueError("target_pct must be in (0, 1]")
    target_bugs = math.ceil(target_pct * n_hat_rounded - 1e-9)
    deficit = target_bugs - detected
    if deficit <= 0:
        return CostForecast(target_pct, target_bugs, 0, 0, True)
    cumulative = 0.0
    for window, value in enumerate(window_forecasts[:horizon_cap], start=1):
        cumulative += max(value, 0.0)
        if cumulative >= deficit - 1e-9:
            return CostForecast(target_pct, target_bugs, window * smp_size, window, True)
    return CostForecast(
        target_pct, target_bugs, horizon_cap * smp_size, horizon_cap, False
    )


class SlidingForecaster:
    """Refits on the latest ``train_size`` windows as each window completes.

    Feed per-window new-bug counts with :meth:`push`; before
    ``train_size`` windows exist the forecaster is warming up and refuses
    to forecast.
    """

    def __init__(self, params: ArimaParams) -> None:
        self.params = params
        self._counts: list[float] = []
        self._model: ArimaModel | None = None

    @property
    def window_index(self) -> int:
        return len(self._counts)

    @property
    def ready(self) -> bool:
        return self._model is not None

    @property
    def model(self) -> ArimaModel | None:
        return self._model

    def push(self, window_count: float) -> ArimaModel | None:
        """Registers one completed window; refits once warm."""
        self._counts.append(float(window_count))
        if len(self._counts) >= self.params.train_size:
            window = self._counts[-self.params.train_size :]
            self._model = fit(window, self.params, window_id=len(self._counts))
        return self._model

    def forecast(self, horizon: int) -> list[float]:
        if self._model is None:
            raise WarmUpError(
                f"have {len(self._counts)} windows, need {self.params.train_size}"
            )
        history = self._counts[-self.params.train_size :]
        return forecast(self._model, history, horizon)

    def required_cost(
        self,
        target_pct: float,
        n_hat_rounded: int,
        detected: int,
        horizon_cap: int = DEFAULT_HORIZON_CAP,
    ) -> CostForecast:
        if self._model is None:
            raise WarmUpError(
                f"have {len(self._counts)} windows, need {self.params.train_size}"
            )
        forecasts = self.forecast(horizon_cap)
        return required_cost(
            target_pct,
            n_hat_rounded,
            detected,
            forecasts,
            self.params.smp_size,
            horizon_cap,
        )


def forecast_record(
    task_id: str,
    window_index: int,
    values: Sequence[float],
    cost: CostForecast | None = None,
) -> dict:
    """JSON-ready export record for one forecast step."""
    record: dict = {
        "task_id": task_id,
        "window_index": window_index,
        "forecast": list(values),
    }
    if cost is not None:
        record.update(
            target_pct=cost.target_pct,
            extra_reports=cost.extra_reports,
            reachable=cost.reachable,
        )
    return record


def write_forecasts_jsonl(path: str | Path, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")
