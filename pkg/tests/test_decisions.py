import math

import pytest

from bugcensus.crc import CrcEstimate, EstimatorKind
from bugcensus.decisions import (
    CloseCriterion,
    CloseDecision,
    TradeoffBenchmarks,
    TradeoffRegion,
    classify_tradeoff,
    evaluate_close,
    next_objective,
)

from conftest import T0


def est(rounded, index=1):
    return CrcEstimate(
        kind=EstimatorKind.MTH,
        capture_index=index,
        n_hat=float(rounded),
        n_hat_rounded=rounded,
    )


def history(*rounded):
    return [None if r is None else est(r, i + 1) for i, r in enumerate(rounded)]


class TestEvaluateClose:
    def test_boundary_ratio_closes(self):
        # 27/30 = 0.90 exactly, stable pair
        decision = evaluate_close(history(30, 30), [26, 27], CloseCriterion(0.90))
        assert decision.closed
        assert decision.close_capture_index == 2
        assert decision.detected_at_close == 27
        assert decision.n_hat_at_close == 30

    def test_stability_violation_blocks(self):
        decision = evaluate_close(history(30, 29), [29, 29], CloseCriterion(1.0))
        assert not decision.closed

    def test_empty_history(self):
        assert not evaluate_close([], [], CloseCriterion(0.9)).closed

    def test_placeholder_breaks_stability_run(self):
        decision = evaluate_close(
            history(30, None, 30), [30, 30, 30], CloseCriterion(1.0)
        )
        assert not decision.closed

    def test_scalar_detected_applies_to_last_capture_only(self):
        # same estimates, but the ratio is only testable at the end
        decision = evaluate_close(history(30, 30, 30), 27, CloseCriterion(0.9))
        assert decision.closed
        assert decision.close_capture_index == 3

    def test_first_qualifying_capture_wins(self):
        decision = evaluate_close(
            history(20, 20, 20, 20), [15, 18, 19, 20], CloseCriterion(0.9)
        )
        assert decision.close_capture_index == 2  # 18/20 = 0.9

    def test_close_time_stamped_from_capture_times(self):
        times = [T0, T0.replace(minute=30)]
        decision = evaluate_close(
            history(30, 30), [27, 27], CloseCriterion(0.9), capture_times=times
        )
        assert decision.close_time == times[1]

    def test_monotone_in_target(self):
        # closed under tau implies closed no later under any smaller tau
        hist = history(25, 25, 24, 24, 24, 24)
        detected = [10, 15, 18, 20, 22, 24]
        close_at = {}
        for target in (1.0, 0.95, 0.9, 0.8, 0.7):
            decision = evaluate_close(hist, detected, CloseCriterion(target))
            close_at[target] = (
                decision.close_capture_index if decision.closed else math.inf
            )
        ordered = [close_at[t] for t in (0.7, 0.8, 0.9, 0.95, 1.0)]
        assert ordered == sorted(ordered)

    def test_never_fires_before_first_estimate(self):
        decision = evaluate_close(
            history(None, None, 10), [9, 10, 10], CloseCriterion(1.0, stability_span=1)
        )
        assert decision.closed
        assert decision.close_capture_index == 3

    def test_stability_span_one(self):
        decision = evaluate_close(history(30), [30], CloseCriterion(1.0, 1))
        assert decision.closed

    def test_criterion_validation(self):
        with pytest.raises(ValueError):
            CloseCriterion(0.0)
        with pytest.raises(ValueError):
            CloseCriterion(0.9, stability_span=0)

    def test_closed_decision_requires_fields(self):
        with pytest.raises(ValueError):
            CloseDecision(closed=True)


class TestClassifyTradeoff:
    BENCH = TradeoffBenchmarks(quality=0.85, cost=10)

    def test_high_quality_high_cost_is_close(self):
        # the "requires 14 extra at 90% achieved" narrative
        assert classify_tradeoff(0.90, 14, self.BENCH) is TradeoffRegion.CLOSE

    def test_low_quality_low_cost_is_continue(self):
        assert classify_tradeoff(0.65, 3, self.BENCH) is TradeoffRegion.CONTINUE

    def test_boundary_is_think_twice(self):
        assert classify_tradeoff(0.85, 10, self.BENCH) is TradeoffRegion.THINK_TWICE

    def test_low_quality_high_cost_is_drill_down(self):
        assert classify_tradeoff(0.5, 50, self.BENCH) is TradeoffRegion.DRILL_DOWN

    def test_unreachable_cost(self):
        assert classify_tradeoff(0.9, math.inf, self.BENCH) is TradeoffRegion.CLOSE
        assert classify_tradeoff(0.5, math.inf, self.BENCH) is TradeoffRegion.DRILL_DOWN

    def test_total_and_deterministic(self):
        import random

        rng = random.Random(2)
        for _ in range(300):
            achieved = rng.random()
            cost = rng.choice([rng.uniform(0, 40), math.inf])
            bench = TradeoffBenchmarks(rng.uniform(0.1, 1.0), rng.uniform(0, 30))
            region = classify_tradeoff(achieved, cost, bench)
            assert region in TradeoffRegion
            assert classify_tradeoff(achieved, cost, bench) is region

    def test_scale_invariance(self):
        import random

        rng = random.Random(3)
        for _ in range(100):
            achieved = rng.random()
            cost = rng.uniform(0, 40)
            quality = rng.uniform(0.1, 1.0)
            budget = rng.uniform(0.1, 30)
            factor = rng.uniform(0.1, 20)
            a = classify_tradeoff(achieved, cost, TradeoffBenchmarks(quality, budget))
            b = classify_tradeoff(
                achieved, cost * factor, TradeoffBenchmarks(quality, budget * factor)
            )
            assert a is b

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            classify_tradeoff(math.nan, 1.0, self.BENCH)


class TestNextObjective:
    @pytest.mark.parametrize(
        "achieved,expected",
        [(0.80, 0.85), (0.82, 0.85), (0.99, 1.00), (0.0, 0.05), (0.849, 0.85)],
    )
    def test_grid(self, achieved, expected):
        assert next_objective(achieved) == pytest.approx(expected)

    def test_exact_level_moves_up(self):
        assert next_objective(0.85) == pytest.approx(0.90)

    def test_at_or_above_one_raises(self):
        with pytest.raises(ValueError):
            next_objective(1.0)
