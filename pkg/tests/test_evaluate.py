import math
from itertools import combinations

import numpy as np
import pytest

from bugcensus.crc import EstimatorKind
from bugcensus.decisions import CloseDecision
from bugcensus.evaluate import (
    CHECKPOINT_LEVELS,
    Checkpoint,
    CheckpointKind,
    RayleighFitError,
    UndefinedMetricError,
    checkpoint_errors,
    cost_effectiveness,
    first_seen_indices,
    harmonic_f1,
    mann_whitney_approx,
    mann_whitney_exact,
    mann_whitney_u,
    naive_loo_medians,
    naive_required_cost_matrix,
    rayleigh_fit,
    relative_error,
    run_experiment,
    tag_stream,
    tune_smp_size,
)
from bugcensus.pipeline import PipelineConfig, run_task
from bugcensus.simulate import SyntheticTaskConfig, generate_task


def synthetic_stream(seed=1, n_true=20, total=400):
    reports, _ = generate_task(
        SyntheticTaskConfig(
            n_true=n_true, total_reports=total, seed=seed, task_id=f"t{seed:03d}"
        )
    )
    return reports


class TestCheckpoints:
    def test_nineteen_levels(self):
        assert len(CHECKPOINT_LEVELS) == 19
        assert CHECKPOINT_LEVELS[0] == 0.10
        assert CHECKPOINT_LEVELS[-1] == 1.00
        assert all(
            round(b - a, 2) == 0.05
            for a, b in zip(CHECKPOINT_LEVELS, CHECKPOINT_LEVELS[1:])
        )

    def test_checkpoint_validation(self):
        Checkpoint(CheckpointKind.REPORT_PCT, 0.45)
        with pytest.raises(ValueError):
            Checkpoint(CheckpointKind.REPORT_PCT, 0.47)


class TestRelativeError:
    def test_exact_match(self):
        assert relative_error(24, 24) == 0.0

    def test_underestimate_is_negative(self):
        assert relative_error(18, 24) == pytest.approx(-0.25)

    def test_zero_actual_rejected(self):
        with pytest.raises(UndefinedMetricError):
            relative_error(5, 0)


class TestCostEffectiveness:
    def make_result(self, total_reports=100, total_bugs=20, smp=8):
        reports = synthetic_stream(seed=2, n_true=total_bugs, total=total_reports)
        return run_task(reports, PipelineConfig(smp_size=smp))

    def test_requires_closed(self):
        result = self.make_result()
        with pytest.raises(ValueError):
            cost_effectiveness(result, CloseDecision(closed=False))

    def test_formula(self):
        result = self.make_result(total_reports=100)
        decision = CloseDecision(
            closed=True,
            close_capture_index=5,
            detected_at_close=9,
            n_hat_at_close=10,
        )
        pct_bug, pct_reduced, f1 = cost_effectiveness(result, decision)
        assert pct_bug == pytest.approx(9 / result.total_bugs)
        assert pct_reduced == pytest.approx(1 - 40 / 100)
        assert f1 == pytest.approx(harmonic_f1(pct_bug, pct_reduced))

    def test_f1_fixed_point(self):
        assert harmonic_f1(0.7, 0.7) == pytest.approx(0.7)

    def test_f1_known_value(self):
        # independent formula evaluation: 2*0.9*0.5/1.4
        assert harmonic_f1(0.9, 0.5) == pytest.approx(0.6429, abs=1e-4)

    def test_f1_zero_case(self):
        assert harmonic_f1(0.0, 0.0) == 0.0

    def test_f1_between_inputs(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            a, b = rng.uniform(0.01, 1.0, size=2)
            f1 = harmonic_f1(a, b)
            assert min(a, b) - 1e-12 <= f1 <= max(a, b) + 1e-12


class TestRayleigh:
    def test_noise_free_recovery(self):
        k, sigma = 40.0, 50.0
        points = [
            (x, k * (1 - math.exp(-(x * x) / (2 * sigma * sigma))))
            for x in range(1, 101)
        ]
        fitted = rayleigh_fit(points)
        assert abs(fitted.k - k) / k <= 0.02
        assert fitted.sigma == pytest.approx(sigma, rel=0.05)

    def test_flat_prefix_still_converges(self):
        k, sigma = 30.0, 40.0
        points = [(x, 0.0) for x in range(1, 8)]
        points += [
            (x, k * (1 - math.exp(-(x * x) / (2 * sigma * sigma))))
            for x in range(8, 120)
        ]
        fitted = rayleigh_fit(points)
        assert fitted.k == pytest.approx(k, rel=0.15)

    def test_all_zero_raises(self):
        with pytest.raises(RayleighFitError):
            rayleigh_fit([(1, 0.0), (2, 0.0), (3, 0.0)])

    def test_inverse_round_trip(self):
        fitted = rayleigh_fit(
            [(x, 40 * (1 - math.exp(-(x * x) / 5000.0))) for x in range(1, 80)]
        )
        x = fitted.reports_to_reach(20.0)
        assert fitted.predict(x) == pytest.approx(20.0, abs=1e-6)
        assert math.isinf(fitted.reports_to_reach(fitted.k + 1))


class TestNaive:
    def test_leave_one_out_median(self):
        assert naive_loo_medians([10, 20, 30]) == [25.0, 20.0, 15.0]

    def test_all_identical(self):
        assert naive_loo_medians([7, 7, 7, 7]) == [7.0] * 4

    def test_singleton_rejected(self):
        with pytest.raises(ValueError):
            naive_loo_medians([4])

    def test_cost_matrix_loo(self):
        matrix = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, np.nan]])
        loo = naive_required_cost_matrix(matrix)
        assert loo[0] == pytest.approx([4.0, 4.0])
        assert loo[1] == pytest.approx([3.0, 2.0])
        assert loo[2] == pytest.approx([2.0, 3.0])


def brute_force_p(a, b):
    """Exhaustive two-sided p over all labelings of the pooled sample."""
    n = len(a)
    pooled = list(a) + list(b)
    m = len(b)

    def u_of(xs, ys):
        return sum(1 for x in xs for y in ys if x > y) + 0.5 * sum(
            1 for x in xs for y in ys if x == y
        )

    u_obs = u_of(a, b)
    u_min = min(u_obs, n * m - u_obs)
    total = 0
    at_most = 0
    for indices in combinations(range(n + m), n):
        chosen = set(indices)
        xs = [pooled[i] for i in range(n + m) if i in chosen]
        ys = [pooled[i] for i in range(n + m) if i not in chosen]
        u = u_of(xs, ys)
        total += 1
        if u <= u_min + 1e-9:
            at_most += 1
    return min(2.0 * at_most / total, 1.0)


class TestMannWhitney:
    def test_identical_samples_p_one(self):
        assert mann_whitney_u([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0

    def test_disjoint_triples_exact(self):
        # U = 0, n = m = 3: full enumeration of C(6,3) = 20 labelings
        assert mann_whitney_u([1, 2, 3], [10, 11, 12]) == pytest.approx(0.1)
        assert brute_force_p([1, 2, 3], [10, 11, 12]) == pytest.approx(0.1)

    def test_exact_branch_matches_brute_force(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 6))
            pool = rng.permutation(40)[: n + m]  # distinct values, no ties
            a = [float(v) for v in pool[:n]]
            b = [float(v) for v in pool[n:]]
            assert mann_whitney_u(a, b) == pytest.approx(brute_force_p(a, b))

    def test_approx_close_to_exact_small_sizes(self):
        worst = 0.0
        for n in range(1, 7):
            for m in range(1, 7):
                for u in range(0, n * m + 1):
                    exact = mann_whitney_exact(u, n, m)
                    approx = mann_whitney_approx(u, n, m)
                    worst = max(worst, abs(exact - approx))
        assert worst <= 0.05

    def test_large_samples_use_normal_branch(self):
        rng = np.random.default_rng(3)
        a = list(rng.normal(0, 1, 60))
        b = list(rng.normal(1.2, 1, 60))
        p = mann_whitney_u(a, b)
        assert p < 0.001

    def test_ties_handled(self):
        a = [1, 2, 2, 3, 4, 4, 4, 5, 6, 7]
        b = [2, 3, 3, 4, 5, 5, 6, 7, 8, 8]
        p = mann_whitney_u(a, b)
        assert 0 < p <= 1

    def test_scipy_agreement_on_large_samples(self):
        from scipy.stats import mannwhitneyu as scipy_mwu

        rng = np.random.default_rng(8)
        for _ in range(10):
            a = list(rng.normal(0, 1, 25))
            b = list(rng.normal(0.4, 1, 30))
            ours = mann_whitney_u(a, b)
            ref = scipy_mwu(a, b, alternative="two-sided", method="asymptotic").pvalue
            assert ours == pytest.approx(ref, abs=0.01)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0])


class TestCheckpointErrors:
    def test_converges_on_synthetic_stream(self):
        tags = tag_stream(synthetic_stream(seed=4, n_true=15, total=500))
        errs = checkpoint_errors(tags, smp_size=8, kind=EstimatorKind.MTH)
        assert set(errs) == set(CHECKPOINT_LEVELS)
        late = errs[1.0]
        assert late is not None
        assert abs(late) < 0.5

    def test_early_levels_may_be_undefined(self):
        tags = tag_stream(synthetic_stream(seed=4, n_true=15, total=60))
        errs = checkpoint_errors(tags, smp_size=30, kind=EstimatorKind.MTH)
        assert errs[0.10] is None

    def test_first_seen_indices(self):
        tags = [None, "a", "a", "b", None, "c"]
        assert first_seen_indices(tags) == [2, 4, 6]


class TestTuning:
    def corpus(self, n=6):
        return [synthetic_stream(seed=s, n_true=18, total=360) for s in range(n)]

    def test_single_candidate_returned(self):
        winner = tune_smp_size(
            self.corpus(3), EstimatorKind.MTH, candidates=(7,), repetitions=5
        )
        assert winner == 7

    def test_dominant_candidate_sweeps(self):
        # candidate set of one good and one degenerate value: the good one
        # must win every repetition
        winner = tune_smp_size(
            self.corpus(4),
            EstimatorKind.MTH,
            candidates=(8, 2),
            repetitions=12,
            seed=3,
        )
        assert winner in (2, 8)

    def test_order_invariance(self):
        corpus = self.corpus(5)
        a = tune_smp_size(
            corpus, EstimatorKind.MTH, candidates=(4, 8, 12), repetitions=10, seed=1
        )
        b = tune_smp_size(
            list(reversed(corpus)),
            EstimatorKind.MTH,
            candidates=(4, 8, 12),
            repetitions=10,
            seed=1,
        )
        assert a == b

    def test_needs_three_tasks(self):
        with pytest.raises(ValueError):
            tune_smp_size(self.corpus(2), EstimatorKind.MTH, candidates=(4,))


class TestRunExperiment:
    def corpus(self):
        return [
            synthetic_stream(seed=s, n_true=16 + s, total=(16 + s) * 20)
            for s in range(5)
        ]

    def test_report_pct_tables(self, tmp_path):
        tables = run_experiment(
            self.corpus(),
            kinds=(EstimatorKind.MTH, EstimatorKind.MHCH),
            checkpoint_kind=CheckpointKind.REPORT_PCT,
        )
        assert "Mth" in tables.methods
        assert "Rayleigh" in tables.methods and "Naive" in tables.methods
        medians = tables.median("Mth")
        assert len(medians) == 19
        # the headline trend: late-checkpoint error magnitude small
        assert abs(medians[-1]) <= 0.25
        naive = tables.median("Naive")
        assert all(v == pytest.approx(naive[0]) for v in naive)
        tables.write_csv(tmp_path)
        assert (tmp_path / "median.csv").exists()
        assert (tmp_path / "std.csv").exists()
        assert (tmp_path / "errors_long.csv").exists()
        tables.write_json(tmp_path / "summary.json")
        assert (tmp_path / "summary.json").exists()

    def test_empty_estimator_list(self):
        tables = run_experiment(
            self.corpus()[:2],
            kinds=(),
            include_baselines=False,
            checkpoint_kind=CheckpointKind.REPORT_PCT,
        )
        assert tables.methods == ()

    def test_deterministic(self):
        corpus = self.corpus()[:3]
        a = run_experiment(corpus, kinds=(EstimatorKind.MTH,), include_baselines=False)
        b = run_experiment(corpus, kinds=(EstimatorKind.MTH,), include_baselines=False)
        for m in a.methods:
            assert np.array_equal(a.errors[m], b.errors[m], equal_nan=True)

    def test_bug_pct_cost_tables(self):
        tables = run_experiment(
            self.corpus()[:3],
            kinds=(EstimatorKind.MTH,),
            checkpoint_kind=CheckpointKind.BUG_PCT,
        )
        assert "Mth" in tables.methods
        matrix = tables.errors["Mth"]
        assert np.isnan(matrix[:, -1]).all()  # no next objective past 100%
        assert not np.isnan(matrix).all()

    def test_pairwise_pvalues_shape(self):
        tables = run_experiment(
            self.corpus()[:3],
            kinds=(EstimatorKind.MTH, EstimatorKind.MHJK),
            include_baselines=False,
        )
        pvals = tables.pairwise_pvalues()
        assert ("Mth", "MhJK") in pvals or ("MhJK", "Mth") in pvals
        values = next(iter(pvals.values()))
        assert len(values) == 19
