import numpy as np
import pytest

from bugcensus.simulate import (
    BetaDist,
    PointDist,
    SyntheticTaskConfig,
    corpus_configs,
    generate_corpus,
    generate_task,
    read_ground_truth,
    write_ground_truth,
)


def small_config(**overrides):
    base = dict(n_true=26, total_reports=213, seed=11, task_id="demo")
    base.update(overrides)
    return SyntheticTaskConfig(**base)


class TestGenerateTask:
    def test_reference_scale(self):
        # the average industrial task: 213 reports, 26 true bugs
        reports, truth = generate_task(small_config())
        assert len(reports) == 213
        assert truth.n_true == 26
        assert truth.unique_bugs_emitted <= 26

    def test_all_invalid_rate_one(self):
        reports, truth = generate_task(small_config(invalid_rate=1.0))
        assert all(not r.is_bug for r in reports)
        assert truth.unique_bugs_emitted == 0

    def test_fixed_seed_reproducible(self):
        a, _ = generate_task(small_config())
        b, _ = generate_task(small_config())
        assert a == b

    def test_different_seed_differs(self):
        a, _ = generate_task(small_config())
        b, _ = generate_task(small_config(seed=12))
        assert a != b

    def test_timestamps_non_decreasing(self):
        reports, _ = generate_task(small_config())
        times = [r.timestamp for r in reports]
        assert times == sorted(times)

    def test_tags_consistent_with_truth(self):
        reports, truth = generate_task(small_config())
        for report, bug in zip(reports, truth.bug_of_report):
            assert report.is_bug == (bug is not None)
            if bug is not None:
                assert report.bug_tag == f"bug-{bug + 1:04d}"

    def test_saturation_at_high_volume(self):
        # ten times the average report volume finds nearly every bug
        reports, truth = generate_task(
            small_config(n_true=20, total_reports=2000)
        )
        assert truth.unique_bugs_emitted >= 18

    def test_decreasing_new_bug_rate(self):
        # earlier halves find stochastically more new bugs than later halves
        wins = 0
        for seed in range(20):
            reports, _ = generate_task(small_config(seed=seed, total_reports=400))
            seen: set[str] = set()
            halves = [0, 0]
            for i, r in enumerate(reports):
                if r.is_bug and r.bug_tag not in seen:
                    seen.add(r.bug_tag)
                    halves[i >= len(reports) // 2] += 1
            wins += halves[0] > halves[1]
        assert wins >= 16

    def test_point_distributions_give_homogeneous_regime(self):
        reports, truth = generate_task(
            small_config(
                bug_detectability=PointDist(0.3),
                worker_capability=PointDist(1.0),
            )
        )
        assert set(truth.detectabilities) == {0.3}
        assert set(truth.capabilities) == {1.0}

    def test_validation(self):
        with pytest.raises(ValueError):
            small_config(invalid_rate=1.5)
        with pytest.raises(ValueError):
            small_config(n_true=0)


class TestCorpus:
    def test_sizes_in_range_and_deterministic(self):
        configs = corpus_configs(30, seed=5)
        assert all(10 <= c.n_true <= 90 for c in configs)
        again = corpus_configs(30, seed=5)
        assert configs == again

    def test_reports_scale_with_bugs(self):
        for cfg in corpus_configs(10, seed=1, reports_per_bug=20.0):
            assert cfg.total_reports == max(30, round(20.0 * cfg.n_true))

    def test_generate_corpus_round_trip(self, tmp_path):
        corpus = generate_corpus(3, seed=9)
        assert len(corpus) == 3
        cfg, reports, truth = corpus[0]
        path = tmp_path / "truth.json"
        write_ground_truth(path, truth)
        loaded = read_ground_truth(path)
        assert loaded["n_true"] == truth.n_true
        assert loaded["seed"] == truth.seed
        assert loaded["detectabilities"] == pytest.approx(truth.detectabilities)


class TestDistributions:
    def test_beta_bounds(self):
        rng = np.random.default_rng(0)
        draws = BetaDist().sample(rng, 1000)
        assert np.all((draws >= 0) & (draws <= 1))

    def test_point_mass(self):
        rng = np.random.default_rng(0)
        assert np.all(PointDist(0.25).sample(rng, 10) == 0.25)
