"""Test cases for fairness metrics and the SIMin-vs-SMax Monte Carlo."""
import numpy as np
import pytest

from sieeopt.errors import InvalidParameterError
from sieeopt.controller import fairness
from sieeopt.controller.fairness import (
    FairnessTrialConfig,
    am_hm_gap,
    available_metrics,
    fairness_experiment,
    fairness_sweep,
    get_metric,
    jains_index,
    max_min_inverse,
    max_min_ratio,
    register_metric,
    simin_smax_compare,
    trial_candidates,
)


def test_jains_index_examples() -> None:
    assert jains_index([2.0, 5.0]) == pytest.approx(49.0 / 58.0)
    assert jains_index([3.0, 3.0, 3.0]) == pytest.approx(1.0)
    assert jains_index([1.0, 1e-9]) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_jains_index_bounds(seed: int) -> None:
    x = np.random.default_rng(seed).uniform(0.1, 10.0, size=7)
    assert 1.0 / 7.0 <= jains_index(x) <= 1.0


def test_max_min_metrics() -> None:
    assert max_min_ratio([2.0, 5.0, 4.0]) == pytest.approx(2.5)
    assert max_min_inverse([2.0, 5.0, 4.0]) == pytest.approx(0.4)
    assert max_min_ratio([3.0, 3.0]) == 1.0


@pytest.mark.parametrize("x", [[], [1.0, 0.0], [1.0, -2.0], [1.0, np.inf]])
def test_metrics_reject_bad_vectors(x) -> None:
    with pytest.raises(InvalidParameterError):
        jains_index(x)
    with pytest.raises(InvalidParameterError):
        max_min_ratio(x)


def test_picks_example() -> None:
    picks = simin_smax_compare([[2.0, 5.0], [3.0, 3.0]])
    np.testing.assert_array_equal(picks.smax, [2.0, 5.0])
    np.testing.assert_array_equal(picks.simin, [3.0, 3.0])


def test_picks_reject_bad_candidates() -> None:
    with pytest.raises(InvalidParameterError):
        simin_smax_compare(np.empty((0, 2)))
    with pytest.raises(InvalidParameterError):
        simin_smax_compare([[1.0, 0.0]])


def test_am_hm_gap() -> None:
    rng = np.random.default_rng(0)
    for x, y in rng.uniform(1e-3, 1e3, size=(1000, 2)):
        assert am_hm_gap(x, y) >= -1e-9 * max(x, y)
    assert am_hm_gap(4.0, 4.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        am_hm_gap(0.0, 1.0)


@pytest.mark.parametrize("seed", range(200))
def test_two_term_smax_pick_is_less_balanced(seed: int) -> None:
    rng = np.random.default_rng(seed)
    candidates = rng.uniform(1.0, 50.0, size=(int(rng.integers(1, 20)), 2))
    picks = simin_smax_compare(candidates)
    assert max_min_ratio(picks.smax) >= max_min_ratio(picks.simin) - 1e-12


@pytest.mark.parametrize("range_max", [5.0, 10.0, 50.0])
@pytest.mark.parametrize("metric", ["maxmin_inverse", "jain"])
def test_two_terms_always_favor_simin(range_max: float, metric: str) -> None:
    cfg = FairnessTrialConfig(n_terms=2, range_max=range_max, n_trials=10_000)
    assert fairness_experiment(cfg, metric) == 100.0


@pytest.mark.parametrize("n_terms", [3, 6, 10, 12])
def test_jain_favors_simin_with_high_probability(n_terms: int) -> None:
    cfg = FairnessTrialConfig(n_terms=n_terms, range_max=5.0, n_trials=10_000)
    assert fairness_experiment(cfg, "jain") > 50.0


def test_degenerate_range_counts_ties() -> None:
    cfg = FairnessTrialConfig(n_terms=5, range_max=1.0 + 1e-12, n_trials=200)
    assert fairness_experiment(cfg, "jain") == 100.0


def test_trials_are_reproducible() -> None:
    cfg = FairnessTrialConfig(n_terms=4, seed=7)
    np.testing.assert_array_equal(trial_candidates(cfg, 3), trial_candidates(cfg, 3))
    assert not np.array_equal(trial_candidates(cfg, 3), trial_candidates(cfg, 4))
    cands = trial_candidates(cfg, 0)
    assert cands.shape == (cfg.n_candidates, 4)
    assert np.all((cands >= 1.0) & (cands <= cfg.range_max))


@pytest.mark.parametrize(
    "kwargs",
    [{"n_terms": 1}, {"range_max": 1.0}, {"n_candidates": 0}, {"n_trials": 0}, {"seed": -1}],
)
def test_invalid_trial_config(kwargs) -> None:
    with pytest.raises(InvalidParameterError):
        FairnessTrialConfig(**kwargs)


def test_metric_registry(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(fairness, "_METRICS", dict(fairness._METRICS))
    assert available_metrics() == ["jain", "maxmin_inverse"]
    with pytest.raises(InvalidParameterError):
        get_metric("entropy")
    with pytest.raises(InvalidParameterError):
        register_metric("jain", jains_index)

    register_metric("neg_std", lambda x: -float(np.std(x)))
    assert "neg_std" in available_metrics()
    cfg = FairnessTrialConfig(n_terms=2, n_trials=100)
    assert fairness_experiment(cfg, "neg_std") == 100.0


def test_sweep_layout() -> None:
    points = fairness_sweep([2, 3], [5.0, 10.0], "maxmin_inverse", n_candidates=8, n_trials=50, seed=1)
    assert [(p.range_max, p.n_terms) for p in points] == [(5.0, 2), (5.0, 3), (10.0, 2), (10.0, 3)]
    assert all(p.metric == "maxmin_inverse" for p in points)
    assert points[0].percentage == 100.0


def test_sweep_accepts_one_shot_iterables() -> None:
    points = fairness_sweep(
        (n for n in [2, 3]), iter([5.0, 10.0]), "maxmin_inverse", n_candidates=8, n_trials=50, seed=1
    )
    assert [(p.range_max, p.n_terms) for p in points] == [(5.0, 2), (5.0, 3), (10.0, 2), (10.0, 3)]
