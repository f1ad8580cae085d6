import numpy as np
import pytest

from pullfit.design import Configuration, Half, SeriesKind, default_design
from pullfit.errors import EmptySelection, InvalidCounts, ValidationError
from pullfit.observer import (Condition, ObserverParams, TrialRecord, sample_single_percept,
                              simulate_dataset, summarize_errors)

from .conftest import single

NOISELESS = dict(sigma_line=0.0, sigma_bar=0.0)


def test_single_percept_noiseless(rng):
    p = ObserverParams(**NOISELESS)
    assert sample_single_percept(SeriesKind.LINE, 105, p, rng) == 105 + -4.49
    assert sample_single_percept(SeriesKind.BAR, 35, p, rng) == 35 + 4.19
    assert sample_single_percept(SeriesKind.LINE, 105, p, rng) == pytest.approx(100.51, abs=1e-12)
    assert sample_single_percept(SeriesKind.BAR, 35, p, rng) == pytest.approx(39.19, abs=1e-12)


def test_single_percept_mean():
    rng = np.random.default_rng(3)
    p = ObserverParams()
    draws = [sample_single_percept(SeriesKind.LINE, 105, p, rng) for _ in range(100_000)]
    assert abs(np.mean(draws) - 100.51) <= 0.07


def test_params_validation():
    with pytest.raises(ValidationError):
        ObserverParams(w_line_target=1.1)
    with pytest.raises(ValidationError):
        ObserverParams(sigma_bar=-1)


def test_trial_record_consistency():
    with pytest.raises(ValidationError):
        TrialRecord(0, Condition.SINGLE, SeriesKind.LINE, Half.TOP, 105, SeriesKind.BAR, 35, 100)
    with pytest.raises(ValidationError):
        TrialRecord(0, Condition.COMPOUND, SeriesKind.LINE, Half.TOP, 105, None, None, 100)


def test_unit_weight_ignores_nontarget(rng):
    p = ObserverParams(w_line_target=1.0, **NOISELESS)
    trials = simulate_dataset(default_design(), p, 0, 0, 200, 0, rng=rng)
    for t in trials:
        assert t.estimate == t.true_target + -4.49


def test_deterministic_mixture():
    p = ObserverParams(w_line_target=0.945, bias_line=0, bias_bar=0, **NOISELESS)
    trials = simulate_dataset(default_design(), p, 0, 0, 300, 0,
                              rng=np.random.default_rng(0))
    hits = [t for t in trials if t.true_target == 105 and t.true_nontarget == 35]
    assert hits
    for t in hits:
        assert t.estimate == pytest.approx(101.15, abs=1e-9)
    for t in trials:
        assert t.estimate == pytest.approx(0.945 * t.true_target + 0.055 * t.true_nontarget)


def test_compound_counts(rng):
    trials = simulate_dataset(default_design(), ObserverParams(), 10, 12, 773, 779, rng=rng)
    compound = [t for t in trials if t.condition is Condition.COMPOUND]
    assert len(compound) == 1552
    assert sum(t.target_kind is SeriesKind.LINE for t in compound) == 773
    assert [t.trial_id for t in trials] == list(range(len(trials)))


def test_negative_counts(rng):
    with pytest.raises(InvalidCounts):
        simulate_dataset(default_design(), ObserverParams(), -1, 0, 0, 0, rng=rng)


def test_halves_and_means_follow_configuration(rng):
    d = default_design()
    trials = simulate_dataset(d, ObserverParams(), 50, 50, 50, 50,
                              Configuration.BAR_TOP_LINE_BOTTOM, rng)
    for t in trials:
        if t.target_kind is SeriesKind.LINE:
            assert t.target_half is Half.BOTTOM and t.true_target in d.line_bottom
        else:
            assert t.target_half is Half.TOP and t.true_target in d.bar_top
        if t.condition is Condition.COMPOUND:
            assert t.nontarget_kind is t.target_kind.other


def test_noiseless_simulation_is_deterministic_in_pairs():
    p = ObserverParams(**NOISELESS)
    a = simulate_dataset(default_design(), p, 20, 20, 20, 20, rng=np.random.default_rng(5))
    b = simulate_dataset(default_design(), p, 20, 20, 20, 20, rng=np.random.default_rng(5))
    assert a == b
    for t in a:
        if t.condition is Condition.COMPOUND:
            w = p.weight(t.target_kind)
            expected = (w * (t.true_target + p.bias(t.target_kind))
                        + (1 - w) * (t.true_nontarget + p.bias(t.target_kind.other)))
            assert t.estimate == pytest.approx(expected, abs=1e-9)


def test_summarize_two_points():
    trials = [single(0, "line", 105, 100), single(1, "line", 105, 101)]
    s = summarize_errors(trials)
    assert s.n == 2 and s.mean_error == -4.5 and s.se == pytest.approx(0.5)


def test_summarize_zero_errors():
    trials = [single(i, "bar", 35, 35) for i in range(5)]
    s = summarize_errors(trials, condition="single", kind="bar")
    assert (s.mean_error, s.se) == (0.0, 0.0)


def test_summarize_simulated_bias():
    trials = simulate_dataset(default_design(), ObserverParams(), 10_000, 0, 0, 0,
                              rng=np.random.default_rng(11))
    s = summarize_errors(trials, condition="single", kind="line")
    assert s.n == 10_000
    assert abs(s.mean_error - -4.49) <= 0.20


def test_summarize_empty_selection():
    with pytest.raises(EmptySelection):
        summarize_errors([single(0, "line", 105, 100)], kind="bar")


def test_single_errors_recover_bias_and_sigma():
    p = ObserverParams()
    trials = simulate_dataset(default_design(), p, 0, 40_000, 0, 0,
                              rng=np.random.default_rng(8))
    err = np.array([t.error for t in trials])
    assert err.mean() == pytest.approx(p.bias_bar, abs=3 * p.sigma_bar / 200)
    assert err.std(ddof=1) == pytest.approx(p.sigma_bar, rel=0.02)


def test_unit_weight_compound_errors_match_single_errors():
    from scipy.stats import ks_2samp

    p = ObserverParams(w_line_target=1.0)
    trials = simulate_dataset(default_design(), p, 10_000, 0, 10_000, 0,
                              rng=np.random.default_rng(21))
    singles = [t.error for t in trials if t.condition is Condition.SINGLE]
    compounds = [t.error for t in trials if t.condition is Condition.COMPOUND]
    assert ks_2samp(singles, compounds).statistic < 0.03
