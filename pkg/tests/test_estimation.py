import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pullfit.design import SeriesKind, TruePair, default_design
from pullfit.errors import EmptyValues, MissingCondition, ValidationError, WeightOutOfRange
from pullfit.estimation import (DatasetContext, FitConfig, aic, derive_seed, fit_repeats,
                                fit_weight, hdi, nll_for_weight, optimal_observer_loglik)
from pullfit.observer import Condition, ObserverParams, simulate_dataset
from pullfit.synthesis import EmpiricalDistribution, PairSet

from .oracles import hdi_exhaustive, scan_argmin

LINE, BAR = SeriesKind.LINE, SeriesKind.BAR


def point_mass_context(observations):
    return DatasetContext(
        target_kind=LINE,
        target_dist=EmpiricalDistribution(np.array([0.0]), LINE),
        nontarget_dist=EmpiricalDistribution(np.array([0.0]), BAR),
        pairs=PairSet.from_pairs([TruePair(LINE, 100.0, BAR, 40.0)]),
        observations=np.asarray(observations, dtype=float),
    )


@pytest.fixture(scope="module")
def sim_trials():
    return simulate_dataset(default_design(), ObserverParams(), 1728, 1728, 773, 779,
                            rng=np.random.default_rng(42))


@pytest.fixture(scope="module")
def line_ctx(sim_trials):
    return DatasetContext.from_trials(sim_trials, LINE)


# -- config -------------------------------------------------------------------

def test_fit_config_defaults():
    cfg = FitConfig()
    assert (cfg.M, cfg.repeats, cfg.start_lo, cfg.start_hi) == (10_000, 50, 0.9, 1.0)


@pytest.mark.parametrize("kwargs", [
    dict(start_lo=1.2, start_hi=1.3), dict(weight_lo=0.5, weight_hi=0.5),
    dict(start_lo=0.95, start_hi=0.9), dict(hdi_mass=0.0), dict(grid_size=8),
    dict(weight_hi=1.5), dict(M=0),
])
def test_fit_config_invariants(kwargs):
    with pytest.raises(ValidationError):
        FitConfig(**kwargs)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, r) for r in range(100)}) == 100
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)


# -- nll / fit ----------------------------------------------------------------

def test_nll_is_bit_identical_for_same_seed(line_ctx):
    cfg = FitConfig(M=5000)
    a = nll_for_weight(0.93, line_ctx, cfg, 77)
    b = nll_for_weight(0.93, line_ctx, cfg, 77)
    assert a == b and math.isfinite(a)
    assert nll_for_weight(0.93, line_ctx, cfg, 78) != a


def test_nll_rejects_out_of_bounds(line_ctx):
    with pytest.raises(WeightOutOfRange):
        nll_for_weight(1.2, line_ctx, FitConfig(M=100), 0)


def test_point_mass_scan_minimum():
    ctx = point_mass_context([96.7] * 20)
    cfg = FitConfig(M=64)
    # with every synthetic sample identical the tabulated kernel peaks between two
    # grid nodes, so the objective is flat for |w - 0.945| <= (step / 2) / 60
    plateau = 0.5 * (8 * cfg.degenerate_bandwidth / (cfg.grid_size - 1)) / 60
    w_star = scan_argmin(lambda w: nll_for_weight(w, ctx, cfg, 5), 0.0, 1.0, 1e-4)
    assert w_star == pytest.approx(0.945, abs=plateau + 1e-9)
    inside = nll_for_weight(0.945, ctx, cfg, 5)
    assert nll_for_weight(0.945 + 2 * plateau, ctx, cfg, 5) > inside
    assert nll_for_weight(0.945 - 2 * plateau, ctx, cfg, 5) > inside


@pytest.mark.parametrize("start", [0.9, 0.93, 0.97, 1.0])
def test_point_mass_fit(start):
    ctx = point_mass_context([96.7] * 20)
    fit = fit_weight(ctx, FitConfig(M=64), 5, start)
    assert fit.w_hat == pytest.approx(0.945, abs=1e-3)


def test_all_observations_off_support_cost_the_floor():
    ctx = point_mass_context([-500.0] * 7)
    cfg = FitConfig(M=64)
    assert nll_for_weight(0.945, ctx, cfg, 1) == pytest.approx(7 * -math.log(cfg.density_floor))


def test_start_outside_interval(line_ctx):
    with pytest.raises(WeightOutOfRange):
        fit_weight(line_ctx, FitConfig(M=100), 0, 0.5)


def test_optimal_observer_is_mixture_at_unit_weight(line_ctx):
    cfg = FitConfig(M=5000)
    assert optimal_observer_loglik(line_ctx, cfg, 11) == -nll_for_weight(1.0, line_ctx, cfg, 11)
    assert optimal_observer_loglik(line_ctx, cfg, 11) != optimal_observer_loglik(line_ctx, cfg, 12)


def test_optimal_observer_maximal_for_single_percept_data():
    ctx = point_mass_context([100.0] * 10)
    cfg = FitConfig(M=64)
    best = optimal_observer_loglik(ctx, cfg, 3)
    for w in np.linspace(0, 1, 101):
        assert -nll_for_weight(float(w), ctx, cfg, 3) <= best


def test_duplicated_observations_scale_nll_and_keep_argmin(line_ctx):
    cfg = FitConfig(M=5000)
    doubled = DatasetContext(line_ctx.target_kind, line_ctx.target_dist,
                             line_ctx.nontarget_dist, line_ctx.pairs,
                             np.concatenate([line_ctx.observations, line_ctx.observations]))
    assert nll_for_weight(0.95, doubled, cfg, 4) == pytest.approx(
        2 * nll_for_weight(0.95, line_ctx, cfg, 4), rel=1e-12)
    a = fit_weight(line_ctx, cfg, 4, 0.95).w_hat
    b = fit_weight(doubled, cfg, 4, 0.95).w_hat
    assert a == pytest.approx(b, abs=cfg.optimizer_tol)


# -- aic / hdi ------------------------------------------------------------------

def test_aic_examples():
    assert aic(0, 0.0) == 0
    assert aic(2, -1000.0) == 2004
    l_mix, l_opt = -5000.0, -5060.0
    assert aic(2, l_mix) - aic(0, l_opt) == 4 - 2 * (l_mix - l_opt)


def test_hdi_examples():
    assert hdi([3.3] * 10, 0.95) == (3.3, 3.3)
    assert hdi(range(1, 101), 0.95) == (1, 95)
    assert hdi([5, -2, 9, 1], 1.0) == (-2, 9)


def test_hdi_empty():
    with pytest.raises(EmptyValues):
        hdi([], 0.9)


def test_hdi_matches_exhaustive_search():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 51))
        # integer-valued draws make width ties common
        values = rng.integers(0, 20, n).astype(float) if rng.random() < 0.5 \
            else rng.normal(0, 1, n)
        mass = float(rng.choice([0.5, 0.8, 0.9, 0.95, 1.0, rng.uniform(0.05, 1)]))
        assert hdi(values, mass) == hdi_exhaustive(values.tolist(), mass)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=80), st.floats(0.01, 1.0))
@settings(max_examples=100)
def test_hdi_contains_required_mass(values, mass):
    lo, hi = hdi(values, mass)
    inside = sum(lo <= v <= hi for v in values)
    assert inside >= math.ceil(mass * len(values) - 1e-9)


# -- repeat protocol ----------------------------------------------------------

def test_fit_repeats_aggregates(sim_trials):
    cfg = FitConfig(M=3000, repeats=6, base_seed=3)
    res = fit_repeats(sim_trials, cfg, workers=1)
    recs = res.per_repeat
    assert [r.repeat for r in recs] == list(range(6))
    assert res.n_params == 2 and (res.n_obs_line, res.n_obs_bar) == (773, 779)
    assert res.mean_w_line == pytest.approx(np.mean([r.w_line_hat for r in recs]), abs=1e-12)
    assert res.mean_w_bar == pytest.approx(np.mean([r.w_bar_hat for r in recs]), abs=1e-12)
    assert res.mean_delta_aic == pytest.approx(np.mean([r.delta_aic for r in recs]), abs=1e-12)
    assert res.n_positive_delta == sum(r.delta_aic > 0 for r in recs)
    for r in recs:
        assert 0.9 <= r.start_w_line <= 1.0 and 0.9 <= r.start_w_bar <= 1.0
        assert r.delta_aic == pytest.approx(4 - 2 * (r.loglik_mixture - r.loglik_optimal),
                                            abs=1e-9)
        assert r.aic_mixture == aic(2, r.loglik_mixture)
        assert r.aic_optimal == aic(0, r.loglik_optimal)


def test_fit_repeats_worker_invariance(sim_trials):
    cfg = FitConfig(M=2000, repeats=5, base_seed=8)
    assert fit_repeats(sim_trials, cfg, workers=1).per_repeat == \
        fit_repeats(sim_trials, cfg, workers=3).per_repeat


def test_fit_repeats_single_kind(sim_trials):
    line_only = [t for t in sim_trials
                 if not (t.condition is Condition.COMPOUND and t.target_kind is BAR)]
    res = fit_repeats(line_only, FitConfig(M=2000, repeats=3), workers=1)
    assert res.n_params == 1 and res.mean_w_bar is None and res.hdi_w_bar is None
    assert res.warnings and "bar" in res.warnings[0]
    for r in res.per_repeat:
        assert r.w_bar_hat is None
        assert r.aic_mixture == aic(1, r.loglik_mixture)


def test_fit_repeats_without_compound_trials(sim_trials):
    singles = [t for t in sim_trials if t.condition is Condition.SINGLE]
    with pytest.raises(MissingCondition):
        fit_repeats(singles, FitConfig(M=500, repeats=1))


def test_unit_weight_data_fits_near_one():
    trials = simulate_dataset(default_design(),
                              ObserverParams(w_line_target=1.0, w_bar_target=1.0),
                              1728, 1728, 773, 779, rng=np.random.default_rng(6))
    res = fit_repeats(trials, FitConfig(repeats=20, base_seed=1), workers=1)
    hits = sum(r.w_line_hat >= 0.99 for r in res.per_repeat)
    assert hits >= 0.9 * 20
