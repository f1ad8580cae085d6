"""Perceptual-pull mixture model for position estimates in compound graphs.

Compound-display estimates are modelled as weighted mixtures of
independently perceived target and non-target positions. Target weights are
fitted by maximum synthetic likelihood (Gaussian KDE over resampled
single-series errors) and compared with an ideal observer by AIC.
"""

__version__ = "0.1.0"

from .design import (Configuration, DesignMeans, Half, Profile, SeriesKind, SeriesSpec,
                     TruePair, default_design, design_pairs, generate_series,
                     sample_true_pair)
from .estimation import (DatasetContext, FitConfig, FitResult, RepeatRecord, aic,
                         derive_seed, fit_repeats, fit_weight, hdi, nll_for_weight,
                         optimal_observer_loglik)
from .kde import KdeModel, build_kde, density_at, log_likelihood, silverman_bandwidth
from .observer import (Condition, ObserverParams, TrialRecord, sample_single_percept,
                       simulate_dataset, summarize_errors)
from .synthesis import (EmpiricalDistribution, PairSet, SyntheticSamples, draw_error,
                        empirical_from_trials, resample_target_percepts,
                        synthesize_compound)
