"""Synthetic observer used as ground truth for parameter recovery.

Each series is perceived independently as ``true mean + Normal(bias, sigma)``.
A compound estimate mixes the target and non-target percepts with the
kind-specific target weight.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .design import Configuration, DesignMeans, Half, SeriesKind
from .errors import EmptySelection, InvalidCounts, ValidationError


class Condition(str, enum.Enum):
    SINGLE = "single"
    COMPOUND = "compound"


@dataclass(frozen=True)
class ObserverParams:
    # sigmas are rough SD = SE * sqrt(n) guesses; biases are reported mean errors
    bias_line: float = -4.49
    sigma_line: float = 6.5
    bias_bar: float = 4.19
    sigma_bar: float = 5.1
    w_line_target: float = 0.945
    w_bar_target: float = 0.971

    def __post_init__(self):
        for name in ("sigma_line", "sigma_bar"):
            if not getattr(self, name) >= 0:
                raise ValidationError(f"observer.{name} must be >= 0")
        for name in ("w_line_target", "w_bar_target"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValidationError(f"observer.{name} must lie in [0, 1]")

    def bias(self, kind: SeriesKind) -> float:
        return self.bias_line if kind is SeriesKind.LINE else self.bias_bar

    def sigma(self, kind: SeriesKind) -> float:
        return self.sigma_line if kind is SeriesKind.LINE else self.sigma_bar

    def weight(self, target_kind: SeriesKind) -> float:
        return self.w_line_target if target_kind is SeriesKind.LINE else self.w_bar_target


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    condition: Condition
    target_kind: SeriesKind
    target_half: Half
    true_target: float
    nontarget_kind: Optional[SeriesKind]
    true_nontarget: Optional[float]
    estimate: float

    def __post_init__(self):
        has_nt = (self.nontarget_kind is not None, self.true_nontarget is not None)
        if self.condition is Condition.SINGLE and any(has_nt):
            raise ValidationError(f"trial {self.trial_id}: single trial with non-target fields")
        if self.condition is Condition.COMPOUND and not all(has_nt):
            raise ValidationError(f"trial {self.trial_id}: compound trial missing non-target fields")

    @property
    def error(self) -> float:
        return self.estimate - self.true_target


def sample_single_percept(kind: SeriesKind, true_mean: float, params: ObserverParams,
                          rng: np.random.Generator) -> float:
    return true_mean + rng.normal(params.bias(kind), params.sigma(kind))


def _percepts(kind, means, params, rng):
    return means + rng.normal(params.bias(kind), params.sigma(kind), means.size)


def simulate_dataset(design: DesignMeans, params: ObserverParams,
                     n_single_line: int, n_single_bar: int,
                     n_compound_line_target: int, n_compound_bar_target: int,
                     configuration: Configuration = Configuration.LINE_TOP_BAR_BOTTOM,
                     rng: Optional[np.random.Generator] = None) -> list[TrialRecord]:
    """Generate single and compound trials for one compound configuration.

    Trials come out in blocks (single line, single bar, compound line-target,
    compound bar-target) with ``trial_id`` running densely from 0. Single
    series are shown in the half they occupy in ``configuration``.
    """
    counts = dict(n_single_line=n_single_line, n_single_bar=n_single_bar,
                  n_compound_line_target=n_compound_line_target,
                  n_compound_bar_target=n_compound_bar_target)
    for name, n in counts.items():
        if n < 0:
            raise InvalidCounts(f"{name} must be >= 0, got {n}")
    if rng is None:
        rng = np.random.default_rng()

    trials: list[TrialRecord] = []

    def add(condition, kind, t_means, estimates, nt_means=None):
        half = configuration.half_of(kind)
        for i in range(t_means.size):
            compound = nt_means is not None
            trials.append(TrialRecord(
                trial_id=len(trials),
                condition=condition,
                target_kind=kind,
                target_half=half,
                true_target=float(t_means[i]),
                nontarget_kind=kind.other if compound else None,
                true_nontarget=float(nt_means[i]) if compound else None,
                estimate=float(estimates[i]),
            ))

    for kind, n in ((SeriesKind.LINE, n_single_line), (SeriesKind.BAR, n_single_bar)):
        means = rng.choice(design.means(kind, configuration.half_of(kind)), size=n)
        add(Condition.SINGLE, kind, means, _percepts(kind, means, params, rng))

    for kind, n in ((SeriesKind.LINE, n_compound_line_target),
                    (SeriesKind.BAR, n_compound_bar_target)):
        other = kind.other
        t_means = rng.choice(design.means(kind, configuration.half_of(kind)), size=n)
        nt_means = rng.choice(design.means(other, configuration.half_of(other)), size=n)
        x_t = _percepts(kind, t_means, params, rng)
        x_nt = _percepts(other, nt_means, params, rng)
        w = params.weight(kind)
        add(Condition.COMPOUND, kind, t_means, w * x_t + (1.0 - w) * x_nt, nt_means)

    return trials


@dataclass(frozen=True)
class ErrorSummary:
    n: int
    mean_error: float
    se: float


def select_trials(trials: Sequence[TrialRecord], condition=None, kind=None,
                  half=None) -> list[TrialRecord]:
    return [t for t in trials
            if (condition is None or t.condition is Condition(condition))
            and (kind is None or t.target_kind is SeriesKind(kind))
            and (half is None or t.target_half is Half(half))]


def summarize_errors(trials: Sequence[TrialRecord], condition=None, kind=None,
                     half=None) -> ErrorSummary:
    """Mean estimation error and its standard error over a filtered subset."""
    chosen = select_trials(trials, condition, kind, half)
    if not chosen:
        raise EmptySelection("no trials match the filter")
    errors = np.array([t.error for t in chosen])
    n = errors.size
    se = float(errors.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return ErrorSummary(n=n, mean_error=float(errors.mean()), se=se)
