"""Pooled empirical error distributions and synthetic compound estimates.

Random-number consumption is fixed: every synthetic sample takes three
uniforms, in the order (pair, target error, non-target error). Two calls that
start from equally seeded generators therefore draw identical pairs and
errors whatever the weight, which is what makes common-random-number
likelihood evaluation possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .design import FRAME_MAX, Half, SeriesKind, TruePair
from .errors import EmptyDesign, InsufficientSingles, ValidationError, WeightOutOfRange
from .observer import Condition, TrialRecord

# "obviously wrong": a response in the far quarter of the frame
_TOP_HALF_REJECT = (0.0, FRAME_MAX / 4)              # [0, 35)
_BOTTOM_HALF_REJECT = (FRAME_MAX * 3 / 4, FRAME_MAX)  # (105, 140]


def is_obviously_wrong(half: Half, estimate: float) -> bool:
    if half is Half.TOP:
        lo, hi = _TOP_HALF_REJECT
        return lo <= estimate < hi
    lo, hi = _BOTTOM_HALF_REJECT
    return lo < estimate <= hi


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    errors: np.ndarray
    kind: SeriesKind

    def __post_init__(self):
        errors = np.array(self.errors, dtype=float)
        if errors.ndim != 1 or errors.size == 0:
            raise ValidationError("empirical distribution needs a non-empty 1-D error set")
        if not np.all(np.isfinite(errors)):
            raise ValidationError("empirical errors must be finite")
        errors.setflags(write=False)
        object.__setattr__(self, "errors", errors)

    def __len__(self):
        return self.errors.size


def empirical_from_trials(trials: Sequence[TrialRecord], kind: SeriesKind
                          ) -> EmpiricalDistribution:
    """Single-series errors of one kind, pooled over true means.

    Obviously wrong responses are dropped before pooling.
    """
    kind = SeriesKind(kind)
    errors = [t.estimate - t.true_target for t in trials
              if t.condition is Condition.SINGLE and t.target_kind is kind
              and not is_obviously_wrong(t.target_half, t.estimate)]
    if len(errors) < 2:
        raise InsufficientSingles(
            f"need at least 2 usable single {kind.value} trials, found {len(errors)}")
    return EmpiricalDistribution(np.array(errors), kind)


def _index(u, n):
    return np.minimum((u * n).astype(np.intp), n - 1)


def draw_error(dist: EmpiricalDistribution, rng: np.random.Generator) -> float:
    return float(dist.errors[int(_index(np.array(rng.random()), len(dist)))])


@dataclass(frozen=True, eq=False)
class PairSet:
    """Array form of a list of true (target, non-target) positions."""

    target_true: np.ndarray
    nontarget_true: np.ndarray

    @classmethod
    def from_pairs(cls, pairs: Sequence[TruePair]) -> "PairSet":
        if len(pairs) == 0:
            raise EmptyDesign("no true-position pairs to sample from")
        return cls(np.array([p.target_true for p in pairs], dtype=float),
                   np.array([p.nontarget_true for p in pairs], dtype=float))

    def __len__(self):
        return self.target_true.size


PairsLike = Union[PairSet, Sequence[TruePair]]


def _as_pairset(pairs: PairsLike) -> PairSet:
    if isinstance(pairs, PairSet):
        if len(pairs) == 0:
            raise EmptyDesign("no true-position pairs to sample from")
        return pairs
    return PairSet.from_pairs(pairs)


def draw_percepts(target_dist, nontarget_dist, pairs: PairsLike, M: int,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``M`` independent (target, non-target) percepts in compound displays."""
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    ps = _as_pairset(pairs)
    u = rng.random((M, 3))
    k = _index(u[:, 0], len(ps))
    x_t = ps.target_true[k] + target_dist.errors[_index(u[:, 1], len(target_dist))]
    x_nt = ps.nontarget_true[k] + nontarget_dist.errors[_index(u[:, 2], len(nontarget_dist))]
    return x_t, x_nt


@dataclass(frozen=True, eq=False)
class SyntheticSamples:
    values: np.ndarray
    weight: float
    target_kind: SeriesKind


def synthesize_compound(target_dist: EmpiricalDistribution,
                        nontarget_dist: EmpiricalDistribution,
                        pairs: PairsLike, w: float, M: int,
                        rng: np.random.Generator) -> SyntheticSamples:
    """Draw ``M`` synthetic compound target estimates for target weight ``w``.

    Each sample is ``w * x_t + (1 - w) * x_nt`` where the percepts are a
    uniformly drawn true pair plus resampled (with replacement) single-series
    errors.
    """
    if not 0.0 <= w <= 1.0:
        raise WeightOutOfRange(f"weight must lie in [0, 1], got {w}")
    x_t, x_nt = draw_percepts(target_dist, nontarget_dist, pairs, M, rng)
    values = w * x_t + (1.0 - w) * x_nt
    return SyntheticSamples(values, float(w), target_dist.kind)


def resample_target_percepts(target_dist: EmpiricalDistribution, pairs: PairsLike,
                             M: int, rng: np.random.Generator) -> np.ndarray:
    """Target percepts alone, i.e. the ideal observer's compound estimates.

    Consumes randomness exactly like :func:`synthesize_compound` and simply
    ignores the non-target draw.
    """
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    ps = _as_pairset(pairs)
    u = rng.random((M, 3))
    k = _index(u[:, 0], len(ps))
    return ps.target_true[k] + target_dist.errors[_index(u[:, 1], len(target_dist))]
