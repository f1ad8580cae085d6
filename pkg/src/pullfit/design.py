"""Display-frame coordinates, the stimulus design space and true-position pairs.

All positions are vertical pixels in a 140 px frame whose bottom edge is 0.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyDesign, InvalidDesign, InvalidSpec

FRAME_MIN = 0.0
FRAME_MAX = 140.0
FRAME_MID = 70.0

LINE_SEPARATION = 12.0
BAR_SEPARATION = 5.0


class SeriesKind(str, enum.Enum):
    LINE = "line"
    BAR = "bar"

    @property
    def other(self) -> "SeriesKind":
        return SeriesKind.BAR if self is SeriesKind.LINE else SeriesKind.LINE


class Half(str, enum.Enum):
    TOP = "top"
    BOTTOM = "bottom"


class Profile(str, enum.Enum):
    NOISY = "noisy"
    UNIFORM = "uniform"


class Configuration(str, enum.Enum):
    """Which series sits in which half of a compound line-bar display."""

    LINE_TOP_BAR_BOTTOM = "line_top_bar_bottom"
    BAR_TOP_LINE_BOTTOM = "bar_top_line_bottom"

    def half_of(self, kind: SeriesKind) -> Half:
        line_on_top = self is Configuration.LINE_TOP_BAR_BOTTOM
        if (kind is SeriesKind.LINE) == line_on_top:
            return Half.TOP
        return Half.BOTTOM


def in_frame(value: float) -> bool:
    return FRAME_MIN <= value <= FRAME_MAX


@dataclass(frozen=True)
class SeriesSpec:
    kind: SeriesKind
    half: Half
    profile: Profile
    mean: float
    point_noise_sd: float = 4.0
    n_points: int = 48

    def __post_init__(self):
        if self.n_points < 1:
            raise InvalidSpec(f"n_points must be >= 1, got {self.n_points}")
        if not self.point_noise_sd >= 0:
            raise InvalidSpec(f"point_noise_sd must be >= 0, got {self.point_noise_sd}")
        if not in_frame(self.mean):
            raise InvalidSpec(f"mean {self.mean} outside frame [0, 140]")
        if self.half is Half.TOP and self.mean < FRAME_MID:
            raise InvalidSpec(f"top-half mean must be >= 70, got {self.mean}")
        if self.half is Half.BOTTOM and self.mean > FRAME_MID:
            raise InvalidSpec(f"bottom-half mean must be <= 70, got {self.mean}")


def _check_triple(name, values, separation, half):
    if len(values) != 3:
        raise InvalidDesign(f"design.{name} needs exactly 3 means, got {len(values)}")
    if list(values) != sorted(values):
        raise InvalidDesign(f"design.{name} must be sorted ascending (low, medium, high)")
    for lo, hi in zip(values, values[1:]):
        if not math.isclose(hi - lo, separation, abs_tol=1e-9):
            raise InvalidDesign(
                f"design.{name}: adjacent means must differ by {separation:g} px, "
                f"got {hi - lo:g}")
    for v in values:
        if not in_frame(v):
            raise InvalidDesign(f"design.{name}: mean {v:g} outside frame [0, 140]")
        if half is Half.TOP and v < FRAME_MID or half is Half.BOTTOM and v > FRAME_MID:
            raise InvalidDesign(f"design.{name}: mean {v:g} not in the {half.value} half")


@dataclass(frozen=True)
class DesignMeans:
    """Low/medium/high true means per series kind and display half."""

    line_top: tuple[float, float, float] = (93.0, 105.0, 117.0)
    line_bottom: tuple[float, float, float] = (23.0, 35.0, 47.0)
    bar_top: tuple[float, float, float] = (100.0, 105.0, 110.0)
    bar_bottom: tuple[float, float, float] = (30.0, 35.0, 40.0)

    def __post_init__(self):
        for name in ("line_top", "line_bottom", "bar_top", "bar_bottom"):
            values = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, values)
            kind, half = name.split("_")
            sep = LINE_SEPARATION if kind == "line" else BAR_SEPARATION
            _check_triple(name, values, sep, Half(half))

    def means(self, kind: SeriesKind, half: Half) -> tuple[float, float, float]:
        return getattr(self, f"{kind.value}_{half.value}")


def default_design() -> DesignMeans:
    return DesignMeans()


@dataclass(frozen=True)
class TruePair:
    target_kind: SeriesKind
    target_true: float
    nontarget_kind: SeriesKind
    nontarget_true: float


def design_pairs(design: DesignMeans, target_kind: SeriesKind,
                 configuration: Configuration = Configuration.LINE_TOP_BAR_BOTTOM
                 ) -> list[TruePair]:
    """Cross product of target and non-target design means (9 pairs).

    Fallback for purely synthetic runs; fits normally use the pairs present
    in the compound data.
    """
    nontarget_kind = target_kind.other
    t_means = design.means(target_kind, configuration.half_of(target_kind))
    nt_means = design.means(nontarget_kind, configuration.half_of(nontarget_kind))
    return [TruePair(target_kind, t, nontarget_kind, nt)
            for t, nt in itertools.product(t_means, nt_means)]


def generate_series(spec: SeriesSpec, rng: np.random.Generator) -> np.ndarray:
    """Point positions of one rendered series, clamped to the frame."""
    if spec.profile is Profile.UNIFORM:
        return np.full(spec.n_points, float(spec.mean))
    points = spec.mean + rng.normal(0.0, spec.point_noise_sd, spec.n_points)
    return np.clip(points, FRAME_MIN, FRAME_MAX)


def sample_true_pair(pairs: Sequence[TruePair], rng: np.random.Generator) -> TruePair:
    if len(pairs) == 0:
        raise EmptyDesign("no true-position pairs to sample from")
    return pairs[int(rng.random() * len(pairs))]
