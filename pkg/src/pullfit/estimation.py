"""Maximum-likelihood fitting of target weights and comparison with the ideal observer.

Within one optimization run every likelihood evaluation reuses the same
random draws (common random numbers), so the objective is a deterministic
function of the weight. Variation across the repeat protocol comes from
fresh seeds and random starting weights per repeat.

Line-target observations only depend on the line-target weight and vice
versa, so the joint two-parameter fit is carried out as two independent
one-dimensional searches.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .design import SeriesKind, TruePair
from .errors import (DegenerateDistribution, EmptyValues, MissingCondition, NonFinite,
                     ValidationError, WeightOutOfRange)
from .kde import build_kde, log_likelihood, silverman_bandwidth
from .observer import Condition, TrialRecord
from .optimize import minimize_bounded
from .synthesis import (EmpiricalDistribution, PairSet, empirical_from_trials,
                        synthesize_compound)

KINDS = (SeriesKind.LINE, SeriesKind.BAR)


@dataclass(frozen=True)
class FitConfig:
    M: int = 10_000
    repeats: int = 50
    start_lo: float = 0.9
    start_hi: float = 1.0
    weight_lo: float = 0.0
    weight_hi: float = 1.0
    grid_size: int = 512
    density_floor: float = 1e-12
    optimizer_tol: float = 1e-4
    base_seed: int = 0
    hdi_mass: float = 0.95
    # used when every synthetic sample is identical (point-mass inputs)
    degenerate_bandwidth: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.weight_lo < self.weight_hi <= 1.0:
            raise ValidationError("weight bounds must satisfy 0 <= weight_lo < weight_hi <= 1")
        if not self.weight_lo <= self.start_lo <= self.start_hi <= self.weight_hi:
            raise ValidationError(
                "start interval [start_lo, start_hi] must lie within [weight_lo, weight_hi]")
        if not 0.0 < self.hdi_mass <= 1.0:
            raise ValidationError("hdi_mass must lie in (0, 1]")
        if self.M < 1:
            raise ValidationError("M must be >= 1")
        if self.repeats < 1:
            raise ValidationError("repeats must be >= 1")
        if self.grid_size < 16:
            raise ValidationError("grid_size must be >= 16")
        if not self.density_floor > 0:
            raise ValidationError("density_floor must be > 0")
        if not self.optimizer_tol > 0:
            raise ValidationError("optimizer_tol must be > 0")
        if not self.degenerate_bandwidth > 0:
            raise ValidationError("degenerate_bandwidth must be > 0")
        if self.base_seed < 0:
            raise ValidationError("base_seed must be >= 0")


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for ``keys`` under ``seed`` (numpy SeedSequence spawn keys)."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True, eq=False)
class DatasetContext:
    """Everything the likelihood needs for one target kind."""

    target_kind: SeriesKind
    target_dist: EmpiricalDistribution
    nontarget_dist: EmpiricalDistribution
    pairs: PairSet
    observations: np.ndarray

    @classmethod
    def from_trials(cls, trials: Sequence[TrialRecord], target_kind: SeriesKind
                    ) -> "DatasetContext":
        target_kind = SeriesKind(target_kind)
        compound = [t for t in trials
                    if t.condition is Condition.COMPOUND and t.target_kind is target_kind]
        if not compound:
            raise MissingCondition(f"no compound {target_kind.value}-target trials")
        pairs = [TruePair(target_kind, t.true_target, t.nontarget_kind, t.true_nontarget)
                 for t in compound]
        return cls(
            target_kind=target_kind,
            target_dist=empirical_from_trials(trials, target_kind),
            nontarget_dist=empirical_from_trials(trials, target_kind.other),
            pairs=PairSet.from_pairs(pairs),
            observations=np.array([t.estimate for t in compound]),
        )


def nll_for_weight(w: float, ctx: DatasetContext, cfg: FitConfig, crn_seed: int) -> float:
    """Negative synthetic log-likelihood of the observations at weight ``w``.

    The generator is re-seeded from ``crn_seed`` on every call, so the value
    is a pure function of its arguments.
    """
    if not cfg.weight_lo <= w <= cfg.weight_hi:
        raise WeightOutOfRange(
            f"weight {w} outside bounds [{cfg.weight_lo}, {cfg.weight_hi}]")
    return _nll(w, ctx, cfg, crn_seed)


def _nll(w, ctx, cfg, crn_seed):
    rng = np.random.default_rng(crn_seed)
    synth = synthesize_compound(ctx.target_dist, ctx.nontarget_dist, ctx.pairs, w, cfg.M, rng)
    try:
        h = silverman_bandwidth(synth.values)
    except DegenerateDistribution:
        h = cfg.degenerate_bandwidth
    kde = build_kde(synth.values, h, cfg.grid_size, cfg.density_floor)
    return -log_likelihood(kde, ctx.observations)


@dataclass(frozen=True)
class WeightFit:
    w_hat: float
    loglik: float
    nfev: int


def fit_weight(ctx: DatasetContext, cfg: FitConfig, crn_seed: int, start_w: float) -> WeightFit:
    if not cfg.start_lo <= start_w <= cfg.start_hi:
        raise WeightOutOfRange(
            f"start weight {start_w} outside start interval [{cfg.start_lo}, {cfg.start_hi}]")

    def objective(w):
        value = nll_for_weight(w, ctx, cfg, crn_seed)
        if not math.isfinite(value):
            raise NonFinite(f"objective is {value} at w={w}")
        return value

    res = minimize_bounded(objective, cfg.weight_lo, cfg.weight_hi, start_w,
                           xtol=cfg.optimizer_tol)
    return WeightFit(w_hat=res.x, loglik=-res.fun, nfev=res.nfev)


def optimal_observer_loglik(ctx: DatasetContext, cfg: FitConfig, crn_seed: int) -> float:
    """Log-likelihood of the zero-parameter ideal observer (target weight 1)."""
    return -_nll(1.0, ctx, cfg, crn_seed)


def aic(k: int, loglik: float) -> float:
    return 2.0 * k - 2.0 * loglik


def hdi(values, mass: float = 0.95) -> tuple[float, float]:
    """Narrowest window holding ``ceil(mass * n)`` sorted values.

    Ties go to the window with the smallest lower end.
    """
    x = np.sort(np.asarray(values, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise EmptyValues("hdi of an empty sample")
    if not 0.0 < mass <= 1.0:
        raise ValueError(f"mass must lie in (0, 1], got {mass}")
    # guard against mass * n landing a hair above an integer
    m = max(1, min(n, math.ceil(mass * n - 1e-9)))
    widths = x[m - 1:] - x[:n - m + 1]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + m - 1])


@dataclass(frozen=True)
class RepeatRecord:
    repeat: int
    seed: int
    start_w_line: float
    start_w_bar: float
    w_line_hat: Optional[float]
    w_bar_hat: Optional[float]
    loglik_mixture: float
    loglik_optimal: float
    aic_mixture: float
    aic_optimal: float
    delta_aic: float


@dataclass
class FitResult:
    per_repeat: list[RepeatRecord]
    n_params: int
    n_obs_line: int
    n_obs_bar: int
    mean_w_line: Optional[float]
    mean_w_bar: Optional[float]
    hdi_w_line: Optional[tuple[float, float]]
    hdi_w_bar: Optional[tuple[float, float]]
    mean_delta_aic: float
    hdi_delta_aic: tuple[float, float]
    n_positive_delta: int
    hdi_mass: float
    config: FitConfig
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("hdi_w_line", "hdi_w_bar", "hdi_delta_aic"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        d = dict(d)
        d["per_repeat"] = [RepeatRecord(**r) for r in d["per_repeat"]]
        d["config"] = FitConfig(**d["config"])
        for key in ("hdi_w_line", "hdi_w_bar", "hdi_delta_aic"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def _run_repeat(r, contexts, cfg):
    seed = derive_seed(cfg.base_seed, r)
    starts = np.random.default_rng(derive_seed(seed, 0)).uniform(cfg.start_lo, cfg.start_hi, 2)
    w_hat = {}
    l_mix = l_opt = 0.0
    for stream, kind in enumerate(KINDS):
        ctx = contexts.get(kind)
        if ctx is None:
            continue
        fit = fit_weight(ctx, cfg, derive_seed(seed, 1 + stream), float(starts[stream]))
        w_hat[kind] = fit.w_hat
        l_mix += fit.loglik
        l_opt += optimal_observer_loglik(ctx, cfg, derive_seed(seed, 3 + stream))
    k = len(contexts)
    a_mix, a_opt = aic(k, l_mix), aic(0, l_opt)
    return RepeatRecord(
        repeat=r, seed=seed,
        start_w_line=float(starts[0]), start_w_bar=float(starts[1]),
        w_line_hat=w_hat.get(SeriesKind.LINE), w_bar_hat=w_hat.get(SeriesKind.BAR),
        loglik_mixture=l_mix, loglik_optimal=l_opt,
        aic_mixture=a_mix, aic_optimal=a_opt, delta_aic=a_mix - a_opt,
    )


def default_workers() -> int:
    cap = os.environ.get("PULLFIT_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def fit_repeats(trials: Sequence[TrialRecord], cfg: FitConfig = FitConfig(),
                workers: Optional[int] = None) -> FitResult:
    """Run the multi-start fitting protocol ``cfg.repeats`` times.

    Each repeat derives its own seed from ``cfg.base_seed`` and the repeat
    index, draws starting weights uniformly from the start interval, fits
    each available target kind and scores both the mixture (k = number of
    fitted weights) and the ideal observer (k = 0) by AIC. Results do not
    depend on ``workers``.
    """
    contexts, warnings = {}, []
    for kind in KINDS:
        try:
            contexts[kind] = DatasetContext.from_trials(trials, kind)
        except MissingCondition as exc:
            warnings.append(f"{exc}; {kind.value}-target weight not fitted")
    if not contexts:
        raise MissingCondition("no compound trials for either target kind")

    workers = workers or default_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda r: _run_repeat(r, contexts, cfg),
                                    range(cfg.repeats)))
    else:
        records = [_run_repeat(r, contexts, cfg) for r in range(cfg.repeats)]
    records.sort(key=lambda rec: rec.repeat)

    def summary(attr):
        vals = [getattr(rec, attr) for rec in records]
        if vals[0] is None:
            return None, None
        return float(np.mean(vals)), hdi(vals, cfg.hdi_mass)

    mean_line, hdi_line = summary("w_line_hat")
    mean_bar, hdi_bar = summary("w_bar_hat")
    mean_delta, hdi_delta = summary("delta_aic")
    n_obs = {k: (contexts[k].observations.size if k in contexts else 0) for k in KINDS}
    return FitResult(
        per_repeat=records,
        n_params=len(contexts),
        n_obs_line=n_obs[SeriesKind.LINE],
        n_obs_bar=n_obs[SeriesKind.BAR],
        mean_w_line=mean_line, mean_w_bar=mean_bar,
        hdi_w_line=hdi_line, hdi_w_bar=hdi_bar,
        mean_delta_aic=mean_delta, hdi_delta_aic=hdi_delta,
        n_positive_delta=sum(rec.delta_aic > 0 for rec in records),
        hdi_mass=cfg.hdi_mass,
        config=cfg,
        warnings=warnings,
    )
