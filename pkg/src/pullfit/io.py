"""Trial CSV files, the ``section.key = value`` config format and report writers."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

from .design import Configuration, DesignMeans, Half, SeriesKind
from .errors import ConsistencyError, ParseError, RowError, SchemaError, ValidationError
from .estimation import FitConfig, FitResult, RepeatRecord
from .observer import Condition, ObserverParams, TrialRecord

TRIAL_HEADER = ("trial_id", "condition", "target_kind", "target_half", "true_target",
                "nontarget_kind", "true_nontarget", "estimate")

PathLike = Union[str, Path]


def fmt(x) -> str:
    """Decimal text with 6 significant digits; ``None`` becomes an empty field."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, str)):
        return str(x)
    return f"{x:.6g}"


# -- trials -------------------------------------------------------------------

def _enum(cls, text, name, line):
    try:
        return cls(text)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise RowError(f"{name} must be one of {{{allowed}}}, got {text!r}", line) from None


def _number(text, name, line):
    try:
        value = float(text)
    except ValueError:
        raise RowError(f"{name} is not a number: {text!r}", line) from None
    if not math.isfinite(value):
        raise RowError(f"{name} must be finite, got {text!r}", line)
    return value


def read_trials(stream: TextIO) -> list[TrialRecord]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file; expected header " + ",".join(TRIAL_HEADER), 1)
    if tuple(h.strip() for h in header) != TRIAL_HEADER:
        raise SchemaError("bad header; expected " + ",".join(TRIAL_HEADER), 1)

    trials, seen = [], set()
    for line, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(TRIAL_HEADER):
            raise RowError(f"expected {len(TRIAL_HEADER)} fields, got {len(row)}", line)
        tid, cond, kind, half, true_t, nt_kind, true_nt, est = (f.strip() for f in row)
        try:
            trial_id = int(tid)
        except ValueError:
            raise RowError(f"trial_id is not an integer: {tid!r}", line) from None
        if trial_id in seen:
            raise RowError(f"duplicate trial_id {trial_id}", line)
        seen.add(trial_id)
        condition = _enum(Condition, cond, "condition", line)
        target_kind = _enum(SeriesKind, kind, "target_kind", line)
        target_half = _enum(Half, half, "target_half", line)
        true_target = _number(true_t, "true_target", line)
        estimate = _number(est, "estimate", line)
        if condition is Condition.SINGLE:
            if nt_kind or true_nt:
                raise ConsistencyError("single row must leave non-target fields empty", line)
            nontarget_kind = true_nontarget = None
        else:
            if not nt_kind or not true_nt:
                raise ConsistencyError("compound row needs nontarget_kind and true_nontarget",
                                       line)
            nontarget_kind = _enum(SeriesKind, nt_kind, "nontarget_kind", line)
            true_nontarget = _number(true_nt, "true_nontarget", line)
        trials.append(TrialRecord(trial_id, condition, target_kind, target_half, true_target,
                                  nontarget_kind, true_nontarget, estimate))
    return trials


def parse_trials_csv(path: PathLike) -> list[TrialRecord]:
    with open(path, newline="", encoding="utf-8") as f:
        return read_trials(f)


def write_trials(trials: Iterable[TrialRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRIAL_HEADER)
    for t in trials:
        writer.writerow([
            t.trial_id, t.condition.value, t.target_kind.value, t.target_half.value,
            fmt(t.true_target),
            t.nontarget_kind.value if t.nontarget_kind is not None else "",
            fmt(t.true_nontarget), fmt(t.estimate),
        ])


def write_trials_csv(trials: Iterable[TrialRecord], path: PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        write_trials(trials, f)


# -- config -------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationSettings:
    n_single_line: int = 1728
    n_single_bar: int = 1728
    n_compound_line: int = 773
    n_compound_bar: int = 779
    configuration: Configuration = Configuration.LINE_TOP_BAR_BOTTOM
    point_noise_sd: float = 4.0
    n_points: int = 48

    def __post_init__(self):
        for name in ("n_single_line", "n_single_bar", "n_compound_line", "n_compound_bar"):
            if getattr(self, name) < 0:
                raise ValidationError(f"simulate.{name} must be >= 0")
        if not self.point_noise_sd >= 0:
            raise ValidationError("simulate.point_noise_sd must be >= 0")
        if self.n_points < 1:
            raise ValidationError("simulate.n_points must be >= 1")


@dataclass(frozen=True)
class IoPaths:
    trials: Optional[str] = None
    out: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    fit: FitConfig = field(default_factory=FitConfig)
    observer: ObserverParams = field(default_factory=ObserverParams)
    design: DesignMeans = field(default_factory=DesignMeans)
    simulate: SimulationSettings = field(default_factory=SimulationSettings)
    io: IoPaths = field(default_factory=IoPaths)


def _to_int(text):
    value = float(text) if any(c in text for c in ".eE") else int(text)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"not an integer: {text}")
        value = int(value)
    return value


def _to_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"not finite: {text}")
    return value


def _to_triple(text):
    return tuple(_to_float(v.strip()) for v in text.split(","))


def _to_str(text):
    return text


# config key -> (dataclass field, converter)
_FIT_KEYS = {
    "m_samples": ("M", _to_int),
    "repeats": ("repeats", _to_int),
    "start_lo": ("start_lo", _to_float),
    "start_hi": ("start_hi", _to_float),
    "weight_lo": ("weight_lo", _to_float),
    "weight_hi": ("weight_hi", _to_float),
    "grid_size": ("grid_size", _to_int),
    "density_floor": ("density_floor", _to_float),
    "optimizer_tol": ("optimizer_tol", _to_float),
    "base_seed": ("base_seed", _to_int),
    "hdi_mass": ("hdi_mass", _to_float),
    "degenerate_bandwidth": ("degenerate_bandwidth", _to_float),
}
_SCHEMA = {
    "fit": _FIT_KEYS,
    "observer": {f.name: (f.name, _to_float) for f in fields(ObserverParams)},
    "design": {f.name: (f.name, _to_triple) for f in fields(DesignMeans)},
    "simulate": {
        "n_single_line": ("n_single_line", _to_int),
        "n_single_bar": ("n_single_bar", _to_int),
        "n_compound_line": ("n_compound_line", _to_int),
        "n_compound_bar": ("n_compound_bar", _to_int),
        "configuration": ("configuration", Configuration),
        "point_noise_sd": ("point_noise_sd", _to_float),
        "n_points": ("n_points", _to_int),
    },
    "io": {"trials": ("trials", _to_str), "out": ("out", _to_str)},
}
_SECTION_TYPES = {"fit": FitConfig, "observer": ObserverParams, "design": DesignMeans,
                  "simulate": SimulationSettings, "io": IoPaths}


def read_config(stream: TextIO) -> RunConfig:
    """Parse ``section.key = value`` lines; ``#`` starts a comment.

    Every key is optional. Unknown keys and malformed values raise
    :class:`ParseError` with the line number; invariant violations raise
    :class:`ValidationError`.
    """
    overrides: dict[str, dict] = {s: {} for s in _SCHEMA}
    for line, raw in enumerate(stream, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ParseError(f"expected 'section.key = value', got {text!r}", line)
        key, value = (part.strip() for part in text.split("=", 1))
        section, _, name = key.partition(".")
        if section not in _SCHEMA or name not in _SCHEMA[section]:
            raise ParseError(f"unknown key {key!r}", line)
        attr, convert = _SCHEMA[section][name]
        try:
            overrides[section][attr] = convert(value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", line) from None

    built = {}
    for section, cls in _SECTION_TYPES.items():
        try:
            built[section] = cls(**overrides[section])
        except ValidationError as exc:
            raise ValidationError(f"[{section}] {exc}") from None
    return RunConfig(**built)


def parse_config(path: Optional[PathLike]) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as f:
        return read_config(f)


def with_fit_overrides(cfg: RunConfig, **changes) -> RunConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    if not changes:
        return cfg
    return replace(cfg, fit=replace(cfg.fit, **changes))


# -- reports ------------------------------------------------------------------

REPEAT_COLUMNS = tuple(f.name for f in fields(RepeatRecord))


def dump_report(result: FitResult) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"


def load_report(path: PathLike) -> FitResult:
    with open(path, encoding="utf-8") as f:
        return FitResult.from_dict(json.load(f))


def write_rows(columns, rows, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])


def repeats_csv(result: FitResult) -> str:
    buf = io.StringIO()
    write_rows(REPEAT_COLUMNS, (vars(r) for r in result.per_repeat), buf)
    return buf.getvalue()
