"""Command line front end: ``pullfit {simulate,fit,recover,report}``.

Exit codes: 0 ok, 2 usage, 3 parse/validation, 4 fit failure. Every error
prints one line to stderr starting with ``pullfit: error:``.
"""

from __future__ import annotations

import argparse
import io
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import GridError, PullfitError
from .estimation import FitResult, derive_seed, fit_repeats
from .io import (RunConfig, dump_report, fmt, load_report, parse_config, parse_trials_csv,
                 repeats_csv, with_fit_overrides, write_rows, write_trials)
from .observer import select_trials, simulate_dataset, summarize_errors

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_FIT = 0, 2, 3, 4

RECOVERY_COLUMNS = ("true_w", "mean_w_line_hat", "mean_w_bar_hat", "mean_delta_aic",
                    "hdi_w_line_lo", "hdi_w_line_hi", "hdi_w_bar_lo", "hdi_w_bar_hi",
                    "hdi_delta_aic_lo", "hdi_delta_aic_hi", "n_positive_delta")


def parse_grid(spec: str) -> list[float]:
    """``lo:hi:step`` inclusive of both ends, all within [0, 1]."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise GridError(f"grid must look like lo:hi:step, got {spec!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise GridError(f"grid bounds must be numbers, got {spec!r}") from None
    if not step > 0:
        raise GridError(f"grid step must be > 0, got {step:g}")
    if not 0.0 <= lo <= hi <= 1.0:
        raise GridError(f"grid must satisfy 0 <= lo <= hi <= 1, got {spec!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


def _stem(out: Path) -> Path:
    return out.with_suffix("") if out.suffix else out


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _summary_table(result: FitResult) -> str:
    buf = io.StringIO()
    rows = []
    for name, mean, interval in (("w_line", result.mean_w_line, result.hdi_w_line),
                                 ("w_bar", result.mean_w_bar, result.hdi_w_bar),
                                 ("delta_aic", result.mean_delta_aic, result.hdi_delta_aic)):
        if mean is None:
            continue
        rows.append({"quantity": name, "mean": mean, "hdi_lo": interval[0],
                     "hdi_hi": interval[1]})
    write_rows(("quantity", "mean", "hdi_lo", "hdi_hi"), rows, buf)
    buf.write(f"# {result.n_positive_delta} of {len(result.per_repeat)} repeats had "
              f"positive delta_aic\n")
    for w in result.warnings:
        buf.write(f"# warning: {w}\n")
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------

def cmd_simulate(args, cfg: RunConfig) -> int:
    sim = cfg.simulate
    counts = dict(
        n_single_line=_pick(args.n_single_line, sim.n_single_line),
        n_single_bar=_pick(args.n_single_bar, sim.n_single_bar),
        n_compound_line_target=_pick(args.n_compound_line, sim.n_compound_line),
        n_compound_bar_target=_pick(args.n_compound_bar, sim.n_compound_bar),
    )
    observer = cfg.observer
    if args.w_line is not None or args.w_bar is not None:
        observer = replace(observer,
                           w_line_target=_pick(args.w_line, observer.w_line_target),
                           w_bar_target=_pick(args.w_bar, observer.w_bar_target))
    seed = _pick(args.seed, cfg.fit.base_seed)
    trials = simulate_dataset(cfg.design, observer, configuration=sim.configuration,
                              rng=np.random.default_rng(seed), **counts)
    buf = io.StringIO()
    write_trials(trials, buf)
    out = args.out or cfg.io.out
    summary_stream = sys.stdout
    if out:
        _write(Path(out), buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
        summary_stream = sys.stderr

    rows = []
    for condition in ("single", "compound"):
        for kind in ("line", "bar"):
            if not select_trials(trials, condition, kind):
                continue
            s = summarize_errors(trials, condition, kind)
            rows.append({"condition": condition, "kind": kind, "n": s.n,
                         "mean_error": s.mean_error, "se": s.se})
    write_rows(("condition", "kind", "n", "mean_error", "se"), rows, summary_stream)
    return EXIT_OK


def _pick(value, default):
    return default if value is None else value


def _trials_path(args, cfg):
    path = args.trials or cfg.io.trials
    if not path:
        raise _Usage("no trials file given (positional TRIALS or io.trials)")
    return path


class _Usage(Exception):
    pass


def cmd_fit(args, cfg: RunConfig) -> int:
    if args.format == "svg" and not (args.out or cfg.io.out):
        raise _Usage("--format svg needs --out")
    trials = parse_trials_csv(_trials_path(args, cfg))
    result = fit_repeats(trials, cfg.fit)
    out = args.out or cfg.io.out

    if args.format == "csv":
        text = repeats_csv(result)
        if out:
            _write(Path(out), text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    report = dump_report(result)
    if not out:
        sys.stdout.write(report)
        return EXIT_OK
    stem = _stem(Path(out))
    _write(stem.with_suffix(".json"), report)
    _write(stem.parent / f"{stem.name}_repeats.csv", repeats_csv(result))
    if args.format == "svg":
        _render(result, trials, stem)
    sys.stdout.write(_summary_table(result))
    return EXIT_OK


def _render(result, trials, stem: Path):
    from .plotting import plot_delta_aic, plot_model_fit

    stem.parent.mkdir(parents=True, exist_ok=True)
    plot_delta_aic(result, stem.parent / f"{stem.name}_delta_aic.svg")
    if trials is not None:
        plot_model_fit(trials, result, stem.parent / f"{stem.name}_model_fit.svg")


def recovery_rows(cfg: RunConfig, grid: Sequence[float], seed: int) -> list[dict]:
    """Simulate at each grid weight (both kinds), fit, and tabulate the recovery."""
    sim = cfg.simulate
    rows = []
    for i, w in enumerate(grid):
        observer = replace(cfg.observer, w_line_target=w, w_bar_target=w)
        trials = simulate_dataset(
            cfg.design, observer, sim.n_single_line, sim.n_single_bar,
            sim.n_compound_line, sim.n_compound_bar, sim.configuration,
            rng=np.random.default_rng(derive_seed(seed, i, 0)))
        fit_cfg = replace(cfg.fit, base_seed=derive_seed(seed, i, 1))
        result = fit_repeats(trials, fit_cfg)
        rows.append({
            "true_w": w,
            "mean_w_line_hat": result.mean_w_line, "mean_w_bar_hat": result.mean_w_bar,
            "mean_delta_aic": result.mean_delta_aic,
            "hdi_w_line_lo": result.hdi_w_line[0], "hdi_w_line_hi": result.hdi_w_line[1],
            "hdi_w_bar_lo": result.hdi_w_bar[0], "hdi_w_bar_hi": result.hdi_w_bar[1],
            "hdi_delta_aic_lo": result.hdi_delta_aic[0],
            "hdi_delta_aic_hi": result.hdi_delta_aic[1],
            "n_positive_delta": result.n_positive_delta,
        })
    return rows


def cmd_recover(args, cfg: RunConfig) -> int:
    if args.format == "svg" and not (args.out or cfg.io.out):
        raise _Usage("--format svg needs --out")
    grid = parse_grid(args.grid)
    rows = recovery_rows(cfg, grid, _pick(args.seed, cfg.fit.base_seed))
    buf = io.StringIO()
    write_rows(RECOVERY_COLUMNS, rows, buf)
    out = args.out or cfg.io.out
    if not out:
        sys.stdout.write(buf.getvalue())
        return EXIT_OK
    out = Path(out)
    _write(out if args.format == "csv" else _stem(out).with_suffix(".csv"), buf.getvalue())
    if args.format == "svg":
        from .plotting import plot_recovery

        stem = _stem(out)
        plot_recovery(rows, stem.parent / f"{stem.name}_recovery.svg")
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_report(args, cfg: RunConfig) -> int:
    result = load_report(args.report)
    trials = parse_trials_csv(args.trials) if args.trials else None
    out = Path(args.out) if args.out else _stem(Path(args.report))
    if args.format == "csv":
        _write(out.with_suffix(".csv") if out.suffix != ".csv" else out, repeats_csv(result))
    elif args.format == "json":
        _write(_stem(out).with_suffix(".json"), dump_report(result))
    else:
        _render(result, trials, _stem(out))
    sys.stdout.write(_summary_table(result))
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pullfit",
        description="Fit perceptual-pull mixture weights to compound-graph position "
                    "estimates by synthetic likelihood.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="section.key = value config file")
    common.add_argument("--seed", type=int, help="overrides fit.base_seed")
    common.add_argument("--out", help="output path")

    fitting = argparse.ArgumentParser(add_help=False)
    fitting.add_argument("--repeats", type=int, help="overrides fit.repeats")
    fitting.add_argument("--m-samples", type=int, help="overrides fit.m_samples")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="write a synthetic trial CSV")
    p.add_argument("--n-single-line", type=int)
    p.add_argument("--n-single-bar", type=int)
    p.add_argument("--n-compound-line", type=int, help="compound trials with a line target")
    p.add_argument("--n-compound-bar", type=int, help="compound trials with a bar target")
    p.add_argument("--w-line", type=float, help="overrides observer.w_line_target")
    p.add_argument("--w-bar", type=float, help="overrides observer.w_bar_target")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common, fitting], help="fit target weights")
    p.add_argument("trials", nargs="?", help="trial CSV (default: io.trials)")
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("recover", parents=[common, fitting], help="parameter-recovery sweep")
    p.add_argument("--grid", required=True, help="true weights as lo:hi:step")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("report", parents=[common], help="re-render a saved fit report")
    p.add_argument("report", help="JSON report written by `pullfit fit`")
    p.add_argument("--trials", help="trial CSV, enables the model-fit figure")
    p.add_argument("--format", choices=("json", "csv", "svg"), default="svg")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = parse_config(args.config)
        if hasattr(args, "repeats"):
            cfg = with_fit_overrides(cfg, repeats=args.repeats, M=args.m_samples,
                                     base_seed=args.seed)
        return args.func(args, cfg)
    except _Usage as exc:
        print(f"pullfit: error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PullfitError as exc:
        print(f"pullfit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"pullfit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
