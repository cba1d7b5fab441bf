"""Command-line front end: ``irclab --config run.yaml [--out results.csv] [--seed N] [--trace]``.

Exit status: 0 on success, 2 on invalid configuration or unmet preconditions,
1 on runtime failure. CSV floats are written with ``repr`` so they re-parse
to the exact values computed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from typing import Iterable, Optional, Sequence

from . import gdof
from .config import ConfigError, RunConfig, parse_config
from .gaussian.model import GaussianChannel
from .gaussian.optimize import OptimizeResult, estimate_gdof, optimize_powers
from .gaussian.rates import upper_bound_sumrate
from .ld.design import construct_allocation, search_allocation
from .ld.scheme import SimReport, UnsupportedRegimeError, simulate, toy_allocation

BOUND_COLUMNS = ("alpha", "beta", "gamma") + gdof.SWEEP_COLUMNS[1:3] + ("min_bound",) + gdof.SWEEP_COLUMNS[3:]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(stream, columns: Sequence[str], rows: Iterable[dict]):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])


def _bound_row(pt: gdof.GdofPoint) -> dict:
    row = gdof.point_row(pt)
    row["beta"], row["gamma"] = pt.params.beta, pt.params.gamma
    row["min_bound"] = pt.min_bound
    return row


def run_bounds(cfg: RunConfig):
    p = cfg.params
    pt = gdof.evaluate(gdof.GdofParams(p["alpha"], p["beta"], p["gamma"]))
    return BOUND_COLUMNS, [_bound_row(pt)]


def run_sweep(cfg: RunConfig):
    p = cfg.params
    return BOUND_COLUMNS, [_bound_row(pt) for pt in gdof.sweep(p["alpha"], p["beta"], p["gamma"])]


def run_ld_sim(cfg: RunConfig, trace: Optional[list]):
    p = cfg.params
    ld = p["n"]
    if p["allocation"] == "toy":
        alloc = toy_allocation()
    elif p["allocation"] == "construct":
        alloc = construct_allocation(ld)
    else:
        found = search_allocation(ld)
        if found.allocation is None:
            raise RuntimeError(f"no valid allocation found for {ld}")
        alloc = found.allocation
    rows = []
    for i in range(p["trials"]):
        rep = simulate(ld, alloc, p["blocks"], seed=cfg.seed + i, trace=trace if i == 0 else None)
        rows.extend(rep.rows())
    return SimReport.CSV_COLUMNS, rows


def _opt_columns(W: int, L: int, extra=()) -> tuple[str, ...]:
    cols = ["snr_db", "sum_rate_bits", "upper_bound_bits"]
    cols += [f"P_cn{w + 1}" for w in range(W)] + [f"P_cnF{w + 1}" for w in range(W)]
    cols += [f"P_cf{l + 1}" for l in range(L)]
    cols += ["P_df", "P_cm", "P_r_cf", "P_r_df", "iterations", "last_improvement", "binding"]
    return tuple(cols) + tuple(extra)


def _opt_row(ch: GaussianChannel, res: OptimizeResult) -> dict:
    pa = res.allocation
    row = {
        "snr_db": 10 * math.log10(ch.P * ch.h_d**2),
        "sum_rate_bits": res.sum_rate,
        "upper_bound_bits": upper_bound_sumrate(ch),
        "P_df": pa.P_df, "P_cm": pa.P_cm, "P_r_cf": pa.P_r_cf, "P_r_df": pa.P_r_df,
        "iterations": res.iterations, "last_improvement": res.last_improvement,
        "binding": ";".join(f"{k}={v}" for k, v in sorted(res.rates.binding.items())),
    }
    for name in ("P_cn", "P_cnF", "P_cf"):
        for i, v in enumerate(getattr(pa, name)):
            row[f"{name}{i + 1}"] = v
    return row


def run_gauss_opt(cfg: RunConfig):
    p = cfg.params
    opt = p["optimizer"]
    if "gains" in p:
        channels = [GaussianChannel(**p["gains"])]
    else:
        a, b, g = p["pattern"]
        channels = [GaussianChannel.from_exponents(a, b, g, 10 ** (s / 10)) for s in p["snr_db"]]
    rows = [_opt_row(ch, optimize_powers(ch, opt)) for ch in channels]
    return _opt_columns(opt.W, opt.L), rows


def run_gdof_est(cfg: RunConfig):
    p = cfg.params
    opt = p["optimizer"]
    pattern = gdof.GdofParams(*p["pattern"])
    est = estimate_gdof(pattern, [10 ** (s / 10) for s in p["snr_db"]], opt)
    rows = []
    for snr, res in zip(est.snrs, est.results):
        ch = GaussianChannel.from_exponents(pattern.alpha, pattern.beta, pattern.gamma, snr)
        row = _opt_row(ch, res)
        row["gdof_slope"] = est.slope
        rows.append(row)
    return _opt_columns(opt.W, opt.L, ("gdof_slope",)), rows


def run(cfg: RunConfig, trace: Optional[list] = None):
    """Dispatch one validated run; returns ``(columns, rows)``."""
    if cfg.command == "bounds":
        return run_bounds(cfg)
    if cfg.command == "sweep":
        return run_sweep(cfg)
    if cfg.command == "ld-sim":
        return run_ld_sim(cfg, trace)
    if cfg.command == "gauss-opt":
        return run_gauss_opt(cfg)
    if cfg.command == "gdof-est":
        return run_gdof_est(cfg)
    raise ConfigError(f"unknown command {cfg.command!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="irclab", description="GDoF bounds, LD scheme simulation and Gaussian rate optimization for the interference relay channel.")
    ap.add_argument("--config", required=True, help="YAML run description")
    ap.add_argument("--out", help="CSV output path (default: config 'out', else standard output)")
    ap.add_argument("--seed", type=int, help="overrides the config seed")
    ap.add_argument("--trace", action="store_true", help="print LD block diagrams to standard output (ld-sim)")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg.seed = args.seed
        out = args.out or cfg.out
        if out is not None:
            parent = os.path.dirname(os.path.abspath(out))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK) or os.path.isdir(out):
                raise ConfigError(f"output path is not writable: {out}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    trace: Optional[list] = [] if args.trace else None
    try:
        columns, rows = run(cfg, trace)
    except (UnsupportedRegimeError, gdof.OutOfScopeError, gdof.DegenerateChannelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported, mapped to exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if trace:
        print("\n".join(trace))
    buf = io.StringIO()
    write_csv(buf, columns, rows)
    try:
        if out is None:
            sys.stdout.write(buf.getvalue())
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
