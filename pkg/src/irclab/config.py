"""Strict YAML run configuration for the command-line front end.

One document describes one run::

    command: gauss-opt
    pattern: {alpha: 1.2, beta: 2, gamma: 3}
    snr_db: [40, 60, 80]
    optimizer: {W: 2, L: 2, tol: 1.0e-4}

Unknown keys are rejected and every error names the offending key and, when
known, its line. Defaults: ``W=2``, ``L=2``, ``tol=1e-4``, ``grid_step=0.05``,
``seed=0``, ``trials=1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .gaussian.optimize import EXPONENT_KEYS, MAX_SPLITS, OptimizerConfig
from .ld.channel import LdParams

COMMANDS = ("bounds", "sweep", "ld-sim", "gauss-opt", "gdof-est")
ALLOCATIONS = ("toy", "construct", "search")

# per command: key -> required?
SCHEMA = {
    "bounds": {"alpha": True, "beta": True, "gamma": True},
    "sweep": {"alpha": True, "beta": True, "gamma": True},
    "ld-sim": {"n": True, "blocks": True, "allocation": False, "trials": False},
    "gauss-opt": {"gains": False, "pattern": False, "snr_db": False, "optimizer": False},
    "gdof-est": {"pattern": True, "snr_db": True, "optimizer": False},
}
COMMON_KEYS = {"command": True, "seed": False, "out": False}
OPTIMIZER_KEYS = ("W", "L", "grid_step", "tol", "max_sweeps", "refine_levels", "seed_exponents")


class ConfigError(ValueError):
    """Malformed or invalid configuration; the message carries line/key context."""


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    out: Optional[str] = None


def _key_lines(text: str) -> dict[str, int]:
    """1-based line of every key path (``a.b``) in the top-level mapping."""
    lines: dict[str, int] = {}

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = f"{prefix}{k.value}"
                lines[path] = k.start_mark.line + 1
                walk(v, path + ".")

    try:
        walk(yaml.compose(text, Loader=yaml.SafeLoader), "")
    except yaml.YAMLError:
        pass
    return lines


class _Ctx:
    def __init__(self, lines):
        self.lines = lines

    def fail(self, key: str, msg: str):
        line = self.lines.get(key)
        where = f"line {line}, " if line else ""
        raise ConfigError(f"{where}key '{key}': {msg}")

    def number(self, key, v, *, positive=False, nonneg=False) -> float:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(key, f"expected a finite number, got {v!r}")
        if positive and not v > 0:
            self.fail(key, f"must be positive, got {v}")
        if nonneg and v < 0:
            self.fail(key, f"must be non-negative, got {v}")
        return float(v)

    def integer(self, key, v, lo=None, hi=None) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(key, f"expected an integer, got {v!r}")
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            self.fail(key, f"must lie in [{lo}, {hi if hi is not None else 'inf'}], got {v}")
        return v

    def mapping(self, key, v, allowed, required=()) -> dict:
        if not isinstance(v, dict):
            self.fail(key, f"expected a mapping, got {type(v).__name__}")
        unknown = sorted(set(v) - set(allowed))
        if unknown:
            self.fail(f"{key}.{unknown[0]}", f"unknown key (allowed: {', '.join(allowed)})")
        missing = [k for k in required if k not in v]
        if missing:
            self.fail(key, f"missing required keys: {', '.join(missing)}")
        return v


def _pattern(ctx, key, v) -> tuple[float, float, float]:
    v = ctx.mapping(key, v, ("alpha", "beta", "gamma"), ("alpha", "beta", "gamma"))
    return tuple(ctx.number(f"{key}.{k}", v[k], nonneg=True) for k in ("alpha", "beta", "gamma"))


def _snr_list(ctx, key, v) -> list[float]:
    if not isinstance(v, list) or not v:
        ctx.fail(key, "expected a non-empty list of SNR values in dB")
    vals = [ctx.number(key, x) for x in v]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        ctx.fail(key, "SNR values must be strictly ascending")
    if vals[0] <= 0:
        ctx.fail(key, "P h_d^2 must exceed 1 (SNR above 0 dB)")
    return vals


def _optimizer(ctx, v) -> OptimizerConfig:
    if v is None:
        return OptimizerConfig()
    v = ctx.mapping("optimizer", v, OPTIMIZER_KEYS)
    kw: dict[str, Any] = {}
    for k in ("W", "L"):
        if k in v:
            kw[k] = ctx.integer(f"optimizer.{k}", v[k], 1, MAX_SPLITS)
    for k in ("grid_step", "tol"):
        if k in v:
            kw[k] = ctx.number(f"optimizer.{k}", v[k], positive=True)
    if "max_sweeps" in v:
        kw["max_sweeps"] = ctx.integer("optimizer.max_sweeps", v["max_sweeps"], 1)
    if "refine_levels" in v:
        kw["refine_levels"] = ctx.integer("optimizer.refine_levels", v["refine_levels"], 0)
    if "seed_exponents" in v:
        se = ctx.mapping("optimizer.seed_exponents", v["seed_exponents"], EXPONENT_KEYS)
        out = {}
        for k, x in se.items():
            key = f"optimizer.seed_exponents.{k}"
            xs = x if isinstance(x, list) else [x]
            out[k] = [ctx.number(key, e, nonneg=True) for e in xs]
        kw["seed_exponents"] = out
    return OptimizerConfig(**kw)


def _validate(ctx: _Ctx, command: str, doc: dict) -> dict[str, Any]:
    p: dict[str, Any] = {}
    if command in ("bounds", "sweep"):
        p["beta"] = ctx.number("beta", doc["beta"], nonneg=True)
        p["gamma"] = ctx.number("gamma", doc["gamma"], nonneg=True)
    if command == "bounds":
        p["alpha"] = ctx.number("alpha", doc["alpha"], nonneg=True)
    elif command == "sweep":
        a = ctx.mapping("alpha", doc["alpha"], ("start", "stop", "step"), ("start", "stop", "step"))
        start, stop = ctx.number("alpha.start", a["start"], nonneg=True), ctx.number("alpha.stop", a["stop"])
        step = ctx.number("alpha.step", a["step"], positive=True)
        if stop < start:
            ctx.fail("alpha.stop", "must not be below alpha.start")
        if stop > p["gamma"] + 1:
            ctx.fail("alpha.stop", f"alpha range must lie within [0, gamma+1] = [0, {p['gamma'] + 1}]")
        p["alpha"] = (start, stop, step)
    elif command == "ld-sim":
        n = doc["n"]
        if not isinstance(n, list) or len(n) != 4:
            ctx.fail("n", "expected [n_d, n_c, n_r, n_s]")
        n = [ctx.integer("n", x, 0, 16) for x in n]
        try:
            p["n"] = LdParams(*n)
        except ValueError as exc:
            ctx.fail("n", str(exc))
        p["blocks"] = ctx.integer("blocks", doc["blocks"], 2, 10_000)
        alloc = doc.get("allocation", "construct")
        if alloc not in ALLOCATIONS:
            ctx.fail("allocation", f"expected one of {', '.join(ALLOCATIONS)}, got {alloc!r}")
        if alloc == "toy" and tuple(n) != (2, 3, 6, 5):
            ctx.fail("allocation", "the toy allocation is defined for n = [2, 3, 6, 5] only")
        if alloc == "search" and p["n"].q > 8:
            ctx.fail("allocation", "search is limited to q <= 8")
        p["allocation"] = alloc
        p["trials"] = ctx.integer("trials", doc.get("trials", 1), 1, 100_000)
    else:
        if command == "gauss-opt":
            if ("gains" in doc) == ("pattern" in doc):
                ctx.fail("gains", "give exactly one of 'gains' or 'pattern'")
            if "gains" in doc:
                if "snr_db" in doc:
                    ctx.fail("snr_db", "not used with explicit gains")
                g = ctx.mapping("gains", doc["gains"], ("h_d", "h_c", "h_r", "h_s", "P"), ("h_d", "h_c", "h_r", "h_s", "P"))
                gains = {k: ctx.number(f"gains.{k}", g[k]) for k in ("h_d", "h_c", "h_r", "h_s")}
                gains["P"] = ctx.number("gains.P", g["P"], positive=True)
                if not gains["h_c"] ** 2 > gains["h_d"] ** 2:
                    ctx.fail("gains.h_c", "strong interference needs h_c^2 > h_d^2")
                if gains["P"] * gains["h_d"] ** 2 <= 1:
                    ctx.fail("gains.P", "P h_d^2 must exceed 1")
                p["gains"] = gains
            elif "snr_db" not in doc:
                ctx.fail("snr_db", "required with 'pattern'")
        if "pattern" in doc:
            p["pattern"] = _pattern(ctx, "pattern", doc["pattern"])
            if not p["pattern"][0] > 1:
                ctx.fail("pattern.alpha", "strong interference needs alpha > 1")
            p["snr_db"] = _snr_list(ctx, "snr_db", doc["snr_db"])
            if command == "gdof-est" and len(p["snr_db"]) < 2:
                ctx.fail("snr_db", "at least two SNR points are needed for a slope")
        p["optimizer"] = _optimizer(ctx, doc.get("optimizer"))
    return p


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML run description; raises ``ConfigError``."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        raise ConfigError(f"{where}malformed YAML: {getattr(exc, 'problem', exc)}") from None
    ctx = _Ctx(_key_lines(text))
    if doc is None:
        raise ConfigError("empty configuration; required keys: command, plus per command: "
                          + "; ".join(f"{c}: {', '.join(k for k, r in s.items() if r) or '-'}" for c, s in SCHEMA.items()))
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping of keys to values")
    command = doc.get("command")
    if command is None:
        ctx.fail("command", f"missing; expected one of {', '.join(COMMANDS)}")
    if command not in COMMANDS:
        ctx.fail("command", f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    schema = SCHEMA[command]
    allowed = {**COMMON_KEYS, **schema}
    for key in doc:
        if key not in allowed:
            ctx.fail(str(key), f"unknown key for command '{command}' (allowed: {', '.join(allowed)})")
    missing = [k for k, req in schema.items() if req and k not in doc]
    if missing:
        raise ConfigError(f"command '{command}' is missing required keys: {', '.join(missing)}")

    seed = ctx.integer("seed", doc.get("seed", 0), 0, 2**64 - 1)
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        ctx.fail("out", "expected a path string")
    return RunConfig(command=command, params=_validate(ctx, command, doc), seed=seed, out=out)
