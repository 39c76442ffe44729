"""Command-line entry point.

Exit codes: 0 when the command ran (a failing assumption is data, not an
error), 2 for bad input, 3 when an internal invariant breaks.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .bench import (
    ExampleSpec,
    build_example_world,
    consistency_csv,
    consistency_experiment,
    emit_heatmaps,
    reproduce_table1,
    table1_csv,
)
from .estim import ObservedSample, aalen_johansen
from .latent import construct_world
from .model import DiscreteWorld, WorldSpecError, derive, dump_world, parse_world, world_hash, world_to_spec
from .props import DEFAULT_TOL, check_all, check_full_independence

SCHEMA_VERSION = 1

MARTINGALE_NOTE = (
    "martingale properties are checked exactly on generating pi-system events "
    "of the filtration, which determines the conditional expectations"
)


class InputError(Exception):
    """Bad user input; reported with exit code 2."""


class InvariantBreach(Exception):
    """Internal consistency failure; reported with exit code 3."""


# input helpers


def _atom_lines(text: str) -> list:
    """Line number of each element of the top-level ``atoms`` array."""
    m = re.search(r'"atoms"\s*:\s*\[', text)
    if not m:
        return []
    dec = json.JSONDecoder()
    pos = m.end()
    lines = []
    while True:
        while pos < len(text) and text[pos] in " \t\r\n,":
            pos += 1
        if pos >= len(text) or text[pos] == "]":
            return lines
        lines.append(text.count("\n", 0, pos) + 1)
        try:
            _, pos = dec.raw_decode(text, pos)
        except json.JSONDecodeError:
            return lines


def read_world(path: str) -> DiscreteWorld:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    try:
        return parse_world(spec)
    except WorldSpecError as exc:
        msg = str(exc)
        line = 1
        hit = re.match(r"atoms\[(\d+)\]", msg)
        if hit:
            lines = _atom_lines(text)
            n = int(hit.group(1))
            if n < len(lines):
                line = lines[n]
        raise InputError(f"{path}:{line}: {msg}") from None


def read_sample(path: str, d=None) -> ObservedSample:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path}:1: empty file")
    header = [h.strip() for h in rows[0]]
    if header != ["time", "status"]:
        raise InputError(f"{path}:1: header must be 'time,status', got {','.join(rows[0])!r}")
    times, types = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not x.strip() for x in row):
            continue
        if len(row) != 2:
            raise InputError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            t = float(row[0])
        except ValueError:
            raise InputError(f"{path}:{lineno}: time {row[0]!r} is not a number") from None
        if not math.isfinite(t) or t <= 0:
            raise InputError(f"{path}:{lineno}: time must be positive and finite")
        try:
            k = int(row[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: status {row[1]!r} is not an integer") from None
        if k < 0 or (d is not None and k > d):
            top = "d" if d is None else str(d)
            raise InputError(f"{path}:{lineno}: status {k} outside 0..{top}")
        times.append(t)
        types.append(k)
    if not times:
        raise InputError(f"{path}: no data rows")
    return ObservedSample(times, types, d)


def _int_list(text: str, flag: str) -> list:
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise InputError(f"{flag}: expected integers like '1,2,5' or '0..9', got {text!r}") from None
    if not out:
        raise InputError(f"{flag}: empty list")
    return out


# output helpers


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"{out}: cannot write: {exc.strerror}") from None


def _json(obj) -> str:
    try:
        return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    except ValueError as exc:
        raise InvariantBreach(f"non-finite value in output: {exc}") from None


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# commands


def cmd_check(args) -> int:
    world = read_world(args.world)
    f = derive(world)
    report = check_all(f, args.tol)
    body = report.to_dict()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "tolerance": args.tol,
        "world_hash": world_hash(world),
        "observed_only": not world.full,
        "metadata": {"martingale_check": MARTINGALE_NOTE},
        "properties": body["properties"],
        "families": body["families"],
        "extras": body["extras"],
    }
    _emit(_json(_jsonable(doc)), args.out)
    return 0


def estimator_csv(path) -> str:
    d = path.d
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["time", "at_risk", "n_censored"]
        + [f"n_{j}" for j in range(1, d + 1)]
        + [f"dH_{j}" for j in range(1, d + 1)]
        + ["S"]
        + ["P_0"]
        + [f"P_{j}" for j in range(1, d + 1)]
    )
    for k, t in enumerate(path.times):
        w.writerow(
            [repr(float(t)), int(path.at_risk[k])]
            + [int(c) for c in path.counts[k]]
            + [repr(float(x)) for x in path.dH[k]]
            + [repr(float(path.S[k]))]
            + [repr(float(x)) for x in path.P[k, 0]]
        )
    return buf.getvalue()


def cmd_estimate(args) -> int:
    sample = read_sample(args.samples, args.d)
    _emit(estimator_csv(aalen_johansen(sample)), args.out)
    return 0


def _spec(pair, n):
    try:
        return ExampleSpec.parse(pair, n)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_example(args) -> int:
    spec = _spec(args.pair, args.n)
    world = build_example_world(spec)
    if args.heatmaps:
        try:
            paths = emit_heatmaps(spec, args.outdir, pgm=args.pgm)
        except OSError as exc:
            raise InputError(f"{args.outdir}: cannot write heat maps: {exc.strerror}") from None
        for p in paths:
            sys.stderr.write(f"wrote {p}\n")
    _emit(dump_world(world), args.out)
    return 0


def cmd_table1(args) -> int:
    try:
        result = reproduce_table1(args.n, args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(table1_csv(result), args.out)
    if not result.matches:
        sys.stderr.write("pattern differs from the expected table\n")
    return 0


def cmd_consistency(args) -> int:
    world = read_world(args.world)
    nlist = _int_list(args.nlist, "--nlist")
    seeds = _int_list(args.seeds, "--seeds")
    if min(nlist) < 1 or min(seeds) < 0:
        raise InputError("--nlist entries must be >= 1 and --seeds >= 0")
    name = args.name or os.path.splitext(os.path.basename(args.world))[0]
    rows = consistency_experiment(world, nlist, seeds, name)
    _emit(consistency_csv(rows), args.out)
    return 0


def cmd_construct(args) -> int:
    world = read_world(args.world)
    f = derive(world)
    built = construct_world(f)
    defect = check_full_independence(derive(built.world))
    # the construction must reproduce the observed law it started from
    obs_in = world.observed
    obs_out = built.world.observed[: world.m]
    if built.world.m > world.m and np.any(built.world.observed[world.m :] > 1e-12):
        raise InvariantBreach("constructed world exits beyond the input grid")
    if np.max(np.abs(obs_in - obs_out)) > 1e-12:
        raise InvariantBreach("constructed world does not reproduce the observed law")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "input_hash": world_hash(world),
        "existence_defect": defect.value,
        "improper_c": built.improper_c,
        "p_c_inf": built.p_c_inf,
        "defective_tail": built.defective_tail,
        "tau_plus": built.tau_plus,
        "world": world_to_spec(built.world),
    }
    _emit(_json(_jsonable(doc)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="censprop", description="Censoring assumptions on exact discrete laws.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="assumption report for a world file")
    c.add_argument("world")
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("estimate", help="Aalen-Johansen path from a time,status CSV")
    e.add_argument("samples")
    e.add_argument("--d", type=int, help="number of event types (default: largest status)")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    x = sub.add_parser("example", help="unit-square example world")
    x.add_argument("--pair", default="T1C1")
    x.add_argument("--n", type=int, default=8)
    x.add_argument("--heatmaps", action="store_true")
    x.add_argument("--pgm", action="store_true", help="also write PGM images")
    x.add_argument("--outdir", default=".")
    x.add_argument("--out")
    x.set_defaults(func=cmd_example)

    t = sub.add_parser("table1", help="assumption table for the six example pairs")
    t.add_argument("--n", type=int, default=8)
    t.add_argument("--tol", type=float, default=DEFAULT_TOL)
    t.add_argument("--out")
    t.set_defaults(func=cmd_table1)

    k = sub.add_parser("consistency", help="Monte Carlo estimator errors")
    k.add_argument("--world", required=True)
    k.add_argument("--nlist", default="100,10000")
    k.add_argument("--seeds", default="0..9")
    k.add_argument("--name")
    k.add_argument("--out")
    k.set_defaults(func=cmd_consistency)

    s = sub.add_parser("construct", help="latent independent-censoring world from an observed law")
    s.add_argument("world")
    s.add_argument("--out")
    s.set_defaults(func=cmd_construct)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except InvariantBreach as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
