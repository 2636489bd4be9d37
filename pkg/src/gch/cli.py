"""Command-line interface: ``gch basis|dims|check|pair|matrix``.

Exit codes: 0 success, 1 a check failed, 2 usage error or non-cocycle input,
3 no cancellation partner inside the window.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .complexes import (IDENTITIES, Certificate, ComplexSpec, DimensionTable, Window,
                        cancellation_pair, check_identity, cohomology_dims, euler_check,
                        gc_table, gc_window)
from .graphs import Grading, decode, encode, generate_basis, write_basis
from .linalg import dumps_record, format_matrix, rank_record
from .operators import MAPS, GraphVector, LinearMapSpec
from .store import RunConfig, atomic_write, default_cache_dir

SPACE_NAMES = {"gc": "GC", "hgc": "HGC", "h0gc": "H>=0GC", "GC": "GC", "HGC": "HGC",
               "H>=0GC": "H>=0GC"}


class UsageError(Exception):
    pass


def parse_window(text: str) -> Window:
    """``v<=5,e<=8,s<=3``; omitted bounds default to s<=0."""
    bounds = {"s": 0}
    for part in text.split(","):
        m = re.fullmatch(r"\s*([ves])\s*<=\s*(-?\d+)\s*", part)
        if not m:
            raise UsageError(f"bad window bound {part!r}; expected e.g. v<=5,e<=8,s<=3")
        bounds[m.group(1)] = int(m.group(2))
    if "v" not in bounds or "e" not in bounds:
        raise UsageError(f"window {text!r} needs bounds on v and e")
    return Window(bounds["v"], bounds["e"], bounds["s"])


def parse_range(text: str) -> list[int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not m:
        raise UsageError(f"bad range {text!r}; expected N or A..B")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    return list(range(lo, hi + 1))


def read_vector(path: str) -> GraphVector:
    """A JSON list of ``[graph, "num/den"]`` pairs; graphs need not be canonical."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    out = GraphVector()
    for g, c in data:
        out = out + GraphVector.from_graph(decode(g, canonical=False), Fraction(c))
    return out


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _format_table(table: DimensionTable, fmt: str) -> str:
    if fmt == "json":
        return table.to_json() + "\n"
    if fmt == "pretty":
        return table.pretty() + "\n"
    return table.to_csv()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_basis(args, cfg: RunConfig) -> int:
    g = Grading(args.v, args.e, args.s)
    if min(g) < 0:
        raise UsageError(f"counts must be nonnegative, got {tuple(g)}")
    engine = cfg.engine()
    basis = engine.basis(g) if g.v >= 1 else []
    if args.out:
        write_basis(args.out, g, basis)
        print(len(basis))
    else:
        lines = [f"# gch-basis v={g.v} e={g.e} s={g.s} n={len(basis)}"]
        lines += [encode(b) for b in basis]
        sys.stdout.write("\n".join(lines) + "\n")
        print(len(basis), file=sys.stderr)
    return 0


def _spec(args, window: Window) -> ComplexSpec:
    try:
        return ComplexSpec(SPACE_NAMES.get(args.complex, args.complex), args.diff, window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cached(cfg: RunConfig, kind: str, params: tuple, compute, load):
    store = cfg.store()
    if store is not None:
        hit = store.get_json(kind, params)
        if hit is not None:
            return load(hit)
    result = compute()
    if store is not None:
        store.put_json(kind, params, result.to_json())
    return result


def cmd_dims(args, cfg: RunConfig) -> int:
    engine = cfg.engine()
    rows = parse_range(args.b) if args.b else None
    degrees = parse_range(args.d) if args.d else None
    if args.window:
        spec = _spec(args, parse_window(args.window))
        params = (spec.space, spec.differential, list(spec.window), cfg.field, cfg.seed)
        table = _cached(cfg, "table", params, lambda: cohomology_dims(spec, engine),
                        DimensionTable.from_json)
        if rows is not None or degrees is not None:
            table = DimensionTable(table.label, {
                k: x for k, x in table.entries.items()
                if (rows is None or k[0] in rows) and (degrees is None or k[1] in degrees)})
    elif rows is not None and degrees is not None:
        spec = _spec(args, Window(0, 0, 0))
        if spec.space != "GC":
            raise UsageError("row/degree ranges are only supported for --complex gc; use --window")
        params = ("GC", "delta", rows, degrees, cfg.field, cfg.seed)
        table = _cached(cfg, "table", params, lambda: gc_table(rows, degrees, engine),
                        DimensionTable.from_json)
    else:
        raise UsageError("dims needs --window, or --b and --d ranges")
    _emit(_format_table(table, args.format), args.out)
    return 0


def cmd_check(args, cfg: RunConfig) -> int:
    engine = cfg.engine()
    if args.identity == "euler":
        if args.b is None:
            raise UsageError("euler check needs --b ROW")
        row = int(args.b)
        if args.d:
            degrees = parse_range(args.d)
        else:
            degrees = list(range(3 + 2 * row, 9 + 2 * row))
        if args.window:
            window = parse_window(args.window)
        elif SPACE_NAMES.get(args.complex) == "GC":
            window = gc_window([row], degrees)
        else:
            raise UsageError("euler check on a hairy complex needs --window")
        spec = _spec(args, window)
        try:
            ok = euler_check(spec, row, degrees, engine)
        except ValueError as exc:
            print(f"refused: {exc}", file=sys.stderr)
            return 1
        print(f"euler {spec.space} {spec.differential} {spec.row_label}={row} "
              f"d={degrees[0]}..{degrees[-1]}: {'pass' if ok else 'FAIL'}")
        return 0 if ok else 1
    if not args.window:
        raise UsageError(f"check --identity {args.identity} needs --window")
    report = check_identity(args.identity, parse_window(args.window), engine)
    for g, label, nnz in report.failures:
        print(f"FAIL {label} at (v,e,s)={tuple(g)}: {nnz} nonzero entries")
    if args.identity == "homotopy" and report.ok:
        for g, label in report.checked:
            print(f"ok v*Id verified at (v,e,s)={tuple(g)}")
    status = "pass" if report.ok else "FAIL"
    print(f"{args.identity}: {status} ({len(report.checked)} gradings checked, "
          f"{len(report.failures)} failures)")
    return 0 if report.ok else 1


def cmd_pair(args, cfg: RunConfig) -> int:
    engine = cfg.engine()
    gamma1 = read_vector(args.class_file)
    window = parse_window(args.window)
    params = (gamma1.to_json(), list(window))
    store = cfg.store()
    hit = store.get_json("certificate", params) if store is not None else None
    if hit is not None:
        result = Certificate.from_json(hit)
    else:
        try:
            result = cancellation_pair(gamma1, window, engine=engine)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if not isinstance(result, Certificate):
            print(f"NO_PAIR_IN_WINDOW: {result.reason}", file=sys.stderr)
            return 3
        if store is not None:
            store.put_json("certificate", params, result.to_json())
    if not result.verify():
        print("error: certificate failed re-verification", file=sys.stderr)
        return 1
    _emit(result.to_json() + "\n", args.out)
    return 0


def cmd_matrix(args, cfg: RunConfig) -> int:
    src = Grading(args.v, args.e, args.s)
    spec = LinearMapSpec(args.map, src)
    if min(spec.target) < 0 or src.v < 1:
        raise UsageError(f"{args.map} is not defined on {tuple(src)}")
    engine = cfg.engine()
    M = engine.matrix(args.map, src)
    _emit(format_matrix(M, args.map, src, spec.target), args.out)
    if args.rank:
        rec = rank_record(args.map, src, spec.target, M, cfg.field, engine.primes)
        print(dumps_record(rec), file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # flags are accepted before and after the subcommand; the subcommand copy
    # must not overwrite a value given before it
    def dflt(x):
        return argparse.SUPPRESS if suppress else x

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", default=dflt(default_cache_dir()),
                        help="cache directory (default $GCH_CACHE, no cache if unset)")
    common.add_argument("--field", choices=["q", "p2"], default=dflt("p2"),
                        help="rank over Q, or two random primes with rational escalation")
    common.add_argument("--seed", type=int, default=dflt(0))
    common.add_argument("--jobs", type=int, default=dflt(1))
    common.add_argument("--format", choices=["csv", "json", "pretty"], default=dflt("csv"))
    return common


def build_parser() -> argparse.ArgumentParser:
    top = _common_flags(suppress=False)
    common = _common_flags(suppress=True)

    p = argparse.ArgumentParser(prog="gch", parents=[top],
                                description="Odd graph complexes: bases, differentials, cohomology.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", parents=[common], help="write a basis file")
    for name in ("v", "e", "s"):
        b.add_argument(f"--{name}", type=int, required=True)
    b.add_argument("--out")

    d = sub.add_parser("dims", parents=[common], help="cohomology dimension table")
    d.add_argument("--complex", default="gc")
    d.add_argument("--diff", default="delta")
    d.add_argument("--window")
    d.add_argument("--b", help="row range, e.g. 0..3")
    d.add_argument("--d", help="degree range, e.g. 3..10")
    d.add_argument("--out")

    c = sub.add_parser("check", parents=[common], help="matrix identity or euler check")
    c.add_argument("--identity", required=True, choices=sorted(IDENTITIES) + ["euler"])
    c.add_argument("--window")
    c.add_argument("--complex", default="gc")
    c.add_argument("--diff", default="delta")
    c.add_argument("--b")
    c.add_argument("--d")

    q = sub.add_parser("pair", parents=[common], help="cancellation certificate")
    q.add_argument("class_file")
    q.add_argument("--window", required=True)
    q.add_argument("--out")

    m = sub.add_parser("matrix", parents=[common], help="dump a differential matrix")
    m.add_argument("--map", required=True, choices=sorted(MAPS))
    for name in ("v", "e", "s"):
        m.add_argument(f"--{name}", type=int, required=True)
    m.add_argument("--out")
    m.add_argument("--rank", action="store_true", help="also print a rank record on stderr")
    return p


COMMANDS = {"basis": cmd_basis, "dims": cmd_dims, "check": cmd_check, "pair": cmd_pair,
            "matrix": cmd_matrix}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(cache_dir=args.cache, field=args.field, seed=args.seed,
                        output_format=args.format, jobs=args.jobs)
        if args.field == "p2":
            print(f"seed={args.seed}", file=sys.stderr)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
