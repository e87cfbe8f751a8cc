"""Command-line interface: ``cayley-salmon <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 undulation found (only with
``--fail-on-undulation``), 3 rank did not saturate.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

EXIT_OK, EXIT_INPUT, EXIT_UNDULATION, EXIT_UNSATURATED = 0, 1, 2, 3

# Largest torus cell (in columns) that runs without --heavy.
FEASIBLE_CELL = 6000


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_INPUT):
        super().__init__(msg)
        self.code = code


def _primes(args) -> list[int]:
    from .exactnum import DEFAULT_PRIMES, PrimeField

    primes = args.prime or list(DEFAULT_PRIMES)
    for p in primes:
        try:
            PrimeField(p)
        except ValueError as exc:
            raise CliError(str(exc))
    if len(set(primes)) != len(primes):
        raise CliError("duplicate --prime values")
    return primes


def _check_feasible(r: int, n: int, m: int, heavy: bool) -> None:
    from .idealgen import refined_cells

    if r < 4:
        raise CliError(f"curve degree must be >= 4, got {r}")
    if n < 0 or m < 0:
        raise CliError("n and m must be nonnegative")
    biggest = max((len(c) for c in refined_cells(r, n, m).values()), default=0)
    if biggest > FEASIBLE_CELL and not heavy:
        raise CliError(f"I_{{{n},{m}}} for r={r} has a cell of {biggest} columns; pass --heavy to run it anyway")


def _emit(args, obj: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(obj, indent=2))
    else:
        print(text)


# subcommands

def cmd_invariant(args) -> int:
    from .curve import CurveFormatError, load_curve
    from .undulation import invariant_quartic

    try:
        P = load_curve(args.curve)
    except (OSError, CurveFormatError, ValueError) as exc:
        msg = str(exc)
        raise CliError(msg if args.curve in msg else f"{args.curve}: {msg}")
    if P.r != 4:
        raise CliError(f"{args.curve}: the invariant is implemented for quartics only (got degree {P.r})")
    rep = invariant_quartic(P)
    obj = rep.to_json()
    text = f"verdict: {rep.verdict}\nvalue: {obj['value']}"
    for line in obj["lines"]:
        text += f"\nundulation line: ({', '.join(line)})"
    if rep.diagnostic:
        text += f"\nnote: {rep.diagnostic}"
    _emit(args, obj, text)
    if args.fail_on_undulation and rep.verdict == "zero":
        return EXIT_UNDULATION
    return EXIT_OK


def cmd_dims(args) -> int:
    from .idealgen import ComponentSpec, SeedMismatchError, build_constraints, confirm_dim
    from .linalg import dump_triplets

    primes = _primes(args)
    _check_feasible(args.r, args.n, args.m, args.heavy)
    if args.triangle:
        return _print_triangle(args, primes)
    spec = ComponentSpec(args.r, args.n, args.m, p=primes[0], seed=args.seed, oversample=args.oversample)
    if args.dump_triplets:
        with open(args.dump_triplets, "w") as fh:
            dump_triplets(build_constraints(spec), fh)
    try:
        dim = confirm_dim(spec, primes, [args.seed])
    except SeedMismatchError as exc:
        raise CliError(str(exc))
    _emit(args, {"format": 1, "r": args.r, "n": args.n, "m": args.m, "dim": dim, "primes": primes,
                 "seed": args.seed},
          f"dim I_{{{args.n},{args.m}}} (r={args.r}) = {dim}\nprimes: {', '.join(map(str, primes))}")
    if args.expect is not None and dim != args.expect:
        print(f"expected {args.expect}, got {dim}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _print_triangle(args, primes) -> int:
    from .idealgen import refined_dims_triangle

    tables = [refined_dims_triangle(args.r, args.n, args.m, p, args.seed) for p in primes]
    for p, t in zip(primes[1:], tables[1:]):
        if t != tables[0]:
            raise CliError(f"refined dimensions differ between primes {primes[0]} and {p}")
    tab = tables[0]
    nz = {w: d for w, d in tab.items() if d}
    lines = [f"refined dims of I_{{{args.n},{args.m}}} (r={args.r}), nonzero cells:"]
    lines += [f"  {w}: {d}" for w, d in nz.items()]
    lines.append(f"total: {sum(tab.values())}")
    lines.append(f"primes: {', '.join(map(str, primes))}")
    _emit(args, {"format": 1, "r": args.r, "n": args.n, "m": args.m,
                 "cells": {",".join(map(str, w)): d for w, d in nz.items()},
                 "total": sum(tab.values()), "primes": primes}, "\n".join(lines))
    return EXIT_OK


def cmd_triangle(args) -> int:
    _check_feasible(args.r, args.n, args.m, args.heavy)
    return _print_triangle(args, _primes(args))


def cmd_basis(args) -> int:
    from .idealgen import ComponentSpec, component_basis
    from .polycore import to_text

    primes = _primes(args)
    _check_feasible(args.r, args.n, args.m, args.heavy)
    weight = tuple(args.weight) if args.weight else None
    try:
        spec = ComponentSpec(args.r, args.n, args.m, weight, p=primes[0], seed=args.seed,
                             oversample=args.oversample)
    except ValueError as exc:
        raise CliError(str(exc))
    B = component_basis(spec)
    polys = [to_text(f) for f in B.polys]
    _emit(args, {"format": 1, "r": args.r, "n": args.n, "m": args.m, "weight": weight, "p": spec.p,
                 "seed": args.seed, "basis": polys},
          "\n".join([f"# basis of I_{{{args.n},{args.m}}} (r={args.r}) mod {spec.p}, dim {len(polys)}"] + polys))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .curve import random_curve
    from .exactnum import PrimeField
    from .idealgen import ComponentSpec, complement_basis, component_basis
    from .undulation import (AppendixError, UndulationMatrix, appendix_modp, det_modp_at, load_appendix,
                             validate_appendix)

    primes = _primes(args)
    seeds = args.seed or [0]
    try:
        M = load_appendix(args.appendix, validate=False)
    except AppendixError as exc:
        raise CliError(str(exc))
    checks: list[tuple[str, bool, str]] = []
    problems = validate_appendix(M, primes)
    checks.append(("appendix rows: alpha = v*phi, gradings, membership", not problems, "; ".join(problems)))
    for p in primes:
        F = PrimeField(p)
        AM = appendix_modp(M, F)
        for seed in seeds:
            small = component_basis(ComponentSpec(4, 2, 5, p=p, seed=seed))
            big = component_basis(ComponentSpec(4, 3, 5, p=p, seed=seed))
            checks.append((f"dim I_2,5 = 3 and I_3,5 = 63 (p={p}, seed={seed})",
                           (len(small), len(big)) == (3, 63), f"got {len(small)}, {len(big)}"))
            comp = complement_basis(big, small)
            checks.append((f"product span 45, complement 18 (p={p}, seed={seed})",
                           (comp.product_dim, len(comp.polys)) == (45, 18),
                           f"got {comp.product_dim}, {len(comp.polys)}"))
            PM = UndulationMatrix([f"row{i}" for i in range(21)], small.polys + comp.polys,
                                  ("pipeline", p, seed), F)
            ratios = set()
            for s in range(args.curves):
                C = random_curve(4, F, 1000 + s)
                a, b = det_modp_at(AM, C, F), det_modp_at(PM, C, F)
                ratios.add(F.div(b, a) if a else None)
            ok = len(ratios) == 1 and None not in ratios and 0 not in ratios
            checks.append((f"det ratio pipeline/appendix constant over {args.curves} curves (p={p}, seed={seed})",
                           ok, f"ratios {sorted(map(str, ratios))[:5]}"))
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + ("" if ok or not detail else f"  [{detail}]"))
    if len(primes) == 1:
        print("note: probabilistic, add --prime for confirmation")
    failed = [n for n, ok, _ in checks if not ok]
    if failed:
        print(f"failed: {failed[0]}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_gen(args) -> int:
    from .curve import curve_to_json, random_curve, random_undulation_curve, witness_to_json

    if args.kind == "undulation" and args.r != 4:
        raise CliError("undulation curves are generated for r = 4 only")
    if args.r < 4:
        raise CliError("curve degree must be >= 4")
    out = Path(args.out)
    try:
        if args.kind == "random":
            P = random_curve(args.r, None, args.seed)
            out.write_text(json.dumps(curve_to_json(P), indent=1) + "\n")
        else:
            P, W = random_undulation_curve(args.r, None, args.seed)
            out.write_text(json.dumps(curve_to_json(P), indent=1) + "\n")
            wpath = out.with_name(out.stem + ".witness.json")
            wpath.write_text(json.dumps(witness_to_json(W), indent=1) + "\n")
            print(f"wrote {wpath}")
    except OSError as exc:
        raise CliError(str(exc))
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cayley-salmon",
                                 description="Undulation invariant of plane quartics and the undulation ideal.")
    ap.add_argument("--threads", type=int, default=None, help="cap BLAS worker threads")
    ap.add_argument("--format", choices=["text", "json"], default="text")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariant", help="evaluate the invariant of a quartic given as curve JSON")
    p.add_argument("curve")
    p.add_argument("--fail-on-undulation", action="store_true", help="exit 2 when the invariant vanishes")
    p.set_defaults(func=cmd_invariant)

    def component_args(p):
        p.add_argument("-r", type=int, default=4, help="curve degree (default 4)")
        p.add_argument("-n", type=int, required=True, help="degree in the curve coefficients")
        p.add_argument("-m", type=int, required=True, help="degree in v")
        p.add_argument("--prime", type=int, action="append", help="prime modulus (repeatable)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--oversample", type=float, default=1.25)
        p.add_argument("--heavy", action="store_true", help="allow very large systems")

    p = sub.add_parser("dims", help="dimension of a graded component")
    component_args(p)
    p.add_argument("--triangle", action="store_true", help="print the refined (overline-degree) table")
    p.add_argument("--expect", type=int, help="exit nonzero unless the dimension equals this")
    p.add_argument("--dump-triplets", metavar="PATH", help="write the constraint matrix as triplets")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("triangle", help="refined dimensions over all overline-degrees")
    component_args(p)
    p.set_defaults(func=cmd_triangle)

    p = sub.add_parser("basis", help="canonical basis polynomials of a component (mod p)")
    component_args(p)
    p.add_argument("--weight", type=int, nargs=3, metavar=("M1", "M2", "M3"), help="restrict to one refined cell")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("verify", help="cross-check the shipped matrix against the rebuilt one")
    p.add_argument("--prime", type=int, action="append")
    p.add_argument("--seed", type=int, action="append")
    p.add_argument("--curves", type=int, default=20)
    p.add_argument("--appendix", help="alternative dataset file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a test curve")
    p.add_argument("kind", choices=["random", "undulation"])
    p.add_argument("-r", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    from .idealgen import SamplingArtifactError, UnsaturatedError

    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (UnsaturatedError, SamplingArtifactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSATURATED


if __name__ == "__main__":
    sys.exit(main())
