"""Command-line surface: build rings, run the classification, emit the
database, and test isomorphism.

Exit codes: build -> 1 parse error, 2 inconsistent presentation;
classify -> 3 on any count mismatch; iso -> 0 isomorphic, 1 not, 2
indeterminate.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import gfplin
from .rings import (
    characteristic_exp,
    nilpotency_class,
    p_class,
    ring_from_json,
    ring_to_json,
)
from .presentations import ParseError, parse, instantiate, print_presentation


def _prime_arg(value: str) -> int:
    p = int(value)
    if not gfplin.is_prime(p) or p < 5:
        raise argparse.ArgumentTypeError("p must be a prime >= 5")
    return p


def cmd_build(args) -> int:
    from .catalog import P7_RELATORS, p7_presentation

    binding = {}
    for name in ("x", "y", "z"):
        val = getattr(args, name)
        if val is not None:
            binding[name] = val
    try:
        if args.id:
            if args.id not in P7_RELATORS:
                print(f"unknown library id {args.id!r}", file=sys.stderr)
                return 1
            pres = p7_presentation(args.id)
        else:
            pres = parse(args.pres)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    try:
        ring = instantiate(pres, args.p, binding, w=args.w)
    except (ValueError, AssertionError) as e:
        print(f"inconsistent presentation: {e}", file=sys.stderr)
        return 2
    print(ring_to_json(ring))
    print(
        f"order 5^{ring.n}".replace("5^", f"{args.p}^")
        + f" class {nilpotency_class(ring)} p-class {p_class(ring)}"
        + f" characteristic {args.p}^{characteristic_exp(ring)}",
        file=sys.stderr,
    )
    return 0


def cmd_classify(args) -> int:
    from .classification import cross_validate, run_pipeline

    run = run_pipeline(args.p, jobs=args.jobs, max_p=max(args.p, 13))
    doc = run.report.to_json_dict()
    if args.full_crossval:
        cv = cross_validate(args.p, run=run, full=True, jobs=args.jobs)
        doc["cross_validation"] = {
            "catalog_size": cv.catalog_size,
            "confirmed": cv.confirmed,
            "bijection": cv.bijection,
        }
        if not cv.ok:
            print(json.dumps(doc, indent=2))
            return 3
    print(json.dumps(doc, indent=2))
    return 0 if run.report.match else 3


def cmd_emit_db(args) -> int:
    from .catalog import catalog_p8

    entries = catalog_p8(args.p, w=args.w)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for e in entries:
            out.write(json.dumps(e.to_json_dict(), separators=(",", ":")))
            out.write("\n")
    finally:
        if args.out:
            out.close()
    print(f"{len(entries)} entries", file=sys.stderr)
    return 0


def cmd_iso(args) -> int:
    from .classification import is_isomorphic

    with open(args.ring_a) as fa, open(args.ring_b) as fb:
        A = ring_from_json(fa.read())
        B = ring_from_json(fb.read())
    res = is_isomorphic(A, B, budget_ms=args.budget_ms)
    if res.isomorphic is True:
        print("isomorphic")
        print(json.dumps({"witness": res.witness.tolist()}))
        return 0
    if res.isomorphic is False:
        print(f"non-isomorphic ({res.invariant})")
        return 1
    print("indeterminate (budget exceeded)", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="liering",
        description="Finite nilpotent Lie rings: construction, descendants, classification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="instantiate a presentation or catalog entry")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--id", help="order-p^7 catalog id, e.g. 7.623")
    g.add_argument("--pres", help='presentation text, e.g. "<a,b|ba,pa,pb,class 1>"')
    b.add_argument("--p", type=_prime_arg, required=True)
    b.add_argument("--w", type=int, default=None, help="override the primitive root")
    for name in ("x", "y", "z"):
        b.add_argument(f"--{name}", type=int, default=None)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("classify", help="count order-p^8 maximal-class descendants")
    c.add_argument("--p", type=_prime_arg, required=True)
    c.add_argument("--full-crossval", action="store_true")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("emit-db", help="write the order-p^8 catalog as JSON lines")
    e.add_argument("--p", type=_prime_arg, required=True)
    e.add_argument("--w", type=int, default=None)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_emit_db)

    i = sub.add_parser("iso", help="test two ring JSON files for isomorphism")
    i.add_argument("ring_a")
    i.add_argument("ring_b")
    i.add_argument("--budget-ms", type=float, default=None)
    i.set_defaults(func=cmd_iso)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
