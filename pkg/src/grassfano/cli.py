"""Command-line entry point.

Exit codes: 0 success, 1 verification mismatch or indeterminate value,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog, chow
from .bundles import cohomology_of
from .chow import ch_bundle, chern_from_ch
from .degeneracy import (DegeneracyError, conic_discriminant, en_report, expected_dim, plucker_conic,
                         projection_profile)
from .dsl import DSLError, bundle_string, evaluate, parse, parse_spec
from .quiver import QuiverDatum, QuiverError, flatten
from .rewrite import RewriteError, recognize
from .zerolocus import ExcessError, NotGloballyGenerated, ZeroLocus, hodge_numbers


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _read_json(arg):
    try:
        text = sys.stdin.read() if arg == "-" else Path(arg).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg}: invalid JSON ({exc})") from exc


def _locus(args):
    return ZeroLocus.from_spec(parse_spec(args.spec), assume_generic=args.assume_generic)


# -- commands ----------------------------------------------------------------------

def cmd_translate(args, out):
    d = QuiverDatum.from_json(_read_json(args.quiver))
    res = flatten(d)
    if args.json:
        out.write(_dump({"dsl": res.dsl(), "ambient": str(res.ambient),
                         "structural": bundle_string(res.structural),
                         "translated": bundle_string(res.translated),
                         "tower": [{"vertex": s.vertex, "rank": s.rank, "fiber_rank": s.fiber_rank}
                                   for s in res.tower.steps],
                         "dim": res.tower.dim}) + "\n")
    else:
        out.write(res.dsl() + "\n")
    return 0


def cmd_invariants(args, out):
    Z = _locus(args)
    rep = Z.report(hodge=not args.no_hodge)
    if args.json:
        out.write(_dump(rep) + "\n")
        return 0
    out.write(f"{Z.label}\n")
    for k in ("dim", "minusK", "fano", "h0mK", "vol", "chiT", "euler"):
        out.write(f"  {k}: {rep[k]}\n")
    for k, v in rep.get("hodge", {}).items():
        out.write(f"  {k}: {v}\n")
    for n in rep["notes"]:
        out.write(f"  note: {n}\n")
    return 0


def cmd_hodge(args, out):
    Z = _locus(args)
    H = hodge_numbers(Z, pmax=args.truncate)
    rows = {}
    for (p, q) in sorted(H.lo):
        rows[f"h{p},{q}"] = H.get(p, q)
    if args.json:
        out.write(_dump({"spec": Z.label, "dim": Z.dim, "hodge": rows,
                         "determinate": H.determinate(), "assumptions": H.assumptions}) + "\n")
        return 0
    for k, v in rows.items():
        out.write(f"{k}: {v}\n")
    return 0


def cmd_cohomology(args, out):
    spec = parse_spec(args.spec)
    B = evaluate(spec.cutting, spec.ambient)
    rows = []
    for s in B.summands():
        from .bundles import Bundle
        one = Bundle(spec.ambient, {s.weights: s.multiplicity})
        rows.append({"summand": bundle_string(one), "h": {str(q): v for q, v in sorted(cohomology_of(one).h.items())}})
    tot = cohomology_of(B)
    if args.json:
        out.write(_dump({"ambient": str(spec.ambient), "bundle": bundle_string(B), "summands": rows,
                         "total": {str(q): v for q, v in sorted(tot.h.items())}, "euler": tot.euler()}) + "\n")
        return 0
    for r in rows:
        out.write(f"{r['summand']}: {r['h'] or 'acyclic'}\n")
    out.write(f"total: {tot.as_list(spec.ambient.dim)} euler {tot.euler()}\n")
    return 0


def cmd_chow(args, out):
    spec = parse_spec(args.spec)
    X = spec.ambient
    B = evaluate(spec.cutting, X)
    top = args.truncate if args.truncate is not None else X.dim
    ch = ch_bundle(B, top)
    c = chern_from_ch(ch, top)
    res = {"ambient": str(X), "bundle": bundle_string(B), "rank": B.rank,
           "ch": ch.to_json(), "c": c.to_json(), "chi": chow.chi_hrr(X, B)}
    if args.json:
        out.write(_dump(res) + "\n")
        return 0
    for k in ("rank", "chi", "c", "ch"):
        out.write(f"{k}: {res[k]}\n")
    return 0


def cmd_degloc(args, out):
    if args.mode == "dim":
        res = {"expected_dim": expected_dim(args.dimX, args.e, args.f, args.k)}
    elif args.mode == "en":
        res = en_report(parse_spec(args.base), parse(args.E), parse(args.F), assume_generic=args.assume_generic)
    elif args.mode == "conic":
        base = parse_spec(args.base)
        if args.plucker:
            X = base.ambient
            cd = plucker_conic(X, evaluate(parse(args.E), X), evaluate(parse(args.plucker), X))
            d = conic_discriminant(base, ch_E=cd.ch_E, k=cd.k, assume_generic=args.assume_generic)
        else:
            k = tuple(int(x) for x in args.k.split(",")) if args.k else None
            d = conic_discriminant(base, parse(args.E), k, assume_generic=args.assume_generic)
        res = d.to_json()
    else:
        res = projection_profile(parse_spec(args.spec), args.factor).to_json()
    out.write(_dump(res) + "\n")
    return 0


def cmd_rewrite(args, out):
    steps = recognize(parse_spec(args.spec))
    if args.apply is not None:
        if not 0 <= args.apply < len(steps):
            raise InputError(f"--apply {args.apply}: only {len(steps)} step(s) apply")
        st = steps[args.apply]
        if st.result is None:
            raise InputError(f"step {args.apply} ({st.rule}) is an identification without a presentation")
        if args.json:
            out.write(_dump(st.to_json()) + "\n")
        else:
            out.write(str(st.result) + "\n")
        return 0
    payload = [dict(index=i, **s.to_json()) for i, s in enumerate(steps)]
    if args.json:
        out.write(_dump(payload) + "\n")
    else:
        for p in payload:
            flag = " (partial)" if p["partial"] else ""
            out.write(f"[{p['index']}] {p['rule']}: {p['identification']}{flag}\n")
    return 0


def cmd_verify(args, out):
    entries = catalog.load(args.catalog)
    sel = None if args.all or not args.select else args.select
    rep = catalog.verify(entries, sel, threads=args.threads)
    if args.json:
        out.write(catalog.report_json(rep) + "\n")
    elif args.csv:
        out.write(catalog.report_csv(rep))
    else:
        out.write(catalog.report_text(rep))
    return 0 if rep["ok"] else 1


# -- parser ------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="grassfano", description="Zero loci in products of Grassmannians.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--threads", type=int, default=1, help="worker processes (output is unaffected)")
        sp.add_argument("--assume-generic", action="store_true",
                        help="accept bundles that are not globally generated")
        return sp

    sp = common(sub.add_parser("translate", help="quiver JSON -> zero-locus DSL"))
    sp.add_argument("quiver", help="path to a quiver JSON file, or - for stdin")
    sp.set_defaults(fn=cmd_translate)

    sp = common(sub.add_parser("invariants", help="h0(-K), volume, chi(T), Hodge numbers"))
    sp.add_argument("spec")
    sp.add_argument("--no-hodge", action="store_true")
    sp.set_defaults(fn=cmd_invariants)

    sp = common(sub.add_parser("hodge", help="Hodge numbers of a zero locus"))
    sp.add_argument("spec")
    sp.add_argument("--truncate", type=int, default=None, metavar="DEG", help="only p <= DEG")
    sp.set_defaults(fn=cmd_hodge)

    sp = common(sub.add_parser("cohomology", help="cohomology of a bundle on the ambient"))
    sp.add_argument("spec", help='"AMBIENT :: BUNDLE"')
    sp.set_defaults(fn=cmd_cohomology)

    sp = common(sub.add_parser("chow", help="Chern classes and character of a bundle"))
    sp.add_argument("spec", help='"AMBIENT :: BUNDLE"')
    sp.add_argument("--truncate", type=int, default=None, metavar="DEG")
    sp.set_defaults(fn=cmd_chow)

    sp = common(sub.add_parser("degloc", help="degeneracy-locus computations"))
    dsub = sp.add_subparsers(dest="mode", required=True)
    d = dsub.add_parser("dim", help="expected dimension of D_k")
    for name in ("dimX", "e", "f", "k"):
        d.add_argument(name, type=int)
    d = dsub.add_parser("en", help="Eagon-Northcott chi(O_D) for a generic E -> F")
    d.add_argument("base")
    d.add_argument("E")
    d.add_argument("F")
    d = dsub.add_parser("conic", help="conic-bundle discriminant classes")
    d.add_argument("base")
    d.add_argument("E", help="rank 3 bundle, or W of rank 4 with --plucker")
    d.add_argument("--k", default=None, help="degrees of K, comma separated")
    d.add_argument("--plucker", default=None, metavar="TARGETS",
                   help="treat E as W and use Gr(2,W) cut by wedge^2 W -> TARGETS")
    d = dsub.add_parser("profile", help="generic fiber of a factor projection")
    d.add_argument("spec")
    d.add_argument("factor", type=int, choices=(1, 2))
    for d in dsub.choices.values():
        d.add_argument("--assume-generic", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(fn=cmd_degloc)

    sp = common(sub.add_parser("rewrite", help="applicable identifications and rewrites"))
    sp.add_argument("spec")
    sp.add_argument("--apply", type=int, default=None, metavar="INDEX")
    sp.set_defaults(fn=cmd_rewrite)

    sp = common(sub.add_parser("verify-catalog", help="recompute and diff the shipped corpus"))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--select", default=None, help="ids, labels, F.2.* prefixes or rank=N, comma separated")
    sp.add_argument("--catalog", default=None, help="catalog file (default: shipped corpus)")
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(fn=cmd_verify)
    return p


INPUT_ERRORS = (InputError, DSLError, QuiverError, catalog.CatalogError, DegeneracyError, RewriteError,
                NotGloballyGenerated, ExcessError)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args, out)
    except INPUT_ERRORS as exc:
        err.write(f"error: {exc}\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
