"""Command-line front end.

    lincomplex singular --n 3 --q 2 --h 2 --form 012
    lincomplex search --n 6 --q 2 --mode random --budget 100000 --seed 1

Every command prints one report in the chosen ``--format`` (json, csv, text).
Exit codes: 0 success or no hit, 10 mathematical hit, 1 verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import __version__
from .complexes import (
    ComplexError,
    InconsistentComplex,
    LinearComplex,
    Marker,
    image_span_dim,
    pole,
    polar_hyperplane,
    singular_locus,
)
from .exterior import parse_form
from .gf import field_create
from .partitions import (
    MalformedPartition,
    partition_from_complex,
    partition_report,
    read_partition,
    write_partition,
)
from .projspace import (
    GeometryError,
    count_subspaces,
    format_subspace,
    gaussian_binomial,
    parse_subspace,
    span,
    subspaces,
    whole,
)
from .search import BudgetExceeded, classify_spread_forms, search_no_singular
from .spreads import (
    LineSpread,
    field_reduction_spread,
    read_lines,
    spread_from_complex,
    spread_report,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_HIT = 0, 1, 2, 10
WORKERS_ENV = "LINCOMPLEX_WORKERS"

log = logging.getLogger("lincomplex")


class UsageError(Exception):
    pass


class Outcome:
    """A report plus the exit code it implies."""

    def __init__(self, result, code: int = EXIT_OK, text: str | None = None, rows=None):
        self.result = result
        self.code = code
        self.text = text
        self.rows = rows


def _literal(x) -> str:
    if isinstance(x, Marker):
        return x.name
    return format_subspace(x)


# -- argument validation --------------------------------------------------

def _check_nq(args, need_h: bool = False):
    if args.n is None or args.q is None:
        raise UsageError("--n and --q are required")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    try:
        field_create(args.q)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if need_h:
        if args.h is None:
            raise UsageError("--h is required")
        if not 0 <= args.h <= args.n:
            raise UsageError(f"--h must lie in [0, {args.n}]")


def _complex(args) -> LinearComplex:
    _check_nq(args)
    if not args.form:
        raise UsageError("--form is required")
    try:
        f = parse_form(args.form, args.n, args.q)
    except ValueError as e:
        raise UsageError(f"bad form literal {args.form!r}: {e}") from None
    if args.h is None:
        args.h = f.degree - 1
    if f.degree != args.h + 1:
        raise UsageError(f"form of degree {f.degree} does not define a complex of {args.h}-subspaces")
    if f.is_zero:
        raise UsageError("the zero form defines no complex")
    return LinearComplex(args.n, args.q, args.h, f)


def _subspace(text: str, args):
    try:
        return parse_subspace(text, args.q, args.n)
    except ValueError as e:
        raise UsageError(f"bad subspace literal {text!r}: {e}") from None


# -- commands ---------------------------------------------------------------

def cmd_enumerate(args) -> Outcome:
    _check_nq(args)
    if args.d is None or not -1 <= args.d <= args.n:
        raise UsageError(f"--d must lie in [-1, {args.n}]")
    count = count_subspaces(args.n, args.q, args.d)
    res = {"d": args.d, "count": count, "gaussian_binomial": gaussian_binomial(args.n + 1, args.d + 1, args.q)}
    if not args.count:
        subs = subspaces(args.n, args.q, args.d)
        stop = len(subs) if args.limit is None else args.start + args.limit
        res["subspaces"] = [format_subspace(s) for s in subs[args.start:stop]]
    text = f"{count} subspaces of dimension {args.d} in PG({args.n},{args.q})"
    if "subspaces" in res:
        text += "\n" + "\n".join(res["subspaces"])
    return Outcome(res, text=text, rows=[{"subspace": s} for s in res.get("subspaces", [])] or None)


def cmd_complex(args) -> Outcome:
    k = _complex(args)
    mem = k.members()
    res = {"form": k.literal, "members": len(mem)}
    if args.contains:
        x = _subspace(args.contains, args)
        res["contains"] = {"subspace": format_subspace(x), "member": k.contains(x)}
    if 1 <= k.h <= k.n - 1:
        res["image_span_dim"] = image_span_dim(k)
    if not args.count:
        res["member_list"] = [format_subspace(m) for m in mem]
    text = f"complex {k.literal} of {k.h}-subspaces in PG({k.n},{k.q}): {len(mem)} members"
    if "contains" in res:
        text += f"\n{res['contains']['subspace']} is {'a' if res['contains']['member'] else 'not a'} member"
    if "member_list" in res:
        text += "\n" + "\n".join(res["member_list"])
    return Outcome(res, text=text, rows=[{"member": m} for m in res.get("member_list", [])] or None)


def cmd_polar(args) -> Outcome:
    k = _complex(args)
    if not args.subspace:
        raise UsageError("--subspace is required")
    x = _subspace(args.subspace, args)
    if x.dim == k.h - 1:
        if not 1 <= k.h <= k.n - 1:
            raise UsageError("polar hyperplanes need 1 <= h <= n-1")
        img = polar_hyperplane(k, x)
        res = {"subspace": format_subspace(x), "kind": "polar_hyperplane", "image": _literal(img)}
    elif x.dim == k.h + 1:
        if k.h + 1 > k.n:
            raise UsageError("poles need h <= n-1")
        img = pole(k, x)
        res = {"subspace": format_subspace(x), "kind": "pole", "image": _literal(img)}
    else:
        raise UsageError(f"--subspace must have dimension {k.h - 1} (polar) or {k.h + 1} (pole)")
    return Outcome(res, text=f"{res['kind']} of {res['subspace']}: {res['image']}")


def cmd_singular(args) -> Outcome:
    k = _complex(args)
    if not 1 <= k.h <= k.n - 1:
        raise UsageError("singular subspaces need 1 <= h <= n-1")
    loc = singular_locus(k)
    res = {"form": k.literal, "count": len(loc.subspaces),
           "singular": [format_subspace(s) for s in loc.subspaces],
           "kernel": format_subspace(loc.kernel), "kernel_dim": loc.dim,
           "bounds": [loc.lower, loc.upper]}
    text = (f"{len(loc.subspaces)} singular {k.h - 1}-subspaces; kernel dimension {loc.dim} "
            f"in [{loc.lower}, {loc.upper}]")
    if loc.subspaces:
        text += "\n" + "\n".join(res["singular"])
    return Outcome(res, text=text, rows=[{"singular": s} for s in res["singular"]] or None)


def cmd_spread(args) -> Outcome:
    modes = [args.file is not None, args.field_reduction is not None,
             args.hyperplane is not None, args.classify]
    if sum(modes) != 1:
        raise UsageError("choose exactly one of --file, --field-reduction, --hyperplane, --classify")
    if args.q is None:
        raise UsageError("--q is required")
    if args.classify:
        if args.n not in (None, 5):
            raise UsageError("--classify works in PG(5,q)")
        args.n = 5
        if args.q not in (2, 3):
            raise UsageError("--classify needs q in {2, 3}")
        hits, rep = classify_spread_forms(5, args.q, mode=args.mode, budget=args.budget, seed=args.seed,
                                          allow_large=args.allow_large)
        res = rep.to_dict()
        res["geometric"] = sum(h.geometric for h in hits)
        res["linear"] = sum(h.linear for h in hits)
        if args.list:
            res["hits"] = [{"form": h.form, "geometric": h.geometric, "linear": h.linear,
                            "span_dim": h.span_dim} for h in hits]
        text = (f"{len(hits)} forms of {rep.forms_tested} have singular lines forming a spread; "
                f"{res['geometric']} geometric, {res['linear']} linear")
        return Outcome(res, text=text, rows=res.get("hits"))
    if args.file is not None:
        try:
            lines = read_lines(args.file, args.q)
        except OSError as e:
            raise UsageError(str(e)) from None
        if not lines:
            raise UsageError("no lines in file")
        carrier = span([r for l in lines for r in l.rows], args.q, lines[0].n)
        args.n = carrier.n
        sp = LineSpread(carrier, tuple(lines))
        res = spread_report(sp)
        code = EXIT_OK if res["is_spread"] else EXIT_FAIL
    elif args.field_reduction is not None:
        try:
            sp = field_reduction_spread(args.field_reduction, args.q)
        except ValueError as e:
            raise UsageError(str(e)) from None
        args.n = sp.carrier.n
        res = spread_report(sp)
        code = EXIT_OK
    else:
        k = _complex(args)
        if k.h != 2:
            raise UsageError("spreads come from complexes of planes (--h 2)")
        hyp = _subspace(args.hyperplane, args)
        if hyp.dim != k.n - 1:
            raise UsageError("--hyperplane must be a hyperplane")
        cand = spread_from_complex(k, hyp, strict=False)
        res = spread_report(LineSpread(hyp, cand.lines))
        code = EXIT_OK
    if args.list:
        res["lines"] = [format_subspace(l) for l in sp.lines] if args.hyperplane is None else \
            [format_subspace(l) for l in cand.lines]
    text = ", ".join(f"{k}={v}" for k, v in res.items() if k != "lines")
    return Outcome(res, code=code, text=text)


def cmd_partition(args) -> Outcome:
    if args.action == "check":
        if args.q is None:
            raise UsageError("--q is required")
        field_create(args.q)
        try:
            om = read_partition(args.file, args.q)
        except OSError as e:
            raise UsageError(str(e)) from None
        except MalformedPartition as e:
            return Outcome({"valid": False, "linear": None, "witness": str(e)}, code=EXIT_FAIL,
                           text=f"invalid: {e}")
        args.n = om.n
        res = partition_report(om)
        text = f"valid={res['valid']} linear={res['linear']}"
        if res["witness"]:
            text += f"\nwitness: {json.dumps(res['witness'])}"
        return Outcome(res, code=EXIT_OK if res["valid"] else EXIT_FAIL, text=text)
    k = _complex(args)
    if k.h != 2:
        raise UsageError("line partitions come from complexes of planes (--h 2)")
    om = partition_from_complex(k)
    if args.out:
        write_partition(args.out, om, header=f"partition of complex {k.literal} in PG({k.n},{k.q})")
    res = {"form": k.literal, "classes": len(om.classes), "written": args.out}
    return Outcome(res, text=f"{len(om.classes)} classes" + (f" written to {args.out}" if args.out else ""))


def cmd_search(args) -> Outcome:
    _check_nq(args)
    if args.n < 3:
        raise UsageError("trilinear forms need --n >= 3")
    if args.mode == "random" and (args.budget is None or args.budget < 1):
        raise UsageError("random mode needs --budget >= 1")
    workers = args.workers or int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise UsageError("--workers must be positive")
    args.workers = workers
    rep = search_no_singular(args.n, args.q, args.mode, budget=args.budget, seed=args.seed,
                             workers=workers, cap=args.cap)
    res = rep.to_dict()
    hit = rep.forms_without_singular_line > 0
    text = (f"{rep.forms_without_singular_line} of {rep.forms_tested} forms without singular lines "
            f"({rep.mode}, {rep.elapsed:.1f} s)")
    if rep.note:
        text += f"\nnote: {rep.note}"
    if rep.witnesses:
        text += "\nwitnesses: " + " ".join(rep.witnesses)
    return Outcome(res, code=EXIT_HIT if hit else EXIT_OK, text=text)


def cmd_verify_suite(args) -> Outcome:
    from .suite import run_suite
    only = None
    if args.only:
        try:
            only = {int(a) for a in args.only.split(",")}
        except ValueError:
            raise UsageError("--only takes a comma separated list of check numbers") from None
    echo = (lambda r: print(r.line(), file=sys.stderr, flush=True)) if args.format != "text" else None
    results = run_suite(args.level, only=only, echo=echo)
    res = {"level": args.level, "checks": [r.to_dict() for r in results],
           "passed": sum(r.ok for r in results), "total": len(results)}
    text = "\n".join(r.line() for r in results) + f"\n{res['passed']}/{res['total']} checks passed"
    return Outcome(res, code=EXIT_OK if res["passed"] == res["total"] else EXIT_FAIL, text=text,
                   rows=[{k: v for k, v in r.to_dict().items() if k != "data"} for r in results])


COMMANDS = {
    "enumerate": cmd_enumerate,
    "complex": cmd_complex,
    "polar": cmd_polar,
    "singular": cmd_singular,
    "spread": cmd_spread,
    "partition": cmd_partition,
    "search": cmd_search,
    "verify-suite": cmd_verify_suite,
}


# -- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, help="projective dimension")
    common.add_argument("--q", type=int, help="field order (prime power <= 16)")
    common.add_argument("--h", type=int, help="dimension of the complex members")
    common.add_argument("--form", help="covector literal, e.g. 012+034")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="lincomplex", description="Linear complexes in finite projective spaces.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="list the d-subspaces of PG(n,q)")
    e.add_argument("--d", type=int, help="subspace dimension")
    e.add_argument("--count", action="store_true", help="only count")
    e.add_argument("--start", type=int, default=0)
    e.add_argument("--limit", type=int)

    c = sub.add_parser("complex", parents=[common], help="members of a linear complex")
    c.add_argument("--count", action="store_true", help="only count members")
    c.add_argument("--contains", metavar="SUBSPACE")

    pl = sub.add_parser("polar", parents=[common], help="polar hyperplane or pole of a subspace")
    pl.add_argument("--subspace", metavar="SUBSPACE")

    sub.add_parser("singular", parents=[common], help="singular (h-1)-subspaces")

    s = sub.add_parser("spread", parents=[common], help="line spread predicates and constructions")
    s.add_argument("--file", help="spread file, one line literal per row")
    s.add_argument("--field-reduction", type=int, metavar="M", help="Desarguesian spread of PG(2M-1,q)")
    s.add_argument("--hyperplane", metavar="SUBSPACE", help="lines of the complex with this polar hyperplane")
    s.add_argument("--classify", action="store_true", help="forms of PG(5,q) whose singular lines form a spread")
    s.add_argument("--mode", choices=("exhaustive", "random"))
    s.add_argument("--budget", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--allow-large", action="store_true", help="permit exhaustive runs beyond the cap")
    s.add_argument("--list", action="store_true", help="include the lines or hits")

    pa = sub.add_parser("partition", parents=[common], help="line partitions")
    pa.add_argument("action", choices=("check", "from-complex"))
    pa.add_argument("--file")
    pa.add_argument("--out")

    se = sub.add_parser("search", parents=[common], help="look for complexes of planes without singular lines")
    se.add_argument("--mode", choices=("exhaustive", "random"), default="random")
    se.add_argument("--budget", type=int)
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--workers", type=int, help=f"default from ${WORKERS_ENV} or 1")
    se.add_argument("--cap", type=int, default=2 ** 24, help="largest exhaustive form count")

    v = sub.add_parser("verify-suite", parents=[common], help="run the reproduction battery")
    v.add_argument("--level", choices=("quick", "full"), default="quick")
    v.add_argument("--only", help="comma separated check numbers")
    return p


# -- output ---------------------------------------------------------------

def _params(args) -> dict:
    keep = ("seed", "budget", "workers", "mode", "form", "level", "d", "subspace", "file",
            "field_reduction", "hyperplane", "cap")
    out = {k: getattr(args, k) for k in keep if getattr(args, k, None) is not None}
    out["version"] = __version__
    return out


def render(args, outcome: Outcome) -> str:
    record = {"op": args.command, "n": getattr(args, "n", None), "q": getattr(args, "q", None),
              "h": getattr(args, "h", None), "params": _params(args), "result": outcome.result}
    if args.format == "json":
        return json.dumps(record, indent=None, default=str)
    if args.format == "text":
        return outcome.text if outcome.text is not None else json.dumps(outcome.result, default=str)
    buf = io.StringIO()
    rows = outcome.rows
    if not rows:
        rows = [{"key": k, "value": json.dumps(v, default=str) if isinstance(v, (dict, list)) else v}
                for k, v in outcome.result.items()]
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help and --version
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        outcome = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, InconsistentComplex) as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (ComplexError, GeometryError, BudgetExceeded, MalformedPartition, ValueError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(render(args, outcome))
    return outcome.code


def main():
    sys.exit(run())
