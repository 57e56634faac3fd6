"""Command-line front door.

Commands: gen (random system file), solve (one search), experiment
(Monte Carlo batch with CSV + summary output), theory (bound report),
oracle (exact brute-force baselines).  Exit codes: 0 ok, 1 search ended
in failure, 2 usage error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .errors import CapacityError, DomainError, UsageError
from .ffield import field_for_order
from .mpoly import MPoly
from .mc import exhaustive_p1, exhaustive_sk, records_to_csv, run_experiment
from .sampler import RngStream, SystemSpec, sample_system
from .svs import run_svs
from .theory import theory_report
from .zdsolve import ZeroDimQuery, distinct_geometric_points

EXIT_OK = 0
EXIT_FAILURE_OUTCOME = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


# ---------------------------------------------------------------------------
# system files


def system_to_text(system: SystemSpec) -> str:
    doc = {
        "q": system.ctx.q,
        "r": system.r,
        "s": system.s,
        "d": system.d,
        "polynomials": [
            [{"c": c, "e": list(exps)} for exps, c in poly.terms] for poly in system.polys
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def system_from_text(text: str, allow_square: bool = False) -> SystemSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed system file: {exc}") from exc
    for key in ("q", "r", "s", "d", "polynomials"):
        if key not in doc:
            raise UsageError(f"system file missing field {key!r}")
    q, r, s, d = (int(doc[k]) for k in ("q", "r", "s", "d"))
    ctx = field_for_order(q)
    polys_doc = doc["polynomials"]
    if len(polys_doc) != s:
        raise UsageError(f"expected {s} polynomials, found {len(polys_doc)}")
    polys = []
    for terms_doc in polys_doc:
        items = []
        seen = set()
        for term in terms_doc:
            c = int(term["c"])
            e = tuple(int(x) for x in term["e"])
            if len(e) != r:
                raise UsageError(f"exponent vector {e} does not have {r} entries")
            if sum(e) > d:
                raise UsageError(f"term degree {sum(e)} exceeds bound {d}")
            if not 1 <= c < q:
                raise UsageError(f"coefficient {c} outside [1, {q - 1}]")
            if e in seen:
                raise UsageError(f"duplicate exponent vector {e}")
            seen.add(e)
            items.append((e, c))
        polys.append(MPoly.from_terms(r, items, ctx))
    if allow_square and s == r:
        # zero-dimensional query in disguise; bypass the 1 < s < r check
        return _SquareSystem(ctx, r, s, d, tuple(polys))
    return SystemSpec(ctx, r, s, d, tuple(polys))


class _SquareSystem:
    """Minimal stand-in for a system file with s == r (oracle use only)."""

    def __init__(self, ctx, r, s, d, polys):
        self.ctx, self.r, self.s, self.d, self.polys = ctx, r, s, d, polys


def parse_strips(text: str, m: int, ctx) -> list[tuple[int, ...]]:
    """Parse "c1,c2;c1,c2" into strips of m coordinates each."""
    strips = []
    for part in text.split(";"):
        coords = tuple(int(x) for x in part.split(",") if x.strip() != "")
        if len(coords) != m:
            raise UsageError(f"strip {part!r} must have {m} coordinates")
        for x in coords:
            ctx.check(x)
        strips.append(coords)
    if len(set(strips)) != len(strips):
        raise UsageError("strips must be pairwise distinct")
    return strips


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-svsearch-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonify(obj):
    from fractions import Fraction

    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    ctx = field_for_order(args.q)
    rng = RngStream(args.seed, 0)
    system = sample_system(ctx, args.r, args.s, args.d, rng, allow_zero=args.allow_zero)
    sys.stdout.write(system_to_text(system))
    return EXIT_OK


def cmd_solve(args) -> int:
    with open(args.system) as handle:
        system = system_from_text(handle.read())
    ctx = system.ctx
    strips = None
    rng = None
    if args.strips is not None:
        strips = parse_strips(args.strips, system.r - system.s, ctx)
    else:
        rng = RngStream(args.seed, 0)
    outcome = run_svs(
        system,
        strips=strips,
        rng=rng,
        backend=args.backend,
        hstar=args.hstar,
        certify=args.certify,
    )
    sys.stdout.write(json.dumps(outcome.to_dict(system), indent=1) + "\n")
    return EXIT_OK if outcome.status == "success" else EXIT_FAILURE_OUTCOME


def cmd_experiment(args) -> int:
    records, summary = run_experiment(
        args.q,
        args.r,
        args.s,
        args.d,
        args.trials,
        args.seed,
        backend=args.backend,
        want_certificates=args.certify,
        hstar=args.hstar,
        workers=args.workers,
    )
    os.makedirs(args.out, exist_ok=True)
    _atomic_write(os.path.join(args.out, "trials.csv"), records_to_csv(records))
    _atomic_write(
        os.path.join(args.out, "summary.json"),
        json.dumps(summary, indent=2, default=_jsonify) + "\n",
    )
    return EXIT_OK if summary["aborted"] == 0 else EXIT_CAPACITY


def cmd_theory(args) -> int:
    report = theory_report(args.q, args.r, args.s, args.d, hmax=args.h, omega=args.omega)
    sys.stdout.write(json.dumps(report, indent=1, default=_jsonify) + "\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.oracle == "p1-exhaustive":
        value = exhaustive_p1(args.q, args.r, args.s, args.d)
        sys.stdout.write(json.dumps({"p1": str(value), "p1_float": float(value)}) + "\n")
        return EXIT_OK
    if args.oracle == "sk-exhaustive":
        ctx = field_for_order(args.q)
        strips = parse_strips(args.strips, args.r - args.s, ctx)
        value, invertible = exhaustive_sk(args.q, args.r, args.s, args.d, strips)
        doc = {"sk": str(value), "sk_float": float(value), "m_invertible": invertible}
        if not invertible:
            doc["note"] = "M singular: comparison hypotheses do not apply"
        sys.stdout.write(json.dumps(doc) + "\n")
        return EXIT_OK
    if args.oracle == "count-points":
        with open(args.system) as handle:
            system = system_from_text(handle.read(), allow_square=True)
        polys = system.polys
        if system.s != system.r:
            if args.strip is None:
                raise UsageError("count-points needs --strip for an underdetermined system")
            strip = parse_strips(args.strip, system.r - system.s, system.ctx)[0]
            polys = tuple(f.specialize(strip, system.ctx) for f in polys)
        query = ZeroDimQuery(system.ctx, polys[0].nvars, polys, system.d)
        count = distinct_geometric_points(query)
        sys.stdout.write(json.dumps({"distinct_geometric_points": count}) + "\n")
        return EXIT_OK
    raise UsageError(f"unknown oracle {args.oracle!r}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svsearch",
        description="Search for rational solutions of underdetermined systems "
        "over finite fields by specializing onto vertical strips.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a random system file on stdout")
    gen.add_argument("--q", type=int, required=True, help="field order (prime power)")
    gen.add_argument("--r", type=int, required=True, help="number of variables")
    gen.add_argument("--s", type=int, required=True, help="number of equations (1 < s < r)")
    gen.add_argument("--d", type=int, required=True, help="degree bound (>= 2)")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--allow-zero", action=argparse.BooleanOptionalAction, default=True,
                     help="sample the full coefficient space (zero polynomial included)")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run one strip search on a system file")
    solve.add_argument("--system", required=True, help="path to a system file")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--backend", choices=("exhaustive", "resultant"), default="exhaustive")
    solve.add_argument("--strips", default=None,
                       help='explicit strips "c1,c2;c1,c2" (overrides --seed)')
    solve.add_argument("--hstar", type=int, default=None, help="strip budget (default r-s+1)")
    solve.add_argument("--certify", action="store_true", default=False)
    solve.set_defaults(func=cmd_solve)

    exp = sub.add_parser("experiment", help="Monte Carlo batch; writes CSV + summary")
    exp.add_argument("--q", type=int, required=True)
    exp.add_argument("--r", type=int, required=True)
    exp.add_argument("--s", type=int, required=True)
    exp.add_argument("--d", type=int, required=True)
    exp.add_argument("--trials", type=int, required=True)
    exp.add_argument("--seed", type=int, required=True)
    exp.add_argument("--backend", choices=("exhaustive", "resultant"), default="exhaustive")
    exp.add_argument("--certify", action="store_true", default=False)
    exp.add_argument("--hstar", type=int, default=None)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--out", required=True, help="output directory")
    exp.set_defaults(func=cmd_experiment)

    theory = sub.add_parser("theory", help="print the bound report for a parameter set")
    theory.add_argument("--q", type=int, required=True)
    theory.add_argument("--r", type=int, required=True)
    theory.add_argument("--s", type=int, required=True)
    theory.add_argument("--d", type=int, required=True)
    theory.add_argument("--h", type=int, default=None, help="largest strip index to report")
    theory.add_argument("--omega", type=float, default=3.0)
    theory.set_defaults(func=cmd_theory)

    oracle = sub.add_parser("oracle", help="exact brute-force baselines")
    oracle.add_argument("oracle", choices=("p1-exhaustive", "sk-exhaustive", "count-points"))
    oracle.add_argument("--q", type=int)
    oracle.add_argument("--r", type=int)
    oracle.add_argument("--s", type=int)
    oracle.add_argument("--d", type=int)
    oracle.add_argument("--strips", default=None, help='strips for sk-exhaustive, "0;1"')
    oracle.add_argument("--system", default=None, help="system file for count-points")
    oracle.add_argument("--strip", default=None, help="strip to specialize for count-points")
    oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
