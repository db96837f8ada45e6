"""Command line driver: ``kdirac <command> ...``.

Exit codes: 0 when every check passes, 1 on any FINDING, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .report import CheckRecord, EXACT_ZERO, FINDING, MATCH, VerificationReport

USAGE_ERROR = 2


class UsageError(Exception):
    pass


def _even_n(args, k: int) -> int:
    n = 2 * k if args.n is None else args.n
    if n % 2:
        raise UsageError(f"n must be even, got {n}")
    if n < 2 * k:
        raise UsageError(f"n must be at least 2k = {2 * k}, got {n}")
    return n


def _positive(name: str, value: int) -> int:
    if value < 1:
        raise UsageError(f"--{name} must be positive, got {value}")
    return value


def _emit(report: VerificationReport, args) -> int:
    print(report.table())
    if getattr(args, "json", None):
        Path(args.json).write_text(report.dumps(), encoding="utf-8")
    return report.exit_code


def cmd_verify_complex(args) -> int:
    from .sequences import verify_complex

    n = _even_n(args, args.k)
    _positive("trials", args.trials)
    if args.degree < 0:
        raise UsageError("--degree must be nonnegative")
    report = verify_complex(args.k, n, degree=args.degree, trials=args.trials, seed=args.seed, table=args.table)
    return _emit(report, args)


def cmd_verify_symbol(args) -> int:
    from .sequences import verify_symbol_exactness

    n = _even_n(args, args.k)
    _positive("samples", args.samples)
    report = verify_symbol_exactness(args.k, n, samples=args.samples, seed=args.seed, table=args.table)
    return _emit(report, args)


def _weight(text: str, k: int):
    from .weights import parse_weight

    try:
        lam = parse_weight(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if lam.k != k:
        raise UsageError(f"weight {text!r} has {lam.k} entries, expected k={k}")
    return lam


def _pair(args, k: int):
    if not 1 <= args.i < args.j <= k:
        raise UsageError(f"need 1 <= i < j <= {k}, got i={args.i}, j={args.j}")
    return args.i, args.j


def cmd_casimir(args) -> int:
    from .weights import casimir_alphas, young_symmetry_holds

    n = _even_n(args, args.k)
    lam = _weight(args.lam, args.k)
    i, j = _pair(args, args.k)
    alphas = casimir_alphas(lam, n, args.k, i, j)
    report = VerificationReport("casimir", {"k": args.k, "n": n, "lambda": str(lam), "i": i, "j": j})
    young = young_symmetry_holds(lam, n, i, j)
    zero = alphas.alpha_ij == 0
    report.notes["alphas"] = alphas.to_json()
    report.notes["young_symmetry"] = young
    report.add(CheckRecord("alpha_ij = 0", EXACT_ZERO if zero else FINDING, {"alpha_ij": alphas.alpha_ij}))
    for name, value in alphas.to_json().items():
        print(f"{name} = {value}")
    print(f"alpha_ij = 0: {zero}")
    return _emit(report, args)


def cmd_klimyk(args) -> int:
    from .weights import is_dominant, klimyk_multiplicity

    lam = _weight(args.lam, args.k)
    i, j = _pair(args, args.k)
    if not is_dominant(lam):
        raise UsageError(f"{lam} is not dominant integral")
    mult = klimyk_multiplicity(lam, i, j, args.k)
    report = VerificationReport("klimyk", {"k": args.k, "lambda": str(lam), "i": i, "j": j})
    report.add(CheckRecord("multiplicity one", MATCH if mult == 1 else FINDING, {"multiplicity": mult}))
    print(f"multiplicity = {mult}")
    return _emit(report, args)


def cmd_splitting(args) -> int:
    from .casimir_split import splitting_campaign

    n = _even_n(args, 2)
    _positive("trials", args.trials)
    if args.degree < 0:
        raise UsageError("--degree must be nonnegative")
    report = splitting_campaign(n, degree=args.degree, trials=args.trials, seed=args.seed)
    if "global_scalar" in report.notes:
        print(f"global scalar = {report.notes['global_scalar']}")
    return _emit(report, args)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kdirac", description="Exact checks for k-Dirac operator sequences.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, k_choices=None):
        sp.add_argument("--k", type=int, default=2, choices=k_choices)
        sp.add_argument("--n", type=int, default=None, help="even dimension, default 2k")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", metavar="PATH", help="write the JSON report here")

    verify = sub.add_parser("verify", help="complex and symbol checks")
    vsub = verify.add_subparsers(dest="what", required=True, parser_class=_Parser)
    vc = vsub.add_parser("complex")
    common(vc, (2, 3))
    vc.add_argument("--degree", type=int, default=3)
    vc.add_argument("--trials", type=int, default=10)
    vc.add_argument("--table", choices=("printed", "corrected"), default="printed")
    vc.set_defaults(func=cmd_verify_complex)
    vs = vsub.add_parser("symbol")
    common(vs, (2, 3))
    vs.add_argument("--samples", type=int, default=50)
    vs.add_argument("--table", choices=("printed", "corrected"), default="printed")
    vs.set_defaults(func=cmd_verify_symbol)

    cas = sub.add_parser("casimir", help="the five alpha coefficients")
    common(cas)
    cas.add_argument("--lambda", dest="lam", required=True)
    cas.add_argument("--i", type=int, default=1)
    cas.add_argument("--j", type=int, default=2)
    cas.set_defaults(func=cmd_casimir)

    kl = sub.add_parser("klimyk", help="tensor product multiplicity")
    kl.add_argument("--k", type=int, default=2)
    kl.add_argument("--lambda", dest="lam", required=True)
    kl.add_argument("--i", type=int, default=1)
    kl.add_argument("--j", type=int, default=2)
    kl.add_argument("--json", metavar="PATH")
    kl.set_defaults(func=cmd_klimyk)

    sp = sub.add_parser("splitting", help="derive D2 from the Casimir splitting product")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--degree", type=int, default=3)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", metavar="PATH")
    sp.set_defaults(func=cmd_splitting)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"kdirac: usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
