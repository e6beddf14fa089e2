"""fsinglab command line.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import charzero, corrlab, fsing
from .errors import FsingError, InvariantViolation, ParseError
from .frobenius import frobenius_root
from .ideals import Ideal
from .polyring import ORDERS, Ring, format_rational, parse_rational

SCHEMA = 1


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ParseError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"expected an exact rational a/b, got {text!r}") from exc


def _boundary_term(text: str):
    g, sep, t = text.rpartition(":")
    if not sep or not g:
        raise argparse.ArgumentTypeError(f"boundary must look like 'g:t', got {text!r}")
    return g, _rational(t)


def _ring(args, characteristic=None) -> Ring:
    p = args.p if characteristic is None else characteristic
    names = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    return Ring(p, names, getattr(args, "order", "grevlex"))


def _coefficient(args, ring: Ring):
    if getattr(args, "catalog", None):
        entry = charzero.catalog_entry(args.catalog)
        ring = Ring(ring.characteristic, tuple(entry["vars"]), ring.order)
        return ring, charzero.catalog_coefficient(entry, ring)
    if args.f and args.ideal:
        raise UsageError("give either --f or --ideal, not both")
    if args.f:
        return ring, ring(args.f)
    if args.ideal:
        return ring, Ideal.parse(ring, args.ideal.split(","))
    raise UsageError("one of --f, --ideal or --catalog is required")


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for {args.command}")


def _pair(args) -> fsing.PairData:
    _need(args, "p", "lam")
    ring, coeff = _coefficient(args, _ring(args))
    boundary = tuple((ring(g), t) for g, t in (args.boundary or []))
    return fsing.PairData(ring, coeff, args.lam, boundary)


def _czero(args) -> charzero.CZeroPair:
    ring, coeff = _coefficient(args, _ring(args, 0))
    lam = args.lam if getattr(args, "lam", None) is not None else Fraction(0)
    return charzero.CZeroPair(ring, coeff, lam, args.assume_nondegenerate)


def _segments(segs) -> list[dict]:
    return [{"from": format_rational(s), "ideal": I.render()} for s, I in segs]


def cmd_sigma(args) -> dict:
    return fsing.sigma(_pair(args)).to_dict()


def cmd_tau(args) -> dict:
    pair = _pair(args)
    if not pair.principal:
        raise FsingError("tau is only supported for principal coefficients")
    return {"ideal": fsing.tau(pair).render()}


def cmd_fpt(args) -> dict:
    _need(args, "p", "f")
    ring = _ring(args)
    return fsing.fpt_bounds(ring(args.f), args.emax).to_dict()


def cmd_root(args) -> dict:
    _need(args, "p", "ideal", "e")
    ring = _ring(args)
    return {"ideal": frobenius_root(Ideal.parse(ring, args.ideal.split(",")), args.e).render()}


def cmd_gb(args) -> dict:
    _need(args, "ideal")
    ring = _ring(args, args.p or 0)
    return {"ideal": Ideal.parse(ring, args.ideal.split(",")).render(), "order": ring.order}


def cmd_multiplier(args) -> dict:
    _need(args, "lam")
    pair = _czero(args)
    out = {"ideal": charzero.multiplier(pair).render()}
    if pair.flagged:
        out["flag"] = "assumed nondegenerate"
    return out


def cmd_nonlc(args) -> dict:
    _need(args, "lam")
    pair = _czero(args)
    out = {"ideal": charzero.maximal_nonlc(pair).render()}
    if pair.flagged:
        out["flag"] = "assumed nondegenerate"
    return out


def cmd_jumps(args) -> dict:
    _need(args, "lambda_max")
    if args.p:
        _need(args, "den")
        args.lam = Fraction(0)
        segs = fsing.sigma_jumps(_pair(args), args.lambda_max, args.den)
        return {"sigma": _segments(segs)}
    pair = _czero(args)
    return {
        "multiplier": _segments(charzero.multiplier_jumps(pair, args.lambda_max)),
        "nonlc": _segments(charzero.czero_jumps(pair, args.lambda_max)),
    }


def cmd_verify(args) -> dict:
    if args.check == "czero":
        _need(args, "lambda_max")
        reports = charzero.verify_czero_props(_czero(args), args.lambda_max)
    elif args.check == "sigma-props":
        reports = fsing.verify_sigma_properties(_pair(args), args.den, args.lambda_max)
    else:
        _need(args, "p", "lam", "m")
        ring, coeff = _coefficient(args, _ring(args))
        a = coeff if isinstance(coeff, Ideal) else Ideal(ring, [coeff])
        pr = corrlab.principalize(a, args.m, args.seed)
        rep = fsing.verify_power_containment(a, pr.polynomial, args.m, args.lam)
        d = rep.to_dict()
        d["g"] = str(pr.polynomial)
        d["coefficients"] = [list(c) for c in pr.coefficients]
        d["seed"] = args.seed
        return {"reports": [d], "passed": rep.passed}
    return {"reports": [r.to_dict() for r in reports], "passed": all(r.passed for r in reports)}


def cmd_scan(args):
    _need(args, "pmax")
    ring, coeff = _coefficient(args, _ring(args, 0))
    inp = corrlab.ModelInput(ring, coeff, args.assume_nondegenerate)
    policy = "all-jumps" if args.lambdas == "jumps" else "grid"
    if policy == "grid":
        _need(args, "den")
    rep = corrlab.prime_scan(inp, args.pmax, policy, args.lambda_max, args.den,
                             jobs=args.jobs, strict=False)
    return rep


COMMANDS = {
    "sigma": (cmd_sigma, "non-F-pure ideal sigma(R, Delta, a^lambda)"),
    "tau": (cmd_tau, "test ideal tau(R, Delta, f^lambda)"),
    "fpt": (cmd_fpt, "F-pure threshold bounds from nu-invariants"),
    "root": (cmd_root, "Frobenius root I^[1/p^e]"),
    "gb": (cmd_gb, "reduced Groebner basis"),
    "multiplier": (cmd_multiplier, "multiplier ideal over Q"),
    "nonlc": (cmd_nonlc, "maximal non-lc ideal J' over Q"),
    "jumps": (cmd_jumps, "jumping points of sigma (with --p) or of J and J' (without)"),
    "verify": (cmd_verify, "run a property checker"),
    "scan": (cmd_scan, "compare sigma with reduced J' over primes up to --pmax"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsinglab",
        description="Exact F-singularity computations. Lambdas are exact fractions a/b; "
                    "decimals are rejected. Output is JSON (schema 1) unless --csv is given.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--p", type=int, default=None, help="characteristic (a prime)")
        sp.add_argument("--vars", default="x,y", help="comma-separated variables (default x,y)")
        sp.add_argument("--order", choices=ORDERS, default="grevlex")
        sp.add_argument("--f", help="principal coefficient polynomial")
        sp.add_argument("--ideal", help="comma-separated ideal generators")
        sp.add_argument("--catalog", help="named catalog example (overrides --vars)")
        sp.add_argument("--lambda", dest="lam", type=_rational, help="exponent as a/b")
        sp.add_argument("--boundary", type=_boundary_term, action="append",
                        help="boundary component g:t (repeatable)")
        sp.add_argument("--assume-nondegenerate", action="store_true",
                        help="accept an uncertified nondegenerate f (flagged in output)")
        sp.add_argument("--csv", action="store_true", help="CSV output (scan only)")
        if name == "fpt":
            sp.add_argument("--emax", type=int, default=3)
        if name == "root":
            sp.add_argument("--e", type=int, default=None)
        if name in ("jumps", "verify", "scan"):
            sp.add_argument("--lambda-max", type=_rational, default=None)
            sp.add_argument("--den", type=int, default=None, help="grid denominator")
        if name == "verify":
            sp.add_argument("--check", choices=("sigma-props", "containment", "czero"), required=True)
            sp.add_argument("--m", type=int, default=None)
            sp.add_argument("--seed", type=int, default=0)
        if name == "scan":
            sp.add_argument("--pmax", type=int, default=None)
            sp.add_argument("--lambdas", choices=("jumps", "grid"), default="jumps")
            sp.add_argument("--jobs", type=int, default=1)
    return parser


def _emit(obj, command: str) -> None:
    obj = dict(obj)
    obj["schema"] = SCHEMA
    obj["command"] = command
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    if args.csv and args.command != "scan":
        parser.error("--csv is only available for scan")
    try:
        result = func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except (FsingError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, corrlab.ComparisonReport):
        if args.csv:
            sys.stdout.write(result.to_csv())
        else:
            summary = result.summary()
            summary["rows"] = [r.to_list() for r in result.rows]
            _emit(summary, "scan")
        return 3 if result.violations else 0
    _emit(result, args.command)
    if args.command == "verify" and not result["passed"]:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
