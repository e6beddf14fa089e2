"""Reduction mod p of characteristic-zero data and prime-by-prime comparison.

For each good prime p and each lambda on the policy grid we compare
sigma(R_p, f_p^lambda) against (J'(f^lambda))_p.  The inclusion of the
former in the latter is unconditional, so a row where it fails is reported
as VIOLATION and treated as a bug.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Sequence

from . import charzero
from .errors import BadPrimeError, InvariantViolation
from .fsing import PairData, sigma
from .ideals import Ideal
from .polyring import Polynomial, Ring, format_rational, is_prime, primes_up_to, reduce_coeffs_mod_p
from .reports import show_ideal

CAVEAT = ("finite scan: the density below is an observed frequency among good primes "
          "up to p_max and is not extrapolated to all primes")

EQUAL = "equal"
SMALLER = "sigma-strictly-smaller"
VIOLATION = "VIOLATION"


def _prime_factors(n: int) -> set[int]:
    n = abs(n)
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


@dataclass(frozen=True)
class ModelInput:
    ring: Ring
    coefficient: object  # Polynomial or monomial Ideal over Q
    assume_nondegenerate: bool = False
    bad_primes: frozenset = field(init=False)

    def __post_init__(self):
        if self.ring.characteristic:
            raise ValueError("model data must live over Q")
        tmpl = self.template()
        bad: set[int] = set()
        polys = [self.coefficient] if isinstance(self.coefficient, Polynomial) \
            else list(self.coefficient.groebner())
        for g in polys:
            for c in g.terms.values():
                c = Fraction(c)
                bad |= _prime_factors(c.numerator) | _prime_factors(c.denominator)
        # primes dividing the jump denominators
        bad |= _prime_factors(tmpl.jump_denominator)
        object.__setattr__(self, "bad_primes", frozenset(bad))

    def template(self) -> charzero.CZeroPair:
        return charzero.CZeroPair(self.ring, self.coefficient, Fraction(0), self.assume_nondegenerate)

    @property
    def generator_count(self) -> int:
        return self.template().generator_count

    def describe(self) -> dict:
        if isinstance(self.coefficient, Polynomial):
            data = {"f": str(self.coefficient)}
        else:
            data = {"a": self.coefficient.render()}
        data["vars"] = list(self.ring.variables)
        data["bad_primes"] = sorted(self.bad_primes)
        return data


def _reduce_ideal(I: Ideal, ring_p: Ring) -> Ideal:
    return Ideal(ring_p, [reduce_coeffs_mod_p(g, ring_p.characteristic, ring_p)
                          for g in I.groebner()]).reduced()


def reduce_model(inp: ModelInput, p: int, lam=0) -> PairData:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p in inp.bad_primes:
        raise BadPrimeError(f"{p} is a bad prime for this model")
    ring_p = inp.ring.with_characteristic(p)
    c = inp.coefficient
    if isinstance(c, Polynomial):
        coeff = reduce_coeffs_mod_p(c, p, ring_p)
    else:
        coeff = _reduce_ideal(c, ring_p)
    return PairData(ring_p, coeff, Fraction(lam))


@dataclass(frozen=True)
class Row:
    prime: int
    lam: Fraction
    sigma: Ideal
    nonlc: Ideal
    relation: str

    def to_list(self) -> list[str]:
        return [str(self.prime), format_rational(self.lam), show_ideal(self.sigma),
                show_ideal(self.nonlc), self.relation]


def compare_at(inp: ModelInput, p: int, lam) -> Row:
    lam = Fraction(lam)
    pair = reduce_model(inp, p, lam)
    s = sigma(pair).value
    j = _reduce_ideal(charzero.maximal_nonlc(inp.template().at(lam)), pair.ring)
    if s == j:
        rel = EQUAL
    elif s <= j:
        rel = SMALLER
    else:
        rel = VIOLATION
    return Row(p, lam, s, j, rel)


def _inside(a: Fraction, b: Fraction, p: int) -> Fraction:
    """A point of (a, b) with denominator prime to p, as simple as possible."""
    d = 1
    while True:
        if d % p:
            k = math.floor(a * d) + 1
            if Fraction(k, d) < b:
                return Fraction(k, d)
        d += 1


def lambda_points(inp: ModelInput, p: int, policy: str, lam_max=None,
                  denominator: int | None = None) -> list[Fraction]:
    lam_max = Fraction(inp.generator_count + 1) if lam_max is None else Fraction(lam_max)
    if policy == "grid":
        if not denominator or denominator < 1:
            raise ValueError("grid policy needs a positive denominator")
        return [Fraction(k, denominator) for k in range(0, math.floor(lam_max * denominator) + 1)]
    if policy != "all-jumps":
        raise ValueError(f"unknown policy {policy!r}")
    ends = [j for j in charzero.jump_points(charzero.czero_jumps(inp.template(), lam_max)) if j > 0]
    ends = sorted(set(ends) | {lam_max})
    pts = {Fraction(0)} | set(ends)
    prev = Fraction(0)
    for e in ends:
        pts.add(_inside(prev, e, p))
        prev = e
    return sorted(pts)


@dataclass
class ComparisonReport:
    input: dict
    p_max: int
    policy: str
    rows: list[Row]
    good_primes: list[int]

    def per_prime(self) -> list[dict]:
        out = []
        for p in self.good_primes:
            rows = [r for r in self.rows if r.prime == p]
            verdict = "equal-for-all-lambda" if all(r.relation == EQUAL for r in rows) else "not-equal"
            first = next((r for r in rows if r.relation != EQUAL), None)
            entry = {"prime": p, "verdict": verdict}
            if first is not None:
                entry["first_difference"] = format_rational(first.lam)
            out.append(entry)
        return out

    @property
    def equal_primes(self) -> list[int]:
        return [e["prime"] for e in self.per_prime() if e["verdict"] == "equal-for-all-lambda"]

    @property
    def density(self) -> Fraction:
        if not self.good_primes:
            return Fraction(0)
        return Fraction(len(self.equal_primes), len(self.good_primes))

    @property
    def violations(self) -> list[Row]:
        return [r for r in self.rows if r.relation == VIOLATION]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["prime", "lambda", "sigma", "nonlc_reduction", "relation"])
        for r in self.rows:
            w.writerow(r.to_list())
        return buf.getvalue()

    def summary(self) -> dict:
        d = self.density
        return {
            "schema": 1,
            "input": self.input,
            "p_max": self.p_max,
            "policy": self.policy,
            "per_prime": self.per_prime(),
            "density": format_rational(d),
            "density_float": round(float(d), 6),
            "violations": len(self.violations),
            "caveat": CAVEAT,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _scan_prime(args) -> list[Row]:
    inp, p, policy, lam_max, denominator = args
    return [compare_at(inp, p, lam)
            for lam in lambda_points(inp, p, policy, lam_max, denominator)]


def prime_scan(inp: ModelInput, p_max: int, policy: str = "all-jumps", lam_max=None,
               denominator: int | None = None, jobs: int = 1, strict: bool = True) -> ComparisonReport:
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    good = [p for p in primes_up_to(p_max) if p not in inp.bad_primes]
    tasks = [(inp, p, policy, lam_max, denominator) for p in good]
    if jobs > 1:
        with Pool(jobs) as pool:
            chunks = pool.map(_scan_prime, tasks)
    else:
        chunks = [_scan_prime(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    policy_name = policy if policy == "all-jumps" else f"grid({denominator})"
    report = ComparisonReport(inp.describe(), p_max, policy_name, rows, good)
    if strict and report.violations:
        r = report.violations[0]
        raise InvariantViolation(
            f"sigma not inside reduced J' at p={r.prime}, lambda={format_rational(r.lam)}")
    return report


@dataclass(frozen=True)
class Principalization:
    polynomial: Polynomial
    coefficients: tuple[tuple[int, ...], ...]
    seed: int


def principalize(a: Ideal, m: int, seed: int, max_tries: int = 50) -> Principalization:
    """g = g_1 ... g_m with each g_i a seeded random combination of the generators of a."""
    if m < 1:
        raise ValueError("m must be >= 1")
    gens = list(a.generators)
    if not gens:
        raise ValueError("a has no generators")
    rng = random.Random(seed)
    ring = a.ring
    factors, coeffs = [], []
    for _ in range(m):
        for _ in range(max_tries):
            cs = tuple(rng.randint(1, 9) for _ in gens)
            g = ring.zero()
            for c, h in zip(cs, gens):
                g = g + h * ring.constant(c)
            if g:
                break
        else:
            raise ValueError("every drawn combination vanished")
        factors.append(g)
        coeffs.append(cs)
    prod = ring.one()
    for g in factors:
        prod = prod * g
    return Principalization(prod, tuple(coeffs), seed)
