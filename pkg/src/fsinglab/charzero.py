"""Characteristic-zero oracle on affine space with empty boundary.

Multiplier ideals of monomial ideals come from the Newton polyhedron:
x^v lies in J(a^c) iff <w, v + 1> > c for every facet <w, u> >= 1.
Nondegenerate principal f reduces to its term ideal below 1 and to the
Skoda ladder above.  J' is the left limit J(c - eps), realised with an
exact eps read off the facet denominators.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .errors import CharacteristicError, DegenerateInputError
from .ideals import Ideal, _monomial_minimal
from .polyring import Polynomial, Ring, format_rational
from .reports import ClauseReport, show_ideal

MAX_DIM = 4

Vector = tuple[Fraction, ...]


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> Vector | None:
    """Unique solution of a square system, or None if singular."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                k = a[r][col]
                a[r] = [x - k * y for x, y in zip(a[r], a[col])]
    return tuple(a[r][n] for r in range(n))


def _dot(w: Sequence[Fraction], v: Sequence[int]) -> Fraction:
    return sum((wi * vi for wi, vi in zip(w, v)), Fraction(0))


@dataclass(frozen=True)
class NewtonPolyhedron:
    source_exponents: tuple[tuple[int, ...], ...]
    facets: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.source_exponents[0])

    def contains(self, v: Sequence) -> bool:
        return all(_dot(w, v) >= 1 for w in self.facets)

    def interior_scaled(self, v: Sequence, c: Fraction) -> bool:
        """v in the interior of c * P."""
        return all(_dot(w, v) > c for w in self.facets)

    @property
    def denominator(self) -> int:
        L = 1
        for w in self.facets:
            for x in w:
                L = math.lcm(L, x.denominator)
        return L

    def render(self) -> list[str]:
        out = []
        for w in self.facets:
            L = 1
            for x in w:
                L = math.lcm(L, x.denominator)
            coeffs = [int(x * L) for x in w]
            lhs = " + ".join(f"{c}*u{i}" if c != 1 else f"u{i}" for i, c in enumerate(coeffs) if c)
            out.append(f"{lhs} >= {L}")
        return out


def newton_polyhedron(exponents: Sequence[Sequence[int]]) -> NewtonPolyhedron:
    """Facets of conv(exponents) + R^n_{>=0}, by exact vertex-subset enumeration."""
    pts = [tuple(int(x) for x in v) for v in exponents]
    if not pts:
        raise ValueError("need at least one exponent vector")
    n = len(pts[0])
    if any(len(v) != n for v in pts):
        raise ValueError("exponent vectors of unequal length")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} > {MAX_DIM} is not supported")
    if any(x < 0 for v in pts for x in v):
        raise ValueError("exponents must be non-negative")
    pts = sorted(set(_monomial_minimal(pts)))
    if any(not any(v) for v in pts):
        return NewtonPolyhedron(tuple(pts), ())
    # a candidate facet passes through n constraints: points (<w,v> = 1) or rays (w_i = 0)
    cons = [("pt", v) for v in pts] + [("ray", i) for i in range(n)]
    facets: set[Vector] = set()
    for combo in itertools.combinations(cons, n):
        if all(kind == "ray" for kind, _ in combo):
            continue
        rows, rhs = [], []
        for kind, data in combo:
            if kind == "pt":
                rows.append([Fraction(x) for x in data])
                rhs.append(Fraction(1))
            else:
                rows.append([Fraction(int(j == data)) for j in range(n)])
                rhs.append(Fraction(0))
        w = _solve(rows, rhs)
        if w is None or any(x < 0 for x in w):
            continue
        if all(_dot(w, v) >= 1 for v in pts):
            facets.add(w)
    return NewtonPolyhedron(tuple(pts), tuple(sorted(facets)))


def _monomial_exponents(a: Ideal) -> list[tuple[int, ...]]:
    gens = a.groebner()
    if not all(g.is_monomial() for g in gens):
        raise DegenerateInputError("coefficient ideal is not monomial")
    return [g.leading_monomial() for g in gens]


def _from_exponents(ring: Ring, exps: Sequence[Sequence[int]]) -> Ideal:
    return Ideal(ring, [ring.monomial(v) for v in exps]).reduced()


def multiplier_from_polyhedron(ring: Ring, P: NewtonPolyhedron, c) -> Ideal:
    c = Fraction(c)
    if c < 0:
        raise ValueError("c must be non-negative")
    n = ring.nvars
    if c == 0 or not P.facets:
        return Ideal.unit(ring)
    bounds = []
    for i in range(n):
        cands = [c / w[i] for w in P.facets if w[i] > 0]
        bounds.append(math.floor(max(cands)) if cands else 0)
    # walk the first n-1 coordinates; the least admissible last one is read off facetwise
    members = []
    for head in itertools.product(*(range(b + 1) for b in bounds[:-1])):
        need = 0
        for w in P.facets:
            slack = c - _dot(w[:-1], [x + 1 for x in head])
            if w[-1] == 0:
                if slack >= 0:
                    need = None
                    break
                continue
            # w_n (v_n + 1) > slack
            need = max(need, math.floor(slack / w[-1]))
        if need is not None and need <= bounds[-1]:
            members.append(head + (need,))
    return _from_exponents(ring, _monomial_minimal(members))


def multiplier_monomial(a: Ideal, c) -> Ideal:
    if a.ring.characteristic:
        raise CharacteristicError("the multiplier-ideal oracle works over Q")
    if a.is_zero():
        raise ValueError("zero ideal")
    return multiplier_from_polyhedron(a.ring, newton_polyhedron(_monomial_exponents(a)), c)


# --- nondegeneracy -------------------------------------------------------------

def _is_diagonal(f: Polynomial) -> bool:
    seen = set()
    for m in f.terms:
        support = [i for i, x in enumerate(m) if x]
        if len(support) != 1 or support[0] in seen:
            return False
        seen.add(support[0])
    return True


@lru_cache(maxsize=None)
def load_catalog() -> tuple[dict, ...]:
    text = resources.files("fsinglab").joinpath("data/catalog.json").read_text()
    return tuple(json.loads(text)["entries"])


def catalog_entry(name: str) -> dict:
    for e in load_catalog():
        if e["name"] == name:
            return e
    raise KeyError(name)


def catalog_ring(entry: dict, characteristic: int = 0) -> Ring:
    return Ring(characteristic, tuple(entry["vars"]))


def catalog_coefficient(entry: dict, ring: Ring):
    if "f" in entry:
        return ring(entry["f"])
    return Ideal.parse(ring, entry["a"])


def _catalog_polys() -> set:
    out = set()
    for e in load_catalog():
        if "f" in e and e.get("nondegenerate"):
            out.add((tuple(e["vars"]), catalog_ring(e)(e["f"])))
    return out


def certified_nondegenerate(f: Polynomial) -> bool:
    """Monomials, diagonal sums and catalog entries; nothing else is certified."""
    if f.is_monomial() or _is_diagonal(f):
        return True
    return (f.ring.variables, f) in _catalog_polys()


def term_ideal(f: Polynomial) -> Ideal:
    return Ideal(f.ring, [f.ring.monomial(m) for m in f.terms]).reduced()


def multiplier_principal(f: Polynomial, c, assume_nondegenerate: bool = False) -> Ideal:
    c = Fraction(c)
    ring = f.ring
    if ring.characteristic:
        raise CharacteristicError("the multiplier-ideal oracle works over Q")
    if not f:
        raise ValueError("f must be nonzero")
    if not (assume_nondegenerate or certified_nondegenerate(f)):
        raise DegenerateInputError(
            f"nondegeneracy of {f} is not certified; pass assume_nondegenerate")
    if c < 0:
        raise ValueError("c must be non-negative")
    k = math.floor(c)
    frac = c - k
    base = Ideal.unit(ring) if frac == 0 else multiplier_monomial(term_ideal(f), frac)
    return base * (f ** k) if k else base


# --- pairs and J' ---------------------------------------------------------------

@dataclass(frozen=True)
class CZeroPair:
    ring: Ring
    coefficient: object  # Polynomial (principal) or monomial Ideal
    lam: Fraction
    assume_nondegenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.ring.characteristic:
            raise CharacteristicError("CZeroPair needs a ring over Q")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        coeff = self.coefficient
        if isinstance(coeff, Polynomial):
            if not coeff:
                raise ValueError("f must be nonzero")
            if not (self.assume_nondegenerate or certified_nondegenerate(coeff)):
                raise DegenerateInputError(
                    f"nondegeneracy of {coeff} is not certified; pass assume_nondegenerate")
        elif isinstance(coeff, Ideal):
            _monomial_exponents(coeff)
        else:
            raise TypeError("coefficient must be a Polynomial or a monomial Ideal")

    @property
    def principal(self) -> bool:
        return isinstance(self.coefficient, Polynomial)

    @property
    def coefficient_ideal(self) -> Ideal:
        if self.principal:
            return Ideal(self.ring, [self.coefficient])
        return self.coefficient

    @property
    def generator_count(self) -> int:
        if self.principal:
            return 1
        return len(self.coefficient.groebner())

    @property
    def flagged(self) -> bool:
        """True when the answer rests on an uncertified nondegeneracy assumption."""
        return self.principal and not certified_nondegenerate(self.coefficient)

    def at(self, lam) -> "CZeroPair":
        return CZeroPair(self.ring, self.coefficient, Fraction(lam), self.assume_nondegenerate)

    def polyhedron(self) -> NewtonPolyhedron:
        if self.principal:
            return newton_polyhedron(list(self.coefficient.terms))
        return newton_polyhedron(_monomial_exponents(self.coefficient))

    @property
    def jump_denominator(self) -> int:
        return self.polyhedron().denominator


def multiplier(pair: CZeroPair, c=None) -> Ideal:
    c = pair.lam if c is None else Fraction(c)
    if pair.principal:
        return multiplier_principal(pair.coefficient, c, assume_nondegenerate=True)
    return multiplier_monomial(pair.coefficient, c)


def maximal_nonlc(pair: CZeroPair) -> Ideal:
    """J'(a^lam) = J(a^{lam - eps}) with an exact eps inside the last gap."""
    lam = pair.lam
    if lam == 0:
        return Ideal.unit(pair.ring)
    L = pair.jump_denominator
    below = lam - Fraction(1, 2 * L * lam.denominator)
    value = multiplier(pair, below)
    prev = Fraction(math.ceil(lam * L) - 1, L)
    check = multiplier(pair, (prev + lam) / 2)
    if not value == check:
        from .errors import InvariantViolation
        raise InvariantViolation(f"J is not constant on ({format_rational(prev)}, {format_rational(lam)})")
    return value


def _candidates(pair: CZeroPair, lam_max: Fraction) -> list[Fraction]:
    L = pair.jump_denominator
    return [Fraction(k, L) for k in range(1, math.floor(lam_max * L) + 1)]


def multiplier_jumps(template: CZeroPair, lam_max) -> list[tuple[Fraction, Ideal]]:
    """Segments (start, J) with J constant on [start, next start)."""
    lam_max = Fraction(lam_max)
    out = [(Fraction(0), multiplier(template, 0))]
    for c in _candidates(template, lam_max):
        I = multiplier(template, c)
        if not I == out[-1][1]:
            out.append((c, I))
    return out


def czero_jumps(template: CZeroPair, lam_max) -> list[tuple[Fraction, Ideal]]:
    """Segments (start, J') with J' constant on (start, next start]."""
    lam_max = Fraction(lam_max)
    out = [(Fraction(0), Ideal.unit(template.ring))]
    L = template.jump_denominator
    for c in _candidates(template, lam_max):
        after = maximal_nonlc(template.at(c + Fraction(1, L)))
        if not after == out[-1][1]:
            out.append((c, after))
    return out


def jump_points(segments) -> list[Fraction]:
    return [s for s, _ in segments[1:]]


def _sample_points(template: CZeroPair, lam_max: Fraction) -> list[Fraction]:
    L = template.jump_denominator
    pts = []
    for k in range(1, math.floor(lam_max * L) + 1):
        pts.append(Fraction(2 * k - 1, 2 * L))
        pts.append(Fraction(k, L))
    return pts


def verify_czero_props(template: CZeroPair, lam_max) -> list[ClauseReport]:
    lam_max = Fraction(lam_max)
    status = "assumed nondegenerate" if template.flagged else "automatic"
    reports: list[ClauseReport] = []
    segs = czero_jumps(template, lam_max)
    jumps = jump_points(segs)
    ok = all(a < b for a, b in zip(jumps, jumps[1:])) and all(
        b <= a for (_, a), (_, b) in zip(segs, segs[1:]))
    reports.append(ClauseReport(
        "discrete", status, f"{len(jumps)} jumps in (0, {format_rational(lam_max)}]",
        "finite, J' non-increasing", "pass" if ok else "fail"))

    # left-continuity: J' at each jump equals J' at the midpoint just below it
    L = template.jump_denominator
    bad = []
    for j in jumps:
        mid = j - Fraction(1, 2 * L)
        if not maximal_nonlc(template.at(j)) == maximal_nonlc(template.at(mid)):
            bad.append(format_rational(j))
    reports.append(ClauseReport(
        "left-continuous", status, "J'(jump)", "J'(midpoint below jump)",
        "fail" if bad else "pass", ("at " + ", ".join(bad)) if bad else ""))

    # J <= J' everywhere sampled
    bad = [format_rational(t) for t in _sample_points(template, lam_max)
           if not multiplier(template, t) <= maximal_nonlc(template.at(t))]
    reports.append(ClauseReport(
        "J in J'", status, "J(a^t)", "J'(a^t)", "fail" if bad else "pass",
        ("at " + ", ".join(bad)) if bad else ""))

    a = template.coefficient_ideal
    m = template.generator_count
    clauses = [("skoda-generators", m)]
    if template.principal:
        clauses.append(("skoda-divisor", 1))
    for name, floor_ in clauses:
        pts = [t for t in sorted(set(jumps) | set(_sample_points(template, lam_max))) if t > floor_]
        if not pts:
            reports.append(ClauseReport(
                name, status, f"J'(a^t), t > {floor_}", f"a*J'(a^(t-1))", "out of clause range",
                f"no sample point in ({floor_}, {format_rational(lam_max)}]"))
            continue
        bad = []
        for t in pts:
            lhs = maximal_nonlc(template.at(t))
            rhs = a * maximal_nonlc(template.at(t - 1))
            if not lhs == rhs:
                bad.append(f"t={format_rational(t)}: {show_ideal(lhs)} vs {show_ideal(rhs)}")
        reports.append(ClauseReport(
            name, status, f"J'(a^t), t in ({floor_}, {format_rational(lam_max)}]", "a*J'(a^(t-1))",
            "fail" if bad else "pass", "; ".join(bad) if bad else f"{len(pts)} points"))
    return reports
