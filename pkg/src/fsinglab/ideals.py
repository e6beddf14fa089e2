"""Ideals with a cached reduced Groebner basis (Buchberger with both criteria)."""

from __future__ import annotations

import heapq
import json
import operator
from typing import Iterable, Sequence

from .errors import RingMismatchError
from .polyring import (
    Monomial,
    Polynomial,
    Ring,
    monomial_divides,
    monomial_lcm,
    parse_poly,
    render_poly,
)

# Min-heap keys: the smallest heap key is the largest monomial.
_HEAP_KEYS = {
    "grevlex": lambda m: (-sum(m), tuple(reversed(m))),
    "lex": lambda m: tuple(-x for x in m),
    "elim": lambda m: (-m[0], -sum(m[1:]), tuple(reversed(m[1:]))),
}


def _normal_form(terms: dict, basis: Sequence[Polynomial], ring: Ring, full: bool = True) -> dict:
    """Remainder of ``terms`` on division by the monic polynomials ``basis``."""
    if not terms or not basis:
        return dict(terms)
    p = ring.characteristic
    hk = _HEAP_KEYS[ring.order]
    rem = dict(terms)
    heap = [(hk(m), m) for m in rem]
    heapq.heapify(heap)
    leads = [(g.leading_monomial(), g) for g in basis]
    out: dict = {}
    add, sub = operator.add, operator.sub
    while heap:
        _, m = heapq.heappop(heap)
        c = rem.pop(m, None)
        if c is None:
            continue
        for lm, g in leads:
            if all(x <= y for x, y in zip(lm, m)):
                shift = tuple(map(sub, m, lm))
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = tuple(map(add, shift, gm))
                    old = rem.get(t)
                    if old is None:
                        v = -c * gc
                        if p:
                            v %= p
                        rem[t] = v
                        heapq.heappush(heap, (hk(t), t))
                    else:
                        v = old - c * gc
                        if p:
                            v %= p
                        if v:
                            rem[t] = v
                        else:
                            del rem[t]
                break
        else:
            out[m] = c
            if not full:
                out.update(rem)
                return out
    return out


def _monomial_minimal(monos: Iterable[Monomial]) -> list[Monomial]:
    monos = sorted(set(monos), key=sum)
    kept: list[Monomial] = []
    for m in monos:
        if not any(monomial_divides(k, m) for k in kept):
            kept.append(m)
    return kept


def _canonical_sort(ring: Ring, polys: list[Polynomial]) -> list[Polynomial]:
    # lower-degree leading monomials first, ties broken by descending lex
    return sorted(polys, key=lambda g: (sum(g.leading_monomial()), tuple(-x for x in g.leading_monomial())))


def buchberger(ring: Ring, generators: Iterable[Polynomial]) -> list[Polynomial]:
    """Reduced Groebner basis of the ideal generated by ``generators``.

    S-pairs are processed by (degree of lcm, then generator indices); the
    product criterion and the chain criterion prune pairs.  Output is monic
    and canonically sorted.
    """
    gens = [g for g in generators if g]
    if not gens:
        return []
    if any(g.is_constant() for g in gens):
        return [ring.one()]
    if all(g.is_monomial() for g in gens):
        return _canonical_sort(ring, [ring.monomial(m) for m in _monomial_minimal(
            next(iter(g.terms)) for g in gens)])

    key = ring.sort_key
    gens.sort(key=lambda g: (key(g.leading_monomial()), len(g.terms)))
    G: list[Polynomial] = []
    lms: list[Monomial] = []
    pending: set[tuple[int, int]] = set()
    heap: list = []

    def add(h: Polynomial):
        k = len(G)
        G.append(h)
        lm = h.leading_monomial()
        lms.append(lm)
        for i in range(k):
            lc = monomial_lcm(lms[i], lm)
            pending.add((i, k))
            heapq.heappush(heap, (sum(lc), i, k))

    for g in gens:
        r = _normal_form(g.terms, G, ring)
        if r:
            h = Polynomial._raw(ring, r).monic()
            if h.is_constant():
                return [ring.one()]
            add(h)

    while heap:
        _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        a, b = lms[i], lms[j]
        lc = monomial_lcm(a, b)
        if all(x == 0 or y == 0 for x, y in zip(a, b)):
            continue
        chain = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            if monomial_divides(lms[k], lc) and (min(i, k), max(i, k)) not in pending \
                    and (min(j, k), max(j, k)) not in pending:
                chain = True
                break
        if chain:
            continue
        s = G[i].mul_term(tuple(x - y for x, y in zip(lc, a)), 1) - \
            G[j].mul_term(tuple(x - y for x, y in zip(lc, b)), 1)
        r = _normal_form(s.terms, G, ring)
        if r:
            h = Polynomial._raw(ring, r).monic()
            if h.is_constant():
                return [ring.one()]
            add(h)

    # minimalize, then interreduce
    minimal: list[Polynomial] = []
    for idx, g in enumerate(G):
        lm = lms[idx]
        redundant = False
        for jdx, h in enumerate(G):
            if jdx == idx:
                continue
            if monomial_divides(lms[jdx], lm) and (lms[jdx] != lm or jdx < idx):
                redundant = True
                break
        if not redundant:
            minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        lm = g.leading_monomial()
        tail = {m: c for m, c in g.terms.items() if m != lm}
        r = _normal_form(tail, others, ring)
        r[lm] = g.terms[lm]
        reduced.append(Polynomial._raw(ring, r))
    return _canonical_sort(ring, reduced)


class Ideal:
    """Finitely generated ideal; the reduced Groebner basis is computed once and cached."""

    __slots__ = ("ring", "generators", "_gb")

    def __init__(self, ring: Ring, generators: Iterable[Polynomial] = ()):
        gens = []
        for g in generators:
            if not isinstance(g, Polynomial):
                g = ring.constant(g)
            if g.ring != ring:
                raise RingMismatchError(f"generator {g} not in {ring}")
            if g:
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._gb = None

    @classmethod
    def unit(cls, ring: Ring) -> "Ideal":
        return cls.from_basis(ring, [ring.one()])

    @classmethod
    def from_basis(cls, ring: Ring, basis: list[Polynomial]) -> "Ideal":
        obj = cls(ring, basis)
        obj._gb = tuple(basis)
        return obj

    @classmethod
    def parse(cls, ring: Ring, texts: Iterable[str]) -> "Ideal":
        return cls(ring, [parse_poly(t, ring) for t in texts])

    @classmethod
    def maximal(cls, ring: Ring) -> "Ideal":
        return cls.from_basis(ring, ring.gens())

    # ---- Groebner data -----------------------------------------------------
    def groebner(self) -> tuple[Polynomial, ...]:
        if self._gb is None:
            self._gb = tuple(buchberger(self.ring, self.generators))
        return self._gb

    def reduced(self) -> "Ideal":
        return Ideal.from_basis(self.ring, list(self.groebner()))

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatchError(f"{f.ring} vs {self.ring}")
        return Polynomial._raw(self.ring, _normal_form(f.terms, self.groebner(), self.ring))

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.groebner())

    # ---- comparisons -------------------------------------------------------
    def __contains__(self, f: Polynomial) -> bool:
        return not self.normal_form(f)

    def __le__(self, other: "Ideal") -> bool:
        _same(self, other)
        if other.is_unit():
            return True
        return all(g in other for g in self.generators)

    def __ge__(self, other: "Ideal") -> bool:
        return other <= self

    def __lt__(self, other: "Ideal") -> bool:
        return self <= other and not other <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.groebner() == other.groebner()

    def __hash__(self):
        return hash((self.ring, self.groebner()))

    # ---- operations --------------------------------------------------------
    def __add__(self, other: "Ideal") -> "Ideal":
        _same(self, other)
        return Ideal(self.ring, self.generators + other.generators)

    def __mul__(self, other) -> "Ideal":
        if isinstance(other, Polynomial):
            return Ideal(self.ring, [g * other for g in self.generators])
        _same(self, other)
        return Ideal(self.ring, [a * b for a in self.generators for b in other.generators])

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Ideal":
        result = Ideal.unit(self.ring)
        base = self.reduced()
        for _ in range(n):
            result = (result * base).reduced()
        return result

    def intersect(self, other: "Ideal") -> "Ideal":
        _same(self, other)
        ring = self.ring
        if self.is_zero() or other.is_zero():
            return Ideal(ring)
        if self.is_unit():
            return other
        if other.is_unit():
            return self
        if self.is_monomial() and other.is_monomial():
            return Ideal(ring, [ring.monomial(monomial_lcm(a.leading_monomial(), b.leading_monomial()))
                                for a in self.groebner() for b in other.groebner()])
        # eliminate t from t*I + (1-t)*J
        big = Ring(ring.characteristic, ("_t" + "_".join(ring.variables),) + ring.variables, "elim")
        t = big.gen(0)
        lifted_i = [_lift(g, big) * t for g in self.groebner()]
        lifted_j = [_lift(g, big) * (big.one() - t) for g in other.groebner()]
        gb = buchberger(big, lifted_i + lifted_j)
        keep = [Polynomial(ring, {m[1:]: c for m, c in g.terms.items()}) for g in gb
                if all(m[0] == 0 for m in g.terms)]
        return Ideal(ring, keep)

    __and__ = intersect

    def colon(self, other: "Ideal") -> "Ideal":
        """Ideal quotient (self : other)."""
        _same(self, other)
        if other.is_zero():
            raise ValueError("colon by the zero ideal")
        result = None
        for g in other.groebner():
            part = self.colon_element(g)
            result = part if result is None else result.intersect(part)
        return result

    def colon_element(self, g: Polynomial) -> "Ideal":
        if g.is_unit():
            return self
        inter = self.intersect(Ideal(self.ring, [g]))
        return Ideal(self.ring, [divide_exact(h, g) for h in inter.groebner()])

    # ---- rendering ---------------------------------------------------------
    def render(self) -> list[str]:
        """Canonical generator strings from the reduced Groebner basis."""
        return [render_poly(g) for g in self.groebner()]

    def to_json(self) -> str:
        return json.dumps(self.render())

    def __repr__(self):
        return "Ideal(" + ", ".join(self.render()) + ")"

    __str__ = __repr__


def _same(a: Ideal, b: Ideal):
    if a.ring != b.ring:
        raise RingMismatchError(f"{a.ring} vs {b.ring}")


def _lift(g: Polynomial, big: Ring) -> Polynomial:
    return Polynomial._raw(big, {(0,) + m: c for m, c in g.terms.items()})


def divide_exact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Quotient f/g; raises ValueError when g does not divide f."""
    ring = f.ring
    p = ring.characteristic
    lm = g.leading_monomial()
    lc = g.leading_coefficient()
    inv = pow(lc, -1, p) if p else 1 / lc
    rem = f
    quot: dict = {}
    while rem:
        m = rem.leading_monomial()
        if not monomial_divides(lm, m):
            raise ValueError(f"{g} does not divide {f}")
        shift = tuple(x - y for x, y in zip(m, lm))
        c = rem.terms[m] * inv
        if p:
            c %= p
        quot[shift] = c
        rem = rem - g.mul_term(shift, c)
    return Polynomial._raw(ring, quot)


def ideal_from_json(ring: Ring, text: str) -> Ideal:
    return Ideal.parse(ring, json.loads(text))


# Functional aliases mirroring the operation names used throughout the docs.
def groebner_basis(I: Ideal) -> Ideal:
    return I.reduced()


def ideal_membership(f: Polynomial, I: Ideal) -> bool:
    return f in I


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    _same(I, J)
    return I == J


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    return I + J


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    return I * J


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    return I.intersect(J)


def ideal_colon(I: Ideal, J: Ideal) -> Ideal:
    return I.colon(J)
