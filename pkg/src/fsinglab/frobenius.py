"""Frobenius powers, Frobenius roots and the twisted trace step.

On k[x_1..x_n] with k = F_p the monomials x^mu with 0 <= mu_i < q form a free
basis of R over R^q.  Writing h = sum_mu c_mu^q x^mu, the Frobenius root
(h)^[1/q] is generated by the c_mu; since every element of F_p is its own
p-th power, c_mu is read off directly from the exponent digits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import CharacteristicError
from .ideals import Ideal
from .polyring import Polynomial, pth_power


def _require_char_p(ring) -> int:
    p = ring.characteristic
    if not p:
        raise CharacteristicError("Frobenius operations need positive characteristic")
    return p


def _log_p(q: int, p: int) -> int:
    e = 0
    while q % p == 0 and q > 1:
        q //= p
        e += 1
    if q != 1:
        raise ValueError(f"{q} is not a power of {p}")
    return e


def bracket_power(I: Ideal, q: int) -> Ideal:
    """I^[q] = (g^q : g a generator of I) for q a power of p."""
    p = _require_char_p(I.ring)
    e = _log_p(q, p)
    return Ideal(I.ring, [pth_power(g, e) for g in I.generators])


def root_generators(h: Polynomial, q: int) -> list[Polynomial]:
    """Coefficients c_mu of h over the monomial basis of R over R^q."""
    ring = h.ring
    parts: dict = {}
    for m, c in h.terms.items():
        mu = tuple(x % q for x in m)
        base = tuple(x // q for x in m)
        parts.setdefault(mu, {})[base] = c
    return [Polynomial._raw(ring, t) for _, t in sorted(parts.items())]


def frobenius_root(I: Ideal, e: int) -> Ideal:
    """I^[1/p^e]: the smallest ideal J with I contained in J^[p^e]."""
    p = _require_char_p(I.ring)
    if e < 0:
        raise ValueError("e must be non-negative")
    if e == 0:
        return I
    q = p ** e
    gens: list[Polynomial] = []
    for g in I.generators:
        gens.extend(root_generators(g, q))
    return Ideal(I.ring, gens).reduced()


@dataclass(frozen=True)
class TwistData:
    """A product prod f_i^{N_i} kept factored, and the root depth e (in p-steps)."""

    factors: tuple[tuple[Polynomial, int], ...]
    level: int

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((f, int(n)) for f, n in self.factors))
        if self.level < 1:
            raise ValueError("level must be >= 1")
        for f, n in self.factors:
            if n < 0:
                raise ValueError("twist exponents must be non-negative")
            if not f:
                raise ValueError("twist factors must be nonzero")

    def expand(self, ring) -> Polynomial:
        out = ring.one()
        for f, n in self.factors:
            out = out * f ** n
        return out


def twisted_root(twist: TwistData, J: Ideal) -> Ideal:
    """(prod f_i^{N_i} * J)^[1/p^e] by base-p digit peeling.

    Uses (f^{pM + r} h)^[1/p] = f^M (f^r h)^[1/p], so only powers f^r with
    r < p are ever multiplied out; whatever survives above p^e is multiplied
    back at the end.
    """
    ring = J.ring
    p = _require_char_p(ring)
    if J.is_zero():
        return J
    exps = [n for _, n in twist.factors]
    bases = [f for f, _ in twist.factors]
    cache: list[dict[int, Polynomial]] = [{} for _ in bases]

    def power(i: int, d: int) -> Polynomial:
        got = cache[i].get(d)
        if got is None:
            got = cache[i][d] = bases[i] ** d
        return got

    gens = list(J.reduced().generators)
    for _ in range(twist.level):
        digits = [n % p for n in exps]
        exps = [n // p for n in exps]
        mult = ring.one()
        for i, d in enumerate(digits):
            if d:
                mult = mult * power(i, d)
        pieces: list[Polynomial] = []
        for g in gens:
            pieces.extend(root_generators(g * mult, p))
        gens = list(Ideal(ring, pieces).groebner())
    tail = ring.one()
    for f, n in zip(bases, exps):
        if n:
            tail = tail * f ** n
    return Ideal(ring, [g * tail for g in gens]).reduced()


def twisted_root_naive(twist: TwistData, J: Ideal) -> Ideal:
    """Reference route: expand the product, then take the full p^e-th root."""
    prod = twist.expand(J.ring)
    return frobenius_root(Ideal(J.ring, [prod * g for g in J.generators]), twist.level)


def root_of_product(factors: Sequence[tuple[Polynomial, int]], J: Ideal, e: int) -> Ideal:
    if not factors:
        return frobenius_root(J, e)
    return twisted_root(TwistData(tuple(factors), e), J)


def power_twisted_root(factors: Sequence[tuple[Polynomial, int]], a: Ideal, N: int,
                       J: Ideal, e: int) -> Ideal:
    """(prod f_i^{N_i} * a^N * J)^[1/p^e] without expanding a^N.

    With a = (h_1..h_k) and alpha = p*beta + rho (0 <= rho_j < p),
    (a^N K)^[1/p] = sum over rho with |rho| = N mod p of a^{(N-|rho|)/p} (h^rho K)^[1/p],
    so each level only needs products h^rho with rho_j < p.  Terms are grouped by
    the remaining exponent of a.
    """
    ring = J.ring
    p = _require_char_p(ring)
    if J.is_zero():
        return J
    hs = list(a.reduced().generators)
    k = len(hs)
    exps = [n for _, n in factors]
    bases = [f for f, _ in factors]
    rhos = [r for r in itertools.product(range(p), repeat=k)]
    hcache: dict = {}

    def h_power(rho):
        got = hcache.get(rho)
        if got is None:
            got = ring.one()
            for h, r in zip(hs, rho):
                if r:
                    got = got * h ** r
            hcache[rho] = got
        return got

    state = {N: list(J.reduced().generators)}
    for _ in range(e):
        digits = [n % p for n in exps]
        exps = [n // p for n in exps]
        mult = ring.one()
        for f, d in zip(bases, digits):
            if d:
                mult = mult * f ** d
        nxt: dict[int, list[Polynomial]] = {}
        for M, gens in state.items():
            for rho in rhos:
                s = sum(rho)
                if s > M or (M - s) % p:
                    continue
                hm = h_power(rho) * mult
                bucket = nxt.setdefault((M - s) // p, [])
                for g in gens:
                    bucket.extend(root_generators(g * hm, p))
        state = {M: list(Ideal(ring, gs).groebner()) for M, gs in nxt.items() if gs}
    tail = ring.one()
    for f, n in zip(bases, exps):
        if n:
            tail = tail * f ** n
    total = Ideal(ring)
    for M, gens in sorted(state.items()):
        piece = Ideal(ring, [g * tail for g in gens])
        if M:
            piece = piece * (a ** M)
        total = total + piece
    return total.reduced()
