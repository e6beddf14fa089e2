"""Exact sparse multivariate polynomials over F_p and Q.

Polynomials are immutable maps from exponent tuples to nonzero coefficients.
Over F_p a coefficient is a Python int in ``range(p)``; over Q it is a
:class:`fractions.Fraction`.  Exponents are Python ints, so they never
overflow.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import BadPrimeError, CharacteristicError, ParseError, RingMismatchError

Monomial = tuple[int, ...]
Coefficient = Union[int, Fraction]

ORDERS = ("grevlex", "lex")


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24)."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if is_prime(q)]


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"``; decimals are rejected to keep exactness."""
    m = re.fullmatch(r"\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?", str(text))
    if not m:
        raise ParseError(f"expected an exact rational 'a/b', got {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError("zero denominator")
    return Fraction(int(m.group(1)), den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# Sort keys: a larger key means a larger monomial.
def _grevlex_key(m: Monomial):
    return (sum(m), tuple(-x for x in reversed(m)))


def _lex_key(m: Monomial):
    return m


def _elim_key(m: Monomial):
    # block order used internally for elimination: first variable, then grevlex
    return (m[0], _grevlex_key(m[1:]))


_KEYS = {"grevlex": _grevlex_key, "lex": _lex_key, "elim": _elim_key}


@dataclass(frozen=True)
class Ring:
    """Polynomial ring descriptor: characteristic, variable names, monomial order."""

    characteristic: int
    variables: tuple[str, ...]
    order: str = "grevlex"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        p = self.characteristic
        if p != 0 and not is_prime(p):
            raise ValueError(f"characteristic must be 0 or prime, got {p}")
        if not self.variables or any(not v for v in self.variables):
            raise ValueError("variable names must be nonempty")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                raise ValueError(f"invalid variable name {v!r}")
        if self.order not in _KEYS:
            raise ValueError(f"unknown monomial order {self.order!r}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def sort_key(self):
        return _KEYS[self.order]

    def coerce(self, c) -> Coefficient:
        p = self.characteristic
        if p:
            if isinstance(c, Fraction):
                if c.denominator % p == 0:
                    raise BadPrimeError(f"{c} is not defined in characteristic {p}")
                return c.numerator * pow(c.denominator, -1, p) % p
            return int(c) % p
        return Fraction(c)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: c})

    def gen(self, name: str | int) -> "Polynomial":
        i = name if isinstance(name, int) else self.variables.index(name)
        return self.monomial(tuple(int(j == i) for j in range(self.nvars)))

    def gens(self) -> list["Polynomial"]:
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, exps: Iterable[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): coeff})

    def with_characteristic(self, p: int) -> "Ring":
        return Ring(p, self.variables, self.order)

    def with_order(self, order: str) -> "Ring":
        return Ring(self.characteristic, self.variables, order)

    def __call__(self, text: str) -> "Polynomial":
        return parse_poly(text, self)


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(max, a, b))


class Polynomial:
    """Immutable sparse polynomial; use the arithmetic operators."""

    __slots__ = ("ring", "terms", "_lm")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Coefficient] | None = None):
        self.ring = ring
        n = ring.nvars
        clean: dict[Monomial, Coefficient] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(x) for x in m)
            if len(m) != n or any(x < 0 for x in m):
                raise ValueError(f"bad exponent vector {m} for ring with {n} variables")
            c = ring.coerce(c)
            if c:
                clean[m] = clean.get(m, 0) + c
        p = ring.characteristic
        if p:
            clean = {m: c % p for m, c in clean.items() if c % p}
        else:
            clean = {m: c for m, c in clean.items() if c}
        self.terms = clean
        self._lm = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Polynomial":
        # Trusted constructor: terms already reduced, nonzero, correct arity.
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._lm = None
        return obj

    # ---- inspection ---------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def is_unit(self) -> bool:
        return bool(self.terms) and self.is_constant()

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __len__(self) -> int:
        return len(self.terms)

    def leading_monomial(self) -> Monomial:
        if self._lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            self._lm = max(self.terms, key=self.ring.sort_key)
        return self._lm

    def leading_coefficient(self) -> Coefficient:
        return self.terms[self.leading_monomial()]

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Monomial, Coefficient]]:
        key = self.ring.sort_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def monic(self) -> "Polynomial":
        lc = self.leading_coefficient()
        p = self.ring.characteristic
        if p:
            inv = pow(lc, -1, p)
            return Polynomial._raw(self.ring, {m: c * inv % p for m, c in self.terms.items()})
        return Polynomial._raw(self.ring, {m: c / lc for m, c in self.terms.items()})

    # ---- arithmetic ---------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        p = self.ring.characteristic
        res = dict(self.terms)
        for m, c in other.terms.items():
            v = res.get(m, 0) + c
            if p:
                v %= p
            if v:
                res[m] = v
            else:
                res.pop(m, None)
        return Polynomial._raw(self.ring, res)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.characteristic
        if p:
            return Polynomial._raw(self.ring, {m: p - c for m, c in self.terms.items()})
        return Polynomial._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other.terms) == 1:
            (m, c), = other.terms.items()
            return self.mul_term(m, c)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            return other.mul_term(m, c)
        add = operator.add
        res: dict = {}
        get = res.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(map(add, m1, m2))
                res[m] = get(m, 0) + c1 * c2
        p = self.ring.characteristic
        if p:
            res = {m: c % p for m, c in res.items() if c % p}
        else:
            res = {m: c for m, c in res.items() if c}
        return Polynomial._raw(self.ring, res)

    __rmul__ = __mul__

    def mul_term(self, mono: Monomial, coeff) -> "Polynomial":
        p = self.ring.characteristic
        coeff = self.ring.coerce(coeff)
        if not coeff:
            return self.ring.zero()
        add = operator.add
        if p:
            return Polynomial._raw(
                self.ring, {tuple(map(add, m, mono)): c * coeff % p for m, c in self.terms.items()}
            )
        return Polynomial._raw(self.ring, {tuple(map(add, m, mono)): c * coeff for m, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        p = self.ring.characteristic
        if p and n >= p:
            # f^n = prod_i (f^(p^i))^(d_i) over the base-p digits of n
            result = self.ring.one()
            e = 0
            while n:
                n, d = divmod(n, p)
                if d:
                    result = result * (pth_power(self, e) ** d)
                e += 1
            return result
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Polynomial({render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)


# ---- rendering and parsing -------------------------------------------------

def _render_monomial(m: Monomial, names) -> str:
    parts = []
    for v, e in zip(names, m):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def render_poly(f: Polynomial) -> str:
    """Canonical text: terms in descending monomial order, coefficient first."""
    if not f.terms:
        return "0"
    out = []
    for m, c in f.sorted_terms():
        mono = _render_monomial(m, f.ring.variables)
        neg = isinstance(c, Fraction) and c < 0
        mag = -c if neg else c
        cs = format_rational(Fraction(mag))
        if not mono:
            body = cs
        elif mag == 1:
            body = mono
        else:
            body = f"{cs}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("id", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])
        return t

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty polynomial", 0)
        f = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return f

    def expr(self) -> Polynomial:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        f = self.term()
        if sign < 0:
            f = -f
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                g = self.term()
                f = f + g if t[1] == "+" else f - g
            else:
                return f

    def _starts_factor(self, t) -> bool:
        return t[0] in ("num", "id") or (t[0] == "op" and t[1] == "(")

    def term(self) -> Polynomial:
        f = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                f = f * self.factor()
            elif self._starts_factor(t):
                f = f * self.factor()
            else:
                return f

    def factor(self) -> Polynomial:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a non-negative integer", e[2])
            base = base ** e[1]
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                d = self.take()
                if d[0] != "num" or d[1] == 0:
                    raise ParseError("expected a nonzero integer denominator", d[2])
                q = Fraction(val, d[1])
                try:
                    return self.ring.constant(q)
                except BadPrimeError as exc:
                    raise ParseError(str(exc), pos) from None
            return self.ring.constant(val)
        if kind == "id":
            return self.identifier(val, pos)
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect_op(")")
            return f
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)

    def identifier(self, name: str, pos: int) -> Polynomial:
        names = self.ring.variables
        if name in names:
            return self.ring.gen(name)
        # juxtaposed variables, e.g. "xy"; longest match first
        out = self.ring.one()
        rest = name
        offset = pos
        by_len = sorted(names, key=len, reverse=True)
        while rest:
            for v in by_len:
                if rest.startswith(v):
                    out = out * self.ring.gen(v)
                    rest = rest[len(v):]
                    offset += len(v)
                    break
            else:
                raise ParseError(f"unknown variable {name!r}", pos)
        return out


def parse_poly(text: str, ring: Ring) -> Polynomial:
    """Parse text such as ``"x^2 + 1/2*y^3 - 3xy"`` into a polynomial of ``ring``."""
    return _Parser(text, ring).parse()


# ---- Frobenius and reduction ----------------------------------------------

def pth_power(f: Polynomial, e: int) -> Polynomial:
    """Return f^(p^e), computed termwise (additive Frobenius)."""
    p = f.ring.characteristic
    if not p:
        raise CharacteristicError("pth_power needs positive characteristic")
    if e < 0:
        raise ValueError("e must be non-negative")
    if e == 0:
        return f
    q = p ** e
    return Polynomial._raw(
        f.ring, {tuple(q * x for x in m): pow(c, q, p) for m, c in f.terms.items()}
    )


def reduce_coeffs_mod_p(f: Polynomial, p: int, ring: Ring | None = None) -> Polynomial:
    """Reduce a polynomial over Q coefficientwise into F_p.

    Raises BadPrimeError when p divides a coefficient denominator.  Terms whose
    numerator vanishes mod p disappear; see :func:`vanishing_terms`.
    """
    if f.ring.characteristic != 0:
        raise CharacteristicError("reduce_coeffs_mod_p expects a polynomial over Q")
    target = ring or f.ring.with_characteristic(p)
    terms = {}
    for m, c in f.terms.items():
        if c.denominator % p == 0:
            raise BadPrimeError(f"p={p} divides the denominator of coefficient {c}")
        v = c.numerator * pow(c.denominator, -1, p) % p
        if v:
            terms[m] = v
    return Polynomial._raw(target, terms)


def vanishing_terms(f: Polynomial, p: int) -> list[Monomial]:
    """Monomials of a rational polynomial whose coefficient vanishes mod p."""
    return sorted(m for m, c in f.terms.items() if c.numerator % p == 0)


def truncated_power(f: Polynomial, n: int, bound: int) -> Polynomial:
    """f^n modulo the monomial ideal (x_1^bound, ..., x_k^bound).

    Terms with an exponent >= bound are dropped as soon as they appear, which
    is exact because multiplication never lowers exponents.
    """
    ring = f.ring

    def trunc(g: Polynomial) -> Polynomial:
        return Polynomial._raw(ring, {m: c for m, c in g.terms.items() if max(m, default=0) < bound})

    p = ring.characteristic
    result = ring.one() if bound > 0 else ring.zero()
    if p:
        e = 0
        while n and result:
            n, d = divmod(n, p)
            if d:
                base = trunc(pth_power(f, e))
                for _ in range(d):
                    result = trunc(result * base)
                    if not result:
                        break
            e += 1
        return result
    base = trunc(f)
    while n and result:
        if n & 1:
            result = trunc(result * base)
        n >>= 1
        if n:
            base = trunc(base * base)
    return result
