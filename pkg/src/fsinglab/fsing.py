"""Non-F-pure ideals, test ideals, F-pure thresholds and property checkers.

Everything lives on R = F_p[x_1..x_n], where the trace map attached to a
boundary Delta = sum t_i div(g_i) at level e0 acts as

    phi_Delta^e0(F_* h) = (prod g_i^{t_i (p^e0 - 1)} * h)^[1/p^e0].

When lambda (p^e0 - 1) is an integer N, the e-th summand in the definition of
sigma is the e-fold composite of S(J) = (g^W f^N J)^[1/p^e0]; the summands
decrease with e, so the chain sigma_n is just the orbit of (1) under S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

from .errors import BadPrimeError, CharacteristicError, InvariantViolation
from .frobenius import power_twisted_root, root_of_product
from .ideals import Ideal
from .polyring import Polynomial, Ring, format_rational, truncated_power
from .reports import ClauseReport, show_ideal as _show

Coefficient = Union[Polynomial, Ideal]

MAX_CHAIN = 10_000


@dataclass(frozen=True)
class PairData:
    """A triple (R, Delta, a^lambda) with R a polynomial ring over F_p."""

    ring: Ring
    coefficient: Coefficient
    lam: Fraction
    boundary: tuple[tuple[Polynomial, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(
            self, "boundary", tuple((g, Fraction(t)) for g, t in self.boundary)
        )
        if not self.ring.characteristic:
            raise CharacteristicError("pairs live in positive characteristic")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        c = self.coefficient
        if isinstance(c, Polynomial):
            if not c:
                raise ValueError("principal coefficient must be nonzero")
        elif c.is_zero():
            raise ValueError("coefficient ideal must be nonzero")
        for g, t in self.boundary:
            if t < 0:
                raise ValueError("boundary coefficients must be >= 0")
            if not g or g.is_unit():
                raise ValueError("boundary divisors need nonzero nonunit equations")

    @property
    def p(self) -> int:
        return self.ring.characteristic

    @property
    def principal(self) -> bool:
        return isinstance(self.coefficient, Polynomial)

    def coefficient_ideal(self) -> Ideal:
        c = self.coefficient
        return Ideal(self.ring, [c]) if isinstance(c, Polynomial) else c

    def at(self, lam) -> "PairData":
        return replace(self, lam=Fraction(lam))


@dataclass(frozen=True)
class CertifiedIdeal:
    value: Ideal
    certificate: str  # "exact", "eps-perturbed" or "truncated"
    lambda_used: Fraction | None = None
    e_max: int | None = None

    def to_dict(self) -> dict:
        out = {"ideal": self.value.render(), "certificate": self.certificate}
        if self.lambda_used is not None:
            out["lambda_used"] = format_rational(self.lambda_used)
        if self.e_max is not None:
            out["e_max"] = self.e_max
        return out


def multiplicative_order(p: int, d: int) -> int:
    if d == 1:
        return 1
    if math.gcd(p, d) != 1:
        raise BadPrimeError(f"p={p} divides {d}")
    e, x = 1, p % d
    while x != 1:
        x = x * p % d
        e += 1
    return e


def _boundary_denominator(pair: PairData) -> int:
    d = 1
    for _, t in pair.boundary:
        d = math.lcm(d, t.denominator)
    return d


def canonical_level(pair: PairData, include_lambda: bool = True) -> int:
    """Smallest e0 with (p^e0 - 1) t_i (and lambda) integral."""
    p = pair.p
    d = _boundary_denominator(pair)
    if d % p == 0:
        raise BadPrimeError(f"p={p} divides a boundary denominator; index not prime to p")
    if include_lambda:
        if pair.lam.denominator % p == 0:
            raise BadPrimeError(f"p={p} divides the denominator of lambda={pair.lam}")
        d = math.lcm(d, pair.lam.denominator)
    return multiplicative_order(p, d)


def _check_boundary(pair: PairData):
    if _boundary_denominator(pair) % pair.p == 0:
        raise BadPrimeError(f"p={pair.p} divides a boundary denominator; refusing")


def _twist_factors(pair: PairData, q: int, lam_exponent: int | None):
    factors = [(g, int(t * (q - 1))) for g, t in pair.boundary if t]
    if lam_exponent and pair.principal:
        factors.append((pair.coefficient, lam_exponent))
    return factors


def _step(pair: PairData, level: int, exponent: int) -> Callable[[Ideal], Ideal]:
    """J -> (g^W a^N J)^[1/p^level]."""
    q = pair.p ** level
    factors = _twist_factors(pair, q, exponent)
    if not pair.principal and exponent:
        a = pair.coefficient

        def apply(J: Ideal) -> Ideal:
            return power_twisted_root(factors, a, exponent, J, level)
    else:
        def apply(J: Ideal) -> Ideal:
            return root_of_product(factors, J, level)

    return apply


# ---------------------------------------------------------------------------
# sigma
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _sigma_exact(pair: PairData, multiple: int = 1) -> Ideal:
    e0 = canonical_level(pair) * multiple
    q = pair.p ** e0
    N = pair.lam * (q - 1)
    assert N.denominator == 1
    S = _step(pair, e0, int(N))
    J = Ideal.unit(pair.ring)
    for _ in range(MAX_CHAIN):
        nxt = S(J)
        if not nxt <= J:
            raise InvariantViolation(f"sigma chain not descending for {pair}")
        if nxt == J:
            return J
        J = nxt
    raise InvariantViolation("sigma chain did not stabilize")


def right_perturbations(lam: Fraction, p: int, k: int) -> Fraction:
    """(floor(lam (p^k-1)) + 1)/(p^k - 1): above lam, within 1/(p^k-1), denominator prime to p."""
    m = p ** k - 1
    return Fraction(math.floor(lam * m) + 1, m)


def left_perturbations(lam: Fraction, p: int, k: int) -> Fraction:
    m = p ** k - 1
    return Fraction(math.ceil(lam * m) - 1, m)


def sigma(pair: PairData, k_max: int = 8, level_multiple: int = 1) -> CertifiedIdeal:
    """The non-F-pure ideal sigma(R, Delta, a^lambda)."""
    _check_boundary(pair)
    p = pair.p
    if pair.lam.denominator % p:
        return CertifiedIdeal(_sigma_exact(pair, level_multiple), "exact")
    if not pair.principal:
        return sigma_truncated(pair)
    # sigma(f^lam) = sigma(f^{lam+eps}) when p divides the denominator.  Two equal
    # consecutive values can still both sit above the next jump; with Delta = 0 the
    # limit is also tau(f^lam) (right continuity), which guards the stopping rule.
    target = tau(pair) if not pair.boundary else None
    prev = None
    k = 0
    while True:
        k += 1
        lam_k = right_perturbations(pair.lam, p, k)
        val = _sigma_exact(pair.at(lam_k))
        settled = prev is not None and val == prev
        if settled and (target is None or val == target):
            return CertifiedIdeal(val, "eps-perturbed", lambda_used=lam_k)
        if k >= k_max and (target is None or k >= 4 * k_max):
            if target is not None:
                raise InvariantViolation(
                    f"right perturbations of {format_rational(pair.lam)} never reached tau")
            return CertifiedIdeal(val, "eps-perturbed", lambda_used=lam_k)
        prev = val


@lru_cache(maxsize=1024)
def sigma_truncated(pair: PairData, e_max: int = 3) -> CertifiedIdeal:
    """Evaluate the defining sums over e directly, truncated at e <= e_max.

    No telescoping is assumed, so this works for any lambda; each summand
    uses exponent ceil(lambda (p^{e e0} - 1)).
    """
    _check_boundary(pair)
    e0 = canonical_level(pair, include_lambda=False)
    p = pair.p
    steps = []
    for e in range(1, e_max + 1):
        level = e * e0
        N = math.ceil(pair.lam * (p ** level - 1))
        steps.append(_step(pair, level, N))

    def T(J: Ideal) -> Ideal:
        total = Ideal(pair.ring)
        for s in steps:
            total = total + s(J)
        return total.reduced()

    J = Ideal.unit(pair.ring)
    for _ in range(MAX_CHAIN):
        nxt = T(J)
        if not nxt <= J:
            raise InvariantViolation("truncated sigma chain not descending")
        if nxt == J:
            return CertifiedIdeal(J, "truncated", e_max=e_max)
        J = nxt
    raise InvariantViolation("truncated sigma chain did not stabilize")


# ---------------------------------------------------------------------------
# tau
# ---------------------------------------------------------------------------

def tau_seed(pair: PairData) -> Polynomial:
    seed = pair.coefficient ** (math.ceil(pair.lam) + 1)
    for g, t in pair.boundary:
        seed = seed * g ** (math.ceil(t) + 1)
    return seed


@lru_cache(maxsize=4096)
def _tau_exact(pair: PairData) -> Ideal:
    e0 = canonical_level(pair)
    q = pair.p ** e0
    N = pair.lam * (q - 1)
    S = _step(pair, e0, math.ceil(N))
    seed = tau_seed(pair)
    J = Ideal(pair.ring, [seed]).reduced()
    for _ in range(MAX_CHAIN):
        nxt = (J + S(J)).reduced()
        if nxt == J:
            break
        J = nxt
    else:
        raise InvariantViolation("tau chain did not stabilize")
    if not S(J) <= J:
        raise InvariantViolation("tau is not fixed by the trace step")
    return J


def _p_split(lam: Fraction, p: int) -> tuple[int, Fraction]:
    """lam = X / p^r with the denominator of X prime to p."""
    r = 0
    den = lam.denominator
    while den % p == 0:
        den //= p
        r += 1
    return r, lam * p ** r


def tau(pair: PairData, k_max: int = 8) -> Ideal:
    """The test ideal tau(R, Delta, f^lambda) for principal f."""
    if not pair.principal:
        raise ValueError("tau is implemented for principal coefficients only")
    _check_boundary(pair)
    if tau_seed(pair).is_zero():
        raise ValueError("test-element seed is zero")
    p = pair.p
    if pair.lam.denominator % p:
        return _tau_exact(pair)
    if not pair.boundary:
        # tau(f^{(n+t)/p^r}) = (f^n tau(f^t))^[1/p^r]
        r, x = _p_split(pair.lam, p)
        n = math.floor(x)
        inner = _tau_exact(pair.at(x - n))
        return root_of_product([(pair.coefficient, n)], inner, r)
    # right continuity of tau
    prev = None
    for k in range(1, k_max + 1):
        val = _tau_exact(pair.at(right_perturbations(pair.lam, p, k)))
        if prev is not None and val == prev:
            return val
        prev = val
    return prev


def tau_left_limit(pair: PairData) -> Ideal:
    """tau(f^{lambda - eps}) for Delta = 0, lambda > 0, exactly.

    Writing lambda p^r = n + mu with 0 < mu <= 1 and mu prime to p,
    tau(f^{lambda-eps}) = (f^n tau(f^{mu-eps}))^[1/p^r] and
    tau(f^{mu-eps}) = sigma(f^mu).
    """
    if pair.boundary or not pair.principal:
        raise ValueError("left limits are implemented for principal f with Delta = 0")
    if pair.lam <= 0:
        raise ValueError("left limit needs lambda > 0")
    p = pair.p
    r, x = _p_split(pair.lam, p)
    if r == 0:
        return _sigma_exact(pair)
    n = math.ceil(x) - 1
    inner = _sigma_exact(pair.at(x - n))
    return root_of_product([(pair.coefficient, n)], inner, r)


# ---------------------------------------------------------------------------
# nu values and F-pure thresholds
# ---------------------------------------------------------------------------

def nu_value(f: Polynomial, e: int) -> int:
    """max{a : f^a not in m^[p^e]} by binary search on membership."""
    ring = f.ring
    p = ring.characteristic
    if not p:
        raise CharacteristicError("nu needs positive characteristic")
    if f.is_zero() or any(not any(m) for m in f.terms):
        raise ValueError("f must lie in the homogeneous maximal ideal")
    q = p ** e
    bracket = Ideal(ring, [ring.monomial(tuple(q * int(i == j) for j in range(ring.nvars)))
                           for i in range(ring.nvars)])

    def outside(a: int) -> bool:
        # truncated_power is the normal form of f^a modulo m^[q]
        return not (truncated_power(f, a, q) in bracket)

    lo, hi = 0, ring.nvars * (q - 1) + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if outside(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class FptBounds:
    lower: Fraction
    upper: Fraction
    exact: bool
    nus: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "exact": self.exact,
            "nu": list(self.nus),
        }


def certify_fpt(f: Polynomial, c: Fraction) -> bool:
    """True iff fpt(f) == c, checked by tau(f^c) != R and tau(f^{c-eps}) == R."""
    pair = PairData(f.ring, f, c)
    if tau(pair).is_unit():
        return False
    return tau_left_limit(pair).is_unit()


def _candidates(lower: Fraction, upper: Fraction, limit: int):
    d = 1
    found = 0
    while found < limit:
        lo = math.floor(lower * d) + 1
        hi = math.floor(upper * d)
        for num in range(lo, hi + 1):
            c = Fraction(num, d)
            if c.denominator == d:
                yield c
                found += 1
        d += 1


def fpt_bounds(f: Polynomial, e_max: int, certify: bool = True, max_candidates: int = 6) -> FptBounds:
    """nu(p^e)/p^e < fpt <= (nu(p^e)+1)/p^e, tightened over e <= e_max.

    With ``certify`` the simplest rationals in the bracket are tested exactly
    against the test-ideal jump; a hit collapses the bracket to a point.
    """
    p = f.ring.characteristic
    nus = tuple(nu_value(f, e) for e in range(1, e_max + 1))
    lower = max(Fraction(n, p ** e) for e, n in enumerate(nus, 1))
    upper = min(Fraction(n + 1, p ** e) for e, n in enumerate(nus, 1))
    for e, n in enumerate(nus, 1):
        if not Fraction(n, p ** e) < upper:
            raise InvariantViolation("nu/p^e must stay below the fpt upper bound")
    if certify:
        for c in _candidates(lower, upper, max_candidates):
            if certify_fpt(f, c):
                return FptBounds(c, c, True, nus)
    return FptBounds(lower, upper, False, nus)


# ---------------------------------------------------------------------------
# jump scans and property checkers
# ---------------------------------------------------------------------------

def sigma_jumps(template: PairData, lam_max, grid_denominator: int) -> list[tuple[Fraction, Ideal]]:
    """Change points of lambda -> sigma on the grid k/grid_denominator <= lam_max.

    Returns (start, value) segments; the first starts at 0.  Grid points
    whose denominator is divisible by p go through the perturbed branch of
    :func:`sigma`, which needs a principal coefficient.
    """
    if grid_denominator % template.p == 0 and not template.principal:
        raise ValueError("grid denominator must be prime to p for non-principal coefficients")
    lam_max = Fraction(lam_max)
    out: list[tuple[Fraction, Ideal]] = []
    k = 0
    while Fraction(k, grid_denominator) <= lam_max:
        lam = Fraction(k, grid_denominator)
        val = sigma(template.at(lam)).value
        if not out:
            out.append((lam, val))
        elif val != out[-1][1]:
            if not val <= out[-1][1]:
                raise InvariantViolation(f"sigma increased at {lam}")
            out.append((lam, val))
        k += 1
    return out


def default_grid_denominator(p: int, bound: int = 12) -> int:
    return max(d for d in range(1, bound + 1) if d % p)


def one_sided(func: Callable[[Fraction], Ideal], lam: Fraction, p: int, side: str,
              k_max: int = 4) -> tuple[Ideal, bool]:
    """Stable value of func just left/right of lam along p-prime grid refinements."""
    pick = left_perturbations if side == "left" else right_perturbations
    prev = None
    for k in range(1, k_max + 1):
        pt = pick(lam, p, k)
        if pt < 0:
            continue
        val = func(pt)
        if prev is not None and val == prev:
            return val, True
        prev = val
    return prev, False


def verify_sigma_properties(pair: PairData, grid_denominator: int | None = None, lam_max=None,
                  e_max: int = 3) -> list[ClauseReport]:
    """Check the four structural properties of sigma at the given pair."""
    if not pair.principal:
        raise ValueError("the property checker needs a principal coefficient")
    p = pair.p
    lam = pair.lam
    f = pair.coefficient
    hyp = "holds: smooth ambient, empty boundary" if not pair.boundary else "unchecked hypothesis"
    den = grid_denominator or default_grid_denominator(p)
    lam_max = Fraction(lam_max) if lam_max is not None else max(lam, Fraction(1)) + 1
    reports: list[ClauseReport] = []

    def sig(x):
        return sigma(pair.at(x)).value

    def ta(x):
        return tau(pair.at(x))

    # discrete and non-increasing
    try:
        segs = sigma_jumps(pair, lam_max, den)
        reports.append(ClauseReport(
            "monotone", "none required",
            "; ".join(f"{format_rational(a)}: {_show(v)}" for a, v in segs),
            f"non-increasing on grid 1/{den} up to {format_rational(lam_max)}", "pass"))
    except InvariantViolation as exc:
        reports.append(ClauseReport("monotone", "none required", str(exc), "non-increasing", "fail"))

    # sigma versus one-sided test ideals
    if lam <= 0:
        reports.append(ClauseReport("sigma-vs-tau", hyp, "-", "-", "out of clause range", "needs lambda > 0"))
    elif lam.denominator % p:
        if pair.boundary:
            left, stable = one_sided(ta, lam, p, "left")
        else:
            left, stable = tau_left_limit(pair), True
        s = sig(lam)
        reports.append(ClauseReport(
            "sigma-vs-tau", hyp, _show(s), _show(left), "pass" if s == left else "fail",
            "sigma(f^lam) vs tau(f^(lam-eps))" + ("" if stable else "; refinement not stabilized")))
    else:
        # test ideals are right continuous, so tau(f^(lam+eps)) = tau(f^lam)
        right, stable = ta(lam), True
        s = sig(lam)
        reports.append(ClauseReport(
            "sigma-vs-tau", hyp, _show(s), _show(right), "pass" if s == right else "fail",
            "sigma(f^lam) vs tau(f^(lam+eps))" + ("" if stable else "; refinement not stabilized")))

    # right constancy when p divides the denominator
    if lam > 0 and lam.denominator % p == 0:
        direct = sigma_truncated(pair, e_max).value
        right, stable = sig(lam), True
        reports.append(ClauseReport(
            "right-constancy", hyp, _show(direct), _show(right), "pass" if direct == right else "fail",
            f"direct sums truncated at e <= {e_max} vs sigma(f^(lam+eps))"
            + ("" if stable else "; refinement not stabilized")))
    else:
        reports.append(ClauseReport("right-constancy", hyp, "-", "-", "out of clause range",
                                    "needs p | denominator of lambda"))

    # Skoda-type containment, equality for lambda > 1
    if lam >= 1:
        lhs = Ideal(pair.ring, [f]) * sig(lam - 1)
        rhs = sig(lam)
        weak = sig(Fraction(1))
        contained = lhs <= rhs
        ok = contained and (lhs == rhs if lam > 1 else True)
        reports.append(ClauseReport(
            "skoda", hyp, _show(lhs.reduced()), _show(rhs), "pass" if ok else "fail",
            "right side read at exponent lambda (" + ("equality" if lam > 1 else "containment")
            + f"); exponent-1 reading contained: {lhs <= weak}"))
    else:
        reports.append(ClauseReport("skoda", hyp, "-", "-", "out of clause range", "needs lambda >= 1"))
    return reports


def verify_power_containment(a: Ideal, g: Polynomial, m: int, lam, boundary: Sequence = ()) -> ClauseReport:
    """Check sigma(g^{lambda/m}) inside sigma(a^lambda) for g in a^m."""
    lam = Fraction(lam)
    if g not in a ** m:
        raise ValueError("g is not in a^m")
    ring = a.ring
    small = sigma(PairData(ring, g, lam / m, tuple(boundary))).value
    big = sigma(PairData(ring, a, lam, tuple(boundary))).value
    ok = small <= big
    return ClauseReport("containment", "g in a^m verified", _show(small), _show(big),
                        "pass" if ok else "fail",
                        f"sigma(g^({format_rational(lam / m)})) inside sigma(a^{format_rational(lam)})")
