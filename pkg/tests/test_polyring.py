from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fsinglab.errors import BadPrimeError, ParseError
from fsinglab.polyring import (
    Ring, is_prime, parse_rational, primes_up_to, pth_power, reduce_coeffs_mod_p,
    truncated_power, vanishing_terms,
)


def test_primes_oracle():
    naive = [n for n in range(2, 400) if all(n % d for d in range(2, n))]
    assert primes_up_to(399) == naive
    assert is_prime(2 ** 61 - 1) and not is_prime(2 ** 61 + 1)


@pytest.mark.parametrize("text,val", [("5/6", Fraction(5, 6)), ("2", Fraction(2)), ("-3/9", Fraction(-1, 3))])
def test_parse_rational(text, val):
    assert parse_rational(text) == val


@pytest.mark.parametrize("bad", ["0.5", "1/0", "abc", ""])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_ring_validation():
    with pytest.raises(ValueError):
        Ring(6, ("x",))
    with pytest.raises(ValueError):
        Ring(5, ("x", "x"))
    with pytest.raises(ValueError):
        Ring(5, ("x",), "weird")


def test_parse_and_render_roundtrip(qxy):
    f = qxy("x^2 + 3*x*y - 1/2*y^3")
    assert qxy(str(f)) == f
    assert qxy("2xy") == qxy("2*x*y")
    assert qxy("(x+y)^2") == qxy("x^2+2*x*y+y^2")


@pytest.mark.parametrize("text", ["x +", "x^", "z", "(x", "x ** -1"])
def test_parse_errors(qxy, text):
    with pytest.raises(ParseError):
        qxy(text)


def test_char_p_arithmetic():
    R = Ring(5, ("x", "y"))
    assert (R("x+y") ** 5) == R("x^5+y^5")
    assert R("6*x") == R("x")
    assert str(R("-x")) == "4*x"
    with pytest.raises(ParseError):
        R("x/5")


def test_reduce_mod_p(qxy):
    f = qxy("1/2*x^2 + y^3")
    with pytest.raises(BadPrimeError):
        reduce_coeffs_mod_p(f, 2)
    g = reduce_coeffs_mod_p(f, 7)
    assert g == Ring(7, ("x", "y"))("4*x^2+y^3")
    assert vanishing_terms(qxy("5*x + y"), 5) == [(1, 0)]


coeffs = st.integers(-4, 4)
monos = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monos, coeffs, max_size=5)


def _mk(R, d):
    return R.zero() + sum((R.monomial(m, c) for m, c in d.items()), R.zero())


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    R = Ring(0, ("x", "y"))
    A, B, C = _mk(R, a), _mk(R, b), _mk(R, c)
    assert A * (B + C) == A * B + A * C
    assert (A * B) * C == A * (B * C)
    assert A - A == R.zero()


@settings(max_examples=40, deadline=None)
@given(polys, st.sampled_from([2, 3, 5]), st.integers(0, 2))
def test_frobenius_is_power(a, p, e):
    R = Ring(p, ("x", "y"))
    A = _mk(R, a)
    naive = R.one()
    for _ in range(p ** e):
        naive = naive * A
    assert pth_power(A, e) == naive


@settings(max_examples=30, deadline=None)
@given(polys, st.integers(0, 12), st.sampled_from([0, 3, 5]))
def test_truncated_power(a, n, p):
    R = Ring(p, ("x", "y"))
    A = _mk(R, a)
    full = A ** n
    keep = {m: c for m, c in full.terms.items() if max(m) < 4}
    assert truncated_power(A, n, 4).terms == keep
