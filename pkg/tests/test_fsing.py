import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fsinglab.charzero import CZeroPair, maximal_nonlc
from fsinglab.errors import BadPrimeError, CharacteristicError
from fsinglab.fsing import (
    PairData, canonical_level, certify_fpt, fpt_bounds, multiplicative_order, nu_value, sigma,
    sigma_jumps, sigma_truncated, tau, tau_left_limit, verify_power_containment, verify_sigma_properties, _sigma_exact,
)
from fsinglab.ideals import Ideal
from fsinglab.polyring import Ring


def _nu_brute(f, e):
    # direct: largest a with f^a having a monomial with every exponent < q
    q = f.ring.characteristic ** e
    a, g, best = 0, f.ring.one(), 0
    while a <= f.ring.nvars * q:
        if any(all(x < q for x in m) for m in g.terms):
            best = a
        a += 1
        g = g * f
    return best


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("text", ["x^2+y^3", "x*y", "x^3+y^3+x*y", "x^2"])
def test_nu_matches_brute(p, text):
    f = Ring(p, ("x", "y"))(text)
    for e in (1, 2):
        assert nu_value(f, e) == _nu_brute(f, e)


@pytest.mark.parametrize("p,expected", [(2, F(1, 2)), (5, F(4, 5)), (7, F(5, 6)), (11, F(9, 11)), (13, F(5, 6))])
def test_cusp_fpt(p, expected):
    b = fpt_bounds(Ring(p, ("x", "y"))("x^2+y^3"), 3)
    assert b.exact and b.lower == b.upper == expected


def test_certify_rejects_wrong_value():
    f = Ring(7, ("x", "y"))("x^2+y^3")
    assert certify_fpt(f, F(5, 6))
    assert not certify_fpt(f, F(4, 5))
    assert not certify_fpt(f, F(6, 7))


def _monomial_sigma(R, v, lam):
    # straight from the definition: summand e is (x^{v ceil(lam (p^e - 1))})^[1/p^e]
    # = x^{floor(v ceil(lam (p^e - 1)) / p^e)}; the sequence is eventually periodic,
    # so sigma is generated by the summands over a late window of e
    p = R.characteristic
    gens = []
    for e in range(40, 80):
        q = p ** e
        N = math.ceil(lam * (q - 1))
        gens.append(R.monomial([a * N // q for a in v]))
    return Ideal(R, gens)


def _monomial_tau(R, v, lam):
    return Ideal(R, [R.monomial([math.floor(lam * a) for a in v])])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.tuples(st.integers(0, 3), st.integers(1, 3)),
       st.integers(0, 30), st.integers(1, 12))
def test_monomial_closed_forms(p, v, num, den):
    lam = F(num, den)
    R = Ring(p, ("x", "y"))
    pair = PairData(R, R.monomial(v), lam)
    assert sigma(pair).value == _monomial_sigma(R, v, lam)
    assert tau(pair) == _monomial_tau(R, v, lam)


@pytest.mark.parametrize("p", [5, 7, 11])
@pytest.mark.parametrize("lam", [F(1, 2), F(1), F(3, 2), F(2), F(5, 3)])
def test_monomial_ideal_sigma_is_left_limit(p, lam):
    # for monomial a, sigma(a^lam) and J(a^{lam-eps}) are given by the same facet formula
    Q = Ring(0, ("x", "y"))
    a = Ideal.parse(Q, ["x^2", "x*y", "y^3"])
    Rp = Q.with_characteristic(p)
    got = sigma(PairData(Rp, Ideal.parse(Rp, ["x^2", "x*y", "y^3"]), lam)).value
    want = maximal_nonlc(CZeroPair(Q, a, lam))
    assert got.render() == want.render()


@pytest.mark.parametrize("p,lam,expected", [
    (7, F(5, 6), ["1"]), (5, F(5, 6), ["x", "y"]), (7, F(1), ["x", "y"]), (7, F(13, 12), ["y^3 + x^2"]),
])
def test_cusp_sigma(p, lam, expected):
    R = Ring(p, ("x", "y"))
    assert sigma(PairData(R, R("x^2+y^3"), lam)).value.render() == expected


def test_tau_at_fpt():
    R = Ring(7, ("x", "y"))
    pair = PairData(R, R("x^2+y^3"), F(5, 6))
    assert tau(pair).render() == ["x", "y"]
    assert tau_left_limit(pair).is_unit()


@pytest.mark.parametrize("text", ["x", "x*y", "x^2+y^3", "x^2+y^5"])
@pytest.mark.parametrize("p", [5, 7, 11])
def test_level_scaling(text, p):
    R = Ring(p, ("x", "y"))
    for lam in (F(1, 3), F(5, 6), F(7, 4), F(3, 2)):
        if lam.denominator % p == 0:
            continue
        pair = PairData(R, R(text), lam)
        assert _sigma_exact(pair, 1) == _sigma_exact(pair, 2)


def test_sigma_truncated_agrees_with_exact():
    R = Ring(5, ("x", "y"))
    for lam in (F(1, 2), F(5, 6), F(4, 3)):
        pair = PairData(R, Ideal.parse(R, ["x^2", "y^3"]), lam)
        assert sigma_truncated(pair, 3).value == sigma(pair).value


def test_sigma_jumps_line():
    R = Ring(5, ("x", "y"))
    segs = sigma_jumps(PairData(R, R("x"), 0), 2, 10)
    assert [(s, I.render()) for s, I in segs] == [(0, ["1"]), (F(11, 10), ["x"])]


def test_order_and_level():
    assert multiplicative_order(7, 6) == 1
    assert multiplicative_order(5, 6) == 2
    R = Ring(3, ("x", "y"))
    with pytest.raises(BadPrimeError):
        canonical_level(PairData(R, R("x"), F(1, 3)))


def test_pair_validation(qxy):
    with pytest.raises(CharacteristicError):
        PairData(qxy, qxy("x"), F(1))
    R = Ring(5, ("x",))
    with pytest.raises(ValueError):
        PairData(R, R("x"), F(-1))


def test_boundary_pairs_run():
    R = Ring(5, ("x", "y"))
    pair = PairData(R, R("y"), F(1, 2), ((R("x"), F(1, 2)),))
    assert sigma(pair).value.is_unit()
    reports = verify_sigma_properties(pair, grid_denominator=4)
    assert all(r.hypothesis_status == "unchecked hypothesis" for r in reports if r.clause != "monotone")


def test_sigma_properties_pass():
    R = Ring(7, ("x", "y"))
    for lam in (F(1, 2), F(3, 2), F(2)):
        reports = verify_sigma_properties(PairData(R, R("x^2+y^3"), lam))
        assert all(r.passed for r in reports), [r.to_dict() for r in reports]


def test_power_containment_example():
    R = Ring(7, ("x", "y"))
    a = Ideal.parse(R, ["x^2", "y^3"])
    assert verify_power_containment(a, R("x^2+y^3"), 1, F(5, 6)).passed
    with pytest.raises(ValueError):
        verify_power_containment(a, R("x"), 1, F(1))
