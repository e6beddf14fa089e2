import random
from fractions import Fraction as F

import pytest

from fsinglab.corrlab import (
    EQUAL, SMALLER, ModelInput, compare_at, lambda_points, prime_scan, principalize, reduce_model,
)
from fsinglab.errors import BadPrimeError
from fsinglab.fsing import fpt_bounds, verify_power_containment
from fsinglab.ideals import Ideal
from fsinglab.polyring import Ring


@pytest.fixture
def cusp(qxy):
    return ModelInput(qxy, qxy("x^2+y^3"))


def test_bad_primes(qxy, cusp):
    assert cusp.bad_primes == {2, 3}
    assert 2 in ModelInput(qxy, qxy("1/2*x^2 + y^3")).bad_primes
    assert ModelInput(qxy, Ideal.parse(qxy, ["x^2", "y^3"])).bad_primes == {2, 3}
    with pytest.raises(BadPrimeError):
        reduce_model(cusp, 3)


def test_reduce_model(qxy, cusp):
    assert reduce_model(cusp, 7).coefficient == Ring(7, ("x", "y"))("x^2+y^3")
    a = reduce_model(ModelInput(qxy, Ideal.parse(qxy, ["x^2", "y^3"])), 11).coefficient
    assert a.render() == ["x^2", "y^3"]


@pytest.mark.parametrize("p,lam,relation", [
    (7, F(5, 6), EQUAL), (5, F(5, 6), SMALLER), (7, F(0), EQUAL), (11, F(0), EQUAL),
])
def test_compare_examples(cusp, p, lam, relation):
    assert compare_at(cusp, p, lam).relation == relation


def test_policy_points(cusp):
    pts = lambda_points(cusp, 5, "all-jumps")
    for j in (F(5, 6), F(1), F(11, 6), F(2)):
        assert j in pts
    assert all(x.denominator % 5 for x in pts)
    assert lambda_points(cusp, 5, "grid", 1, 4) == [F(k, 4) for k in range(5)]


def test_scan_matches_fpt_oracle(cusp):
    rep = prime_scan(cusp, 40)
    assert not rep.violations
    for entry in rep.per_prime():
        p = entry["prime"]
        fpt = fpt_bounds(Ring(p, ("x", "y"))("x^2+y^3"), 2)
        # equality at every lambda forces the fpt to match the log canonical threshold
        if entry["verdict"] == "equal-for-all-lambda":
            assert fpt.lower == F(5, 6)
        else:
            assert fpt.upper < F(5, 6)


def test_grid_refinement_monotone(cusp):
    coarse = prime_scan(cusp, 30, "grid", 2, 2)
    fine = prime_scan(cusp, 30, "grid", 2, 6)
    for a, b in zip(coarse.per_prime(), fine.per_prime()):
        if a["verdict"] != "equal-for-all-lambda":
            assert b["verdict"] != "equal-for-all-lambda"


def test_monomial_scan_equal(qxy):
    rep = prime_scan(ModelInput(qxy, Ideal.parse(qxy, ["x", "y"])), 30)
    assert rep.density == 1


def test_report_deterministic(cusp):
    a = prime_scan(cusp, 30)
    b = prime_scan(cusp, 30, jobs=2)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    assert a.to_csv().splitlines()[0] == "prime,lambda,sigma,nonlc_reduction,relation"


def test_principalize(qxy):
    a = Ideal.parse(qxy, ["x", "y"])
    pr = principalize(a, 2, 1)
    assert pr.polynomial in a ** 2
    assert pr == principalize(a, 2, 1)
    assert len(pr.coefficients) == 2
    f = qxy("x^2+y^3")
    single = principalize(Ideal(qxy, [f]), 1, 4)
    assert single.polynomial == f * qxy.constant(single.coefficients[0][0])


def test_principalize_containment_sample():
    rng = random.Random(9)
    R = Ring(5, ("x", "y"))
    for seed in range(5):
        a = Ideal.parse(R, ["x^2", "y^3"])
        pr = principalize(a, 2, seed)
        lam = F(rng.randint(1, 6), rng.choice([2, 3, 4]))
        assert verify_power_containment(a, pr.polynomial, 2, lam).passed
