import itertools
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fsinglab.ideals import Ideal, divide_exact
from fsinglab.polyring import Ring, monomial_divides, monomial_lcm


def _to_sympy(f, syms):
    return sum(sympy.Rational(int(c) if isinstance(c, int) else c.numerator, 1 if isinstance(c, int) else c.denominator)
               * sympy.Mul(*[s ** e for s, e in zip(syms, m)]) for m, c in f.terms.items())


def _sympy_gb(I):
    R = I.ring
    syms = sympy.symbols(R.variables)
    kw = {"modulus": R.characteristic} if R.characteristic else {}
    G = sympy.groebner([_to_sympy(g, syms) for g in I.generators], *syms, order="grevlex", **kw)
    return G, syms


@pytest.mark.parametrize("gens,expected", [
    (["x^2+y^3", "x"], ["x", "y^3"]),
    (["x+y", "x-y"], ["x", "y"]),
    (["1+x", "x"], ["1"]),
])
def test_reduced_basis_examples(qxy, gens, expected):
    assert Ideal.parse(qxy, gens).render() == expected


def test_colon_and_intersection(qxy):
    x, y = qxy.gens()
    assert Ideal(qxy, [x ** 2, x * y]).colon(Ideal(qxy, [x])) == Ideal(qxy, [x, y])
    assert Ideal(qxy, [x]).intersect(Ideal(qxy, [y])) == Ideal(qxy, [x * y])
    f = qxy("x^2+y")
    assert divide_exact(f * qxy("x-y"), f) == qxy("x-y")


def test_non_monomial_intersection(qxy):
    I = Ideal.parse(qxy, ["x+y"])
    J = Ideal.parse(qxy, ["x-y"])
    assert I.intersect(J) == Ideal.parse(qxy, ["x^2-y^2"])
    K = Ideal.parse(qxy, ["x^2", "y"])
    meet = I.intersect(K)
    for g in meet.generators:
        assert g in I and g in K


rand_poly = st.lists(
    st.tuples(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)), st.integers(-3, 3)),
    min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(st.lists(rand_poly, min_size=1, max_size=3), st.sampled_from([0, 3, 7]))
def test_groebner_matches_sympy(polys, p):
    R = Ring(p, ("x", "y", "z"))
    gens = []
    for terms in polys:
        g = R.zero()
        for m, c in terms:
            g = g + R.monomial(m, c)
        if g:
            gens.append(g)
    if not gens:
        return
    I = Ideal(R, gens)
    G, syms = _sympy_gb(I)
    mine = [_to_sympy(g, syms) for g in I.groebner()]
    theirs = list(G.exprs)
    if p:
        # sympy prints symmetric residues; compare as ideals
        assert len(mine) == len(theirs)
        for a in mine:
            assert G.contains(a)
        Gm = sympy.groebner(mine, *syms, order="grevlex", modulus=p)
        for b in theirs:
            assert Gm.contains(b)
    else:
        monic = [sympy.expand(e / sympy.Poly(e, *syms).LC(order="grevlex")) for e in theirs]
        assert sorted(map(str, map(sympy.expand, mine))) == sorted(map(str, monic))


# --- combinatorial oracle on monomial ideals -----------------------------------

def _minimal(monos):
    monos = set(monos)
    return {m for m in monos if not any(o != m and monomial_divides(o, m) for o in monos)}


def _rand_monomial_ideal(rng, n):
    return [tuple(rng.randint(0, 4) for _ in range(n)) for _ in range(rng.randint(1, 4))]


def _exps(I):
    return {g.leading_monomial() for g in I.groebner()}


def _in(m, gens):
    return any(monomial_divides(g, m) for g in gens)


def test_monomial_oracle_500():
    rng = random.Random(20261015)
    for trial in range(500):
        n = rng.randint(1, 3)
        R = Ring(rng.choice([0, 2, 3, 5]), tuple("xyz"[:n]))
        A, B = _rand_monomial_ideal(rng, n), _rand_monomial_ideal(rng, n)
        I = Ideal(R, [R.monomial(m) for m in A])
        J = Ideal(R, [R.monomial(m) for m in B])
        assert _exps(I) == _minimal(A)
        assert _exps(I + J) == _minimal(A + B)
        assert _exps(I * J) == _minimal(tuple(a + b for a, b in zip(u, v)) for u in A for v in B)
        assert _exps(I & J) == _minimal(monomial_lcm(u, v) for u in A for v in B)
        # colon: x^w in (I : J) iff x^w x^v in I for every generator v of J
        box = itertools.product(range(6), repeat=n)
        colon = [w for w in box
                 if all(_in(tuple(a + b for a, b in zip(w, v)), A) for v in B)]
        assert _exps(I.colon(J)) == _minimal(colon)
        probe = tuple(rng.randint(0, 5) for _ in range(n))
        assert (R.monomial(probe) in I) == _in(probe, A)


def test_ideal_equality_and_hash(qxy):
    I = Ideal.parse(qxy, ["x*y", "x^2+y"])
    J = Ideal.parse(qxy, ["x^2+y", "x*y", "x^3 + x*y"])
    assert I == J and hash(I) == hash(J)
    assert I <= I + Ideal.parse(qxy, ["y"])
