from fractions import Fraction

import pytest
import sympy
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, settings
from hypothesis import strategies as st

from fermconic import linalg
from fermconic.polyalg import (
    QQ, AlphaBetaExtension, DomainError, FractionField, NotDivisible, PolyRing, PrimeField,
    from_json, resultant,
)

R = PolyRing(("x", "y", "z"), QQ)
coeffs = st.fractions(min_value=-20, max_value=20, max_denominator=6)
exponents = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exponents, coeffs, max_size=6).map(R.from_dict)
small = st.dictionaries(st.tuples(*[st.integers(0, 2)] * 3), st.integers(-5, 5), max_size=4).map(R.from_dict)


def to_sympy(f):
    xs = sympy.symbols(f.ring.vars)
    return sympy.Add(*[sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x ** e for x, e in zip(xs, es)])
                       for es, c in f.items()])


@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == R.zero()
    assert f * R.one() == f


@given(polys, polys)
def test_multiplication_matches_sympy(f, g):
    assert sympy.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0


@given(polys, small)
def test_exact_division_recovers_factor(f, g):
    if g.is_zero():
        return
    assert (f * g).divide_exact(g) == f


def test_inexact_division_reports_remainder():
    x, y, _ = R.gens()
    with pytest.raises(NotDivisible) as info:
        (x ** 2 + y).divide_exact(x)
    assert not info.value.remainder.is_zero()


@given(polys, small)
def test_pseudo_remainder_degree_drops(f, g):
    if g.degree("x") < 1:
        return
    r = f.pseudo_remainder(g, "x")
    assert r.degree("x") < g.degree("x")


@settings(max_examples=40)
@given(small, small)
def test_resultant_matches_sympy(f, g):
    if f.degree("x") < 1 or g.degree("x") < 1:
        return
    x = sympy.Symbol("x")
    want = sympy.resultant(to_sympy(f), to_sympy(g), x)
    assert sympy.expand(to_sympy(resultant(f, g, "x")) - want) == 0


@given(polys)
def test_json_round_trip(f):
    assert from_json(f.to_json()) == f


@given(polys)
def test_parse_round_trip(f):
    assert R.parse(str(f)) == f


def test_from_json_rejects_other_variables():
    f = R.parse("x + y")
    with pytest.raises(DomainError):
        from_json(f.to_json(), ring=PolyRing(("a", "b", "c")))


@given(polys, st.tuples(coeffs, coeffs, coeffs))
def test_evaluate_is_substitution(f, point):
    vals = dict(zip("xyz", point))
    assert f.evaluate(vals) == to_sympy(f).subs({sympy.Symbol(k): sympy.Rational(v.numerator, v.denominator)
                                                 for k, v in vals.items()})


@given(polys)
def test_partial_derivative_matches_sympy(f):
    assert sympy.expand(to_sympy(f.partial_derivative("y")) - sympy.diff(to_sympy(f), sympy.Symbol("y"))) == 0


@given(st.integers(1, 10 ** 6))
def test_prime_field_inverse(a):
    F = PrimeField(1009)
    if a % 1009:
        assert F.mul(F.inv(a), a) == 1


def test_prime_field_sqrt():
    F = PrimeField(101)
    squares = {x * x % 101 for x in range(101)}
    for a in range(101):
        r = F.sqrt(a)
        assert (r is not None) == (a in squares)
        if r is not None:
            assert r * r % 101 == a


def test_reduce_monic_is_remainder():
    ring = PolyRing(("a", "b"), QQ)
    a, b = ring.gens()
    g = a ** 5 + b ** 5
    f = a ** 7 + a ** 2 * b + 3
    r = f.reduce_monic(g, "a")
    assert r.degree("a") < 5
    assert (f - r).divide_exact(g) * g == f - r


def test_fraction_field_cancels():
    ring = PolyRing(("s", "t"), QQ)
    s, t = ring.gens()
    F = FractionField(ring)
    q = F(s * s - t * t, s - t)
    assert q.is_polynomial()
    assert q.as_polynomial() == s + t
    assert q * F(ring.one(), s + t) == F.convert(1)


@given(st.lists(st.integers(-9, 9).filter(bool), min_size=6, max_size=6))
def test_alpha_beta_inverse(vals):
    S20, S11, S02, S30, S31, S32 = (Fraction(v) for v in vals)
    ext = AlphaBetaExtension(QQ, S20, S11, S02, S30, S31, S32)
    x = ext.element(1, 2, -1, 3)
    try:
        inv = x.inverse()
    except ZeroDivisionError:
        return
    assert x * inv == ext.convert(1)


def test_alpha_beta_relations():
    ext = AlphaBetaExtension(QQ, *(Fraction(v) for v in (2, 3, 1, 5, 7, 4)))
    a, b = ext.alpha, ext.beta
    # alpha and beta are roots of the two tangent-cone quadratics
    assert a * a * 5 + a * 14 + 4 == ext.convert(0)
    assert b * b * 2 + b * 6 + 1 == ext.convert(0)


@settings(max_examples=30)
@given(st.lists(st.lists(st.integers(0, 100), min_size=4, max_size=4), min_size=3, max_size=5))
def test_linalg_matches_sympy(rows):
    F = PrimeField(101)
    gf = sympy.GF(101)
    dm = DomainMatrix([[gf(v) for v in r] for r in rows], (len(rows), 4), gf)
    assert linalg.rank(rows, F) == dm.rank()
    for v in linalg.nullspace(rows, F):
        assert all(sum(a * b for a, b in zip(r, v)) % 101 == 0 for r in rows)
    assert linalg.rank(rows, F) + len(linalg.nullspace(rows, F)) == 4


@given(st.lists(st.lists(st.integers(0, 100), min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_and_solve(rows):
    F = PrimeField(101)
    det = linalg.determinant(rows, F)
    assert det == int(sympy.Matrix(rows).det()) % 101
    if det:
        rhs = [1, 2, 3]
        sol = linalg.solve(rows, rhs, F)
        assert [sum(a * b for a, b in zip(r, sol)) % 101 for r in rows] == rhs
