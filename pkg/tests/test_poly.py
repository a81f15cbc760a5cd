"""Sparse polynomials, charts, normal forms, and the text parser."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from arithflow.padic import TruncatedPadic
from arithflow.poly import (MultiPoly, Chart, ChartElement, ChartError,
                            ZZ, QQ, Zp, FiberNF, SphereNF,
                            parse_poly, ParseError)
from arithflow.euler import euler_h_polys


def small_polys():
    mono = st.tuples(st.integers(-4, 4),
                     st.integers(0, 3), st.integers(0, 3))
    return st.lists(mono, max_size=4).map(
        lambda ms: sum((MultiPoly.monomial(c, x1=e1, x2=e2)
                        for c, e1, e2 in ms), start=MultiPoly.const(0)))


@settings(max_examples=100, deadline=None)
@given(small_polys(), small_polys(), small_polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f - f == MultiPoly.const(0)


@settings(max_examples=50, deadline=None)
@given(small_polys(), small_polys())
def test_derivation_leibniz(f, g):
    lhs = (f * g).deriv("x1")
    rhs = f.deriv("x1") * g + f * g.deriv("x1")
    assert lhs == rhs


def test_substitute_and_eval():
    f = parse_poly("x1^2 + 3*x2")
    g = f.substitute({"x1": parse_poly("x2 + 1")})
    assert g == parse_poly("x2^2 + 5*x2 + 1")
    assert f.eval({"x1": 2, "x2": 5}) == 19


def test_power_and_degree():
    f = parse_poly("x1 + x2")
    assert (f ** 3) == parse_poly("x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3")
    assert f.total_degree() == 1
    assert (f ** 3).degree_in("x1") == 3
    assert (f ** 0) == MultiPoly.const(1)


def test_parser_errors():
    with pytest.raises(ParseError):
        parse_poly("x1 +")
    with pytest.raises(ParseError):
        parse_poly("(x1")
    with pytest.raises(ParseError):
        parse_poly("x1 ^ x2")
    with pytest.raises(ParseError):
        parse_poly("x1 $ x2")


def test_parser_whitespace_and_parens():
    assert parse_poly(" ( x1 - 2 ) * (x1+2)") == parse_poly("x1^2 - 4")
    assert parse_poly("-x1 + 1 - 1") == -MultiPoly.var("x1")


def _simple_chart(ring=None):
    one = 1 if ring is None else ring.from_int(1)
    return Chart(("x1", "x2", "x3"),
                 (MultiPoly.var("x1", one),), ring or ZZ())


def test_chart_element_equality_cross_multiplied():
    chart = _simple_chart()
    x1 = chart.var("x1")
    e1 = (x1 * x1).div_factor(0)       # x1^2 / x1
    assert e1 == x1
    assert not e1 == chart.var("x2")


def test_chart_element_arithmetic():
    chart = _simple_chart()
    x1, x2 = chart.var("x1"), chart.var("x2")
    half = chart.one().div_factor(0)    # 1/x1
    assert (half + half) * x1 == chart.const(2)
    assert half * x1 == chart.one()
    assert (x2 * half - x2 * half).is_zero()


def test_eval_and_chart_violation():
    chart = _simple_chart()
    e = chart.one().div_factor(0)
    assert e.eval({"x1": 1, "x2": 0, "x3": 0}) == 1
    assert chart.var("x1").eval({"x1": 2, "x2": 3, "x3": 1}) == 2
    with pytest.raises(ChartError):
        e.eval({"x1": 0, "x2": 1, "x3": 1})


def test_eval_padic_units():
    gf = Zp(5, 2)
    chart = Chart(("x1",), (MultiPoly.var("x1", gf.from_int(1)),), gf)
    e = chart.one().div_factor(0)
    assert e.eval({"x1": gf.from_int(2)}) == gf.from_int(13)  # 1/2 mod 25
    with pytest.raises(ChartError):
        e.eval({"x1": gf.from_int(5)})


def _fiber_setup(p=5, a=(1, 2, 3), c1=2, c2=1):
    gf = Zp(p, 1)
    one = gf.from_int(1)
    chart = Chart(("x1", "x2", "x3"),
                  (MultiPoly.var("x1", one), MultiPoly.var("x2", one)), gf)
    ab = tuple(gf.from_int(v) for v in a)
    nf = FiberNF(chart, ab, gf.from_int(c1), gf.from_int(c2))
    return chart, ab, nf


def test_fiber_normal_form_kills_the_ideal():
    chart, ab, nf = _fiber_setup()
    H1, H2 = euler_h_polys(ab, chart.ring.from_int(1))
    assert nf.nf_poly(H1 - MultiPoly.const(chart.ring.from_int(2))).is_zero()
    assert nf.nf_poly(H2 - MultiPoly.const(chart.ring.from_int(1))).is_zero()


def test_fiber_normal_form_basis():
    chart, ab, nf = _fiber_setup()
    r = nf.nf_poly(parse_poly("x1^2", chart.ring) * chart.ring.from_int(1))
    assert r.degree_in("x1") == 0 and r.degree_in("x2") == 0


def test_sphere_normal_form_examples():
    p, c2 = 5, 3
    gf = Zp(p, 1)
    one = gf.from_int(1)
    chart = Chart(("x1", "x2", "x3"), (), gf)
    nf = SphereNF(chart, gf.from_int(c2))
    ab = tuple(gf.from_int(v) for v in (1, 2, 3))
    H1, H2 = euler_h_polys(ab, one)
    assert nf.nf_poly(H2 - MultiPoly.const(gf.from_int(c2))).is_zero()
    # x1^3 -> x1 (c2 - x2^2 - x3^2)
    x1 = MultiPoly.var("x1", one)
    expect = x1 * (MultiPoly.const(gf.from_int(c2))
                   - MultiPoly.monomial(one, x2=2)
                   - MultiPoly.monomial(one, x3=2))
    assert nf.nf_poly(x1 ** 3) == expect
    # H1 - a1 c2 -> (a2-a1)x2^2 + (a3-a1)x3^2
    got = nf.nf_poly(H1 - MultiPoly.const(ab[0] * gf.from_int(c2)))
    want = (MultiPoly.monomial(ab[1] - ab[0], x2=2)
            + MultiPoly.monomial(ab[2] - ab[0], x3=2))
    assert got == want


def test_normal_form_idempotent_and_ring_compatible():
    chart, ab, nf = _fiber_setup()
    f = parse_poly("x1^3*x2 + x2^4 + x3^2*x1", chart.ring)
    g = parse_poly("x1*x2*x3 + x3^5", chart.ring)
    assert nf.nf_poly(nf.nf_poly(f)) == nf.nf_poly(f)
    assert nf.nf_poly(f * g) == nf.nf_poly(nf.nf_poly(f) * nf.nf_poly(g))


def test_normal_form_zero_iff_vanishes_on_fiber():
    p, a, c1, c2 = 5, (1, 2, 3), 2, 1
    chart, ab, nf = _fiber_setup(p, a, c1, c2)
    fiber_points = []
    for x in product(range(p), repeat=3):
        if (sum(ai * xi * xi for ai, xi in zip(a, x)) - c1) % p == 0 \
                and (sum(xi * xi for xi in x) - c2) % p == 0:
            fiber_points.append(x)
    assert fiber_points
    for f in (parse_poly("x1^2*x3 - x2", chart.ring),
              parse_poly("x2^2 + x3", chart.ring)):
        vanishes = all(
            f.eval({n: chart.ring.from_int(v)
                    for n, v in zip(chart.vars, pt)}).is_zero()
            for pt in fiber_points)
        if nf.nf_poly(f).is_zero():
            assert vanishes
    # an actual ideal element vanishes everywhere and has zero normal form
    H1, _ = euler_h_polys(ab, chart.ring.from_int(1))
    elt = (H1 - MultiPoly.const(chart.ring.from_int(c1))) \
        * parse_poly("x3 + 1", chart.ring)
    assert nf.nf_poly(elt).is_zero()


def test_rational_coefficients():
    chart = Chart(("x1",), (MultiPoly.var("x1", Fraction(1)),), QQ())
    e = chart.const(1).div_factor(0) * Fraction(1, 2)
    assert e.eval({"x1": Fraction(3)}) == Fraction(1, 6)


def test_nonunit_fiber_parameter_rejected():
    gf = Zp(5, 1)
    chart = Chart(("x1", "x2", "x3"), (), gf)
    with pytest.raises(ChartError):
        FiberNF(chart, tuple(gf.from_int(v) for v in (1, 1, 3)),
                gf.from_int(0), gf.from_int(1))
