"""Jet prolongation, jets of points, solution checks, canonical flows."""

import pytest

from arithflow.padic import TruncatedPadic, teichmuller
from arithflow.poly import MultiPoly, Chart, ZZ, parse_poly
from arithflow.jets import (prolong, jet_of_point, is_solution,
                            universal_derivation, universal_p_derivation)
from arithflow.flows import ClassicalFlow, is_canonical_flow


def test_classical_prolong_square():
    pres = prolong(parse_poly("x^2"), 2, "classical")
    assert pres.relations[0] == parse_poly("x^2")
    assert pres.relations[1] == parse_poly("2*x") * MultiPoly.var("x'")
    x1, x2 = MultiPoly.var("x'"), MultiPoly.var("x''")
    assert pres.relations[2] == x1 * x1 * 2 + MultiPoly.var("x") * x2 * 2


def test_classical_prolong_generator():
    pres = prolong(parse_poly("x"), 2, "classical")
    assert pres.relations == [MultiPoly.var("x"), MultiPoly.var("x'"),
                              MultiPoly.var("x''")]
    assert pres.variables == ("x", "x'", "x''")


def test_arithmetic_prolong_square():
    p = 3
    pres = prolong(parse_poly("x^2"), 1, "arithmetic", p)
    # delta(x^2) = 2 x^p x' + p x'^2
    expect = (MultiPoly.monomial(2, x=3) * MultiPoly.var("x'")
              + MultiPoly.monomial(3, **{"x'": 2}))
    assert pres.relations[1] == expect


def test_arithmetic_prolong_needs_prime():
    with pytest.raises(ValueError):
        prolong(parse_poly("x"), 1, "arithmetic")


def test_prolongation_product_rule_order_one():
    p = 5
    f, g = parse_poly("x^2 + y"), parse_poly("x*y - 3")
    vs = ["x", "y"]
    df = universal_p_derivation(f, vs, p)
    dg = universal_p_derivation(g, vs, p)
    dfg = universal_p_derivation(f * g, vs, p)
    phi = {v: MultiPoly.monomial(1, **{v: p}) + MultiPoly.var(v + "'") * p
           for v in vs}
    assert dfg == f.substitute(phi) * dg + g ** p * df
    # classical analogue
    cf, cg = universal_derivation(f, vs), universal_derivation(g, vs)
    assert universal_derivation(f * g, vs) == f * cg + g * cf


def test_jet_of_point_delta_constants():
    P = {"x": teichmuller(5, 2, 4), "y": teichmuller(5, 3, 4)}
    J = jet_of_point(P, 1, "arithmetic")
    assert J["x'"].is_zero() and J["y'"].is_zero()


def test_jet_of_point_worked_example():
    J = jet_of_point({"x": TruncatedPadic(3, 4, 2)}, 1, "arithmetic")
    assert J["x'"].prec == 3
    assert J["x'"].val == 25   # -2 mod 27


def test_jet_of_point_classical_constants():
    J = jet_of_point({"x": 7}, 3, "classical")
    assert J == {"x": 7, "x'": 0, "x''": 0, "x'''": 0}


def test_prolonged_relations_vanish_at_jets():
    p, N, n = 5, 2, 2
    t = TruncatedPadic(p, N + n, 38)
    c = t * t
    f = parse_poly("x^2") - MultiPoly.const(c)
    pres = prolong(f, n, "arithmetic", p)
    J = jet_of_point({"x": t}, n, "arithmetic")
    assert is_solution(pres.relations, J)


def test_is_solution_flow_relations():
    P = {"x": teichmuller(7, 3, 3)}
    J = jet_of_point(P, 1, "arithmetic")
    assert is_solution([MultiPoly.var("x'")], J)
    assert not is_solution([MultiPoly.var("x'") - 1], J)


def test_canonical_flow_detection():
    chart = Chart(("x", "x'"), (), ZZ())
    g = chart.elem(parse_poly("x + 3"))
    flow = ClassicalFlow(chart, {"x": chart.var("x'"), "x'": g})
    assert is_canonical_flow(flow, [("x", "x'")])
    flat = ClassicalFlow(chart, {"x": chart.zero()})
    assert not is_canonical_flow(flat, [("x", "x'")])
