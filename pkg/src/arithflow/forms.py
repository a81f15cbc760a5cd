"""Differential forms on a chart.

A DiffForm of degree i stores ChartElement coefficients on the basis
dx_{j1} ^ ... ^ dx_{ji} with strictly increasing index tuples (indices into
the chart's variable list).  Supplies d, wedge, the classical Lie derivative
along a flow, the arithmetic pullbacks phi*/p^i, and contraction with the
tangent/bivector frame used for restriction to fibers and spheres.
"""

from __future__ import annotations

from .poly import MultiPoly, ChartElement


def elem_deriv(e, name):
    """Partial derivative of a chart element (quotient rule per factor)."""
    chart = e.chart
    out = ChartElement(chart, e.num.deriv(name), e.den)
    for i, f in enumerate(chart.factors):
        k = e.den[i]
        if not k:
            continue
        df = f.deriv(name)
        if df.is_zero():
            continue
        den = list(e.den)
        den[i] += 1
        out = out + ChartElement(chart, e.num * df * (-k), den)
    return out


def _merge_indices(t1, t2):
    """Concatenate sorted index tuples; return (sign, merged) or (0, None)."""
    if not t1:
        return 1, t2
    if not t2:
        return 1, t1
    if set(t1) & set(t2):
        return 0, None
    merged = sorted(t1 + t2)
    seq = list(t1) + list(t2)
    # sign of the permutation sorting seq (small tuples, count inversions)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(merged)


class DiffForm:
    """Exterior form with ChartElement coefficients."""

    __slots__ = ("chart", "degree", "comps")

    def __init__(self, chart, degree, comps=None):
        self.chart = chart
        self.degree = degree
        self.comps = {}
        if comps:
            for idx, e in comps.items():
                if not e.is_zero():
                    self.comps[tuple(idx)] = e

    @classmethod
    def zero(cls, chart, degree=0):
        return cls(chart, degree, {})

    @classmethod
    def function(cls, e):
        return cls(e.chart, 0, {(): e})

    @classmethod
    def dx(cls, chart, name):
        i = chart.vars.index(name)
        return cls(chart, 1, {(i,): chart.one()})

    def component(self, idx):
        idx = tuple(idx)
        if idx in self.comps:
            return self.comps[idx]
        return self.chart.zero()

    def is_zero(self):
        return not self.comps

    def __add__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError("degree mismatch in form addition")
        out = dict(self.comps)
        for idx, e in other.comps.items():
            s = out[idx] + e if idx in out else e
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return DiffForm(self.chart, self.degree, out)

    def __neg__(self):
        return DiffForm(self.chart, self.degree,
                        {idx: -e for idx, e in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return DiffForm(self.chart, self.degree,
                        {idx: e * scalar for idx, e in self.comps.items()})

    __rmul__ = __mul__

    def scale_elem(self, e):
        return DiffForm(self.chart, self.degree,
                        {idx: c * e for idx, c in self.comps.items()})

    def wedge(self, other):
        if self.chart is not other.chart:
            raise ValueError("chart mismatch in wedge")
        deg = self.degree + other.degree
        out = {}
        for i1, e1 in self.comps.items():
            for i2, e2 in other.comps.items():
                sign, idx = _merge_indices(i1, i2)
                if sign == 0:
                    continue
                term = e1 * e2 * sign
                s = out[idx] + term if idx in out else term
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
        return DiffForm(self.chart, deg, out)

    def d(self):
        nvars = len(self.chart.vars)
        out = DiffForm.zero(self.chart, self.degree + 1)
        for idx, e in self.comps.items():
            for j in range(nvars):
                de = elem_deriv(e, self.chart.vars[j])
                if de.is_zero():
                    continue
                sign, merged = _merge_indices((j,), idx)
                if sign == 0:
                    continue
                out = out + DiffForm(self.chart, self.degree + 1,
                                     {merged: de * sign})
        return out

    def map_coeffs(self, fn):
        return DiffForm(self.chart, self.degree,
                        {idx: fn(e) for idx, e in self.comps.items()})

    def reduce_mod_p(self):
        red = {idx: e.reduce_mod_p() for idx, e in self.comps.items()}
        chart = self.chart.reduce_mod_p()
        return DiffForm(chart, self.degree, red)

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        if self.degree != other.degree:
            return False
        for idx in set(self.comps) | set(other.comps):
            if self.component(idx) != other.component(idx):
                return False
        return True

    def __str__(self):
        if not self.comps:
            return "0"
        names = self.chart.vars
        parts = []
        for idx in sorted(self.comps):
            basis = "^".join("d%s" % names[j] for j in idx)
            e = self.comps[idx]
            parts.append("(%s)%s" % (e, " " + basis if basis else ""))
        return " + ".join(parts)

    __repr__ = __str__


def lie_derivative(flow, alpha):
    """Classical Lie derivative of a form along a flow.

    Characterized by: equals the flow on functions, commutes with d, and is
    a derivation for the wedge product.  On a monomial e dx_J this gives
    delta(e) dx_J + e * sum_m dx_{j1} ^ ... ^ d(delta x_{jm}) ^ ... ^ dx_{ji}.
    """
    chart = alpha.chart
    out = DiffForm.zero(chart, alpha.degree)
    for idx, e in alpha.comps.items():
        out = out + DiffForm(chart, alpha.degree, {idx: flow.apply_elem(e)})
        for m, j in enumerate(idx):
            dimg = DiffForm.function(flow.image(chart.vars[j])).d()
            rest = tuple(k for k in idx if k != j)
            sign, _ = _merge_indices((j,), rest)
            piece = DiffForm(chart, len(rest), {rest: e * sign})
            out = out + dimg.wedge(piece)
    return out


def phi_star_over_p(alpha, flow):
    """The arithmetic pullback phi*/p^i on a degree-i form.

    dx_j pulls back to d(x_j^p + p u_j) = p(x_j^{p-1} dx_j + du_j); the p^i
    is divided off symbolically, so no coefficient precision is lost.
    """
    chart = alpha.chart
    p = flow.p
    pulled_dx = {}

    def dx_image(j):
        if j not in pulled_dx:
            name = chart.vars[j]
            lead = chart.elem(MultiPoly.monomial(chart.ring.from_int(1),
                                                 **{name: p - 1}))
            form = DiffForm(chart, 1, {(j,): lead})
            form = form + DiffForm.function(flow.image(name)).d()
            pulled_dx[j] = form
        return pulled_dx[j]

    out = DiffForm.zero(chart, alpha.degree)
    for idx, e in alpha.comps.items():
        term = DiffForm.function(flow.phi_elem(e))
        for j in idx:
            term = term.wedge(dx_image(j))
        out = out + term
    return out


class FiberFrame:
    """The Euler tangent vector and Poisson bivector on a 3-variable chart.

    v = ((a2-a3)x2x3, (a3-a1)x3x1, (a1-a2)x1x2) is tangent to every fiber of
    (H1, H2); the bivector has components pi_12 = x3, pi_23 = x1, pi_31 = x2.
    """

    def __init__(self, chart, a):
        a1, a2, a3 = a
        x1 = chart.var("x1")
        x2 = chart.var("x2")
        x3 = chart.var("x3")
        self.chart = chart
        self.v = (x2 * x3 * (a2 - a3), x3 * x1 * (a3 - a1), x1 * x2 * (a1 - a2))
        self.pi = {(0, 1): x3, (1, 2): x1, (0, 2): -x2}

    def contract_1form(self, alpha):
        """<alpha, v> as a chart element."""
        total = self.chart.zero()
        for (j,), e in alpha.comps.items():
            total = total + e * self.v[j]
        return total

    def contract_2form(self, beta):
        """<beta, pi> as a chart element."""
        total = self.chart.zero()
        for idx, e in beta.comps.items():
            total = total + e * self.pi[idx]
        return total
