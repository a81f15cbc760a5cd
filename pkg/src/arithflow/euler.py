"""The Euler rigid-body system, classically and arithmetically.

Classical side: the flow delta x_i = (a_j - a_k) x_j x_k with prime
integrals H1 = sum a_i x_i^2 and H2 = sum x_i^2.

Arithmetic side: a p-derivation on the chart localized at
Q = x1 x2 N(H1,H2) A_{p-1}(H1,H2) with phi(H_j) = H_j^p exactly, built by
staged linear solves; a gauge adjustment along the kernel direction pinning
the linearization congruence mod p; and the fiber verifications (pullback of
the fiber 1-form, the sphere 2-form congruence, and the point-count
congruence for the trace of Frobenius).
"""

from __future__ import annotations

from .padic import TruncatedPadic, teichmuller
from .poly import (MultiPoly, Chart, ChartElement, Zp, FiberNF, SphereNF,
                   ChartError, reduce_poly_mod_p)
from .forms import DiffForm, FiberFrame, phi_star_over_p
from .flows import ArithmeticFlow, ClassicalFlow, _elem_pow


def euler_h_polys(a, one=1):
    """H1 = sum a_i x_i^2 and H2 = sum x_i^2; a entries may be symbolic."""
    xs = [MultiPoly.monomial(one, **{"x%d" % (i + 1): 2}) for i in range(3)]
    H1 = xs[0] * a[0] + xs[1] * a[1] + xs[2] * a[2]
    H2 = xs[0] + xs[1] + xs[2]
    return H1, H2


def norm_poly(a, one=1):
    """N(z1, z2) = prod (z1 - a_i z2)."""
    z1 = MultiPoly.var("z1", one)
    z2 = MultiPoly.var("z2", one)
    out = MultiPoly.const(one)
    for ai in a:
        out = out * (z1 - z2 * ai)
    return out


def quartic_poly(a, one=1):
    """F(z1, z2, x) = ((a2-a3)x^2 + z1 - a2 z2)((a3-a1)x^2 - z1 + a1 z2)."""
    a1, a2, a3 = a
    xx = MultiPoly.monomial(one, x=2)
    z1 = MultiPoly.var("z1", one)
    z2 = MultiPoly.var("z2", one)
    return (xx * (a2 - a3) + z1 - z2 * a2) * (xx * (a3 - a1) - z1 + z2 * a1)


def hasse_invariant(p, a, one=1):
    """Coefficient of x^{p-1} in F^{(p-1)/2}, a polynomial in (z1, z2)."""
    Fh = quartic_poly(a, one) ** ((p - 1) // 2)
    return Fh.coefficient_of("x", p - 1)


def classical_euler_flow(chart, a):
    """The classical flow on a chart containing x1, x2, x3."""
    x1 = MultiPoly.var("x1", _one_of(a))
    x2 = MultiPoly.var("x2", _one_of(a))
    x3 = MultiPoly.var("x3", _one_of(a))
    images = {
        "x1": chart.elem(x2 * x3 * (a[1] - a[2])),
        "x2": chart.elem(x3 * x1 * (a[2] - a[0])),
        "x3": chart.elem(x1 * x2 * (a[0] - a[1])),
    }
    return ClassicalFlow(chart, images)


def _one_of(a):
    c = a[0]
    if isinstance(c, MultiPoly):
        return 1
    if isinstance(c, TruncatedPadic):
        return TruncatedPadic(c.p, c.prec, 1)
    if isinstance(c, int):
        return 1
    return c * 0 + 1


class EulerSystem:
    """Parameters and derived data of the arithmetic Euler construction."""

    def __init__(self, p, prec, a):
        self.p = p
        self.prec = prec
        self.ring = Zp(p, prec)
        self.a = tuple(self.ring.coerce(ai) for ai in a)
        for i in range(3):
            for j in range(i + 1, 3):
                if not (self.a[i] - self.a[j]).is_unit():
                    raise ValueError("a_i - a_j must be units")
        one = self.ring.from_int(1)
        self.H1, self.H2 = euler_h_polys(self.a, one)
        self.N_z = norm_poly(self.a, one)
        Fh = quartic_poly(self.a, one) ** ((p - 1) // 2)
        self.B = [Fh.coefficient_of("x", j) for j in range(2 * (p - 1) + 1)]
        self.A_z = self.B[p - 1]
        sub = {"z1": self.H1, "z2": self.H2}
        self.N_H = self.N_z.substitute(sub)
        self.A_H = self.A_z.substitute(sub)
        x1 = MultiPoly.var("x1", one)
        x2 = MultiPoly.var("x2", one)
        # factor order: x1, x2, N(H1,H2), A_{p-1}(H1,H2)
        self.chart = Chart(("x1", "x2", "x3"), (x1, x2, self.N_H, self.A_H),
                           self.ring)

    def kernel_vector(self):
        """The Frobenius-twisted tangent direction, annihilated by both
        prime-integral Jacobian rows."""
        p = self.p
        one = self.ring.from_int(1)
        a1, a2, a3 = self.a
        mk = lambda n1, n2, c: self.chart.elem(
            MultiPoly.monomial(one, **{n1: p, n2: p}) * c)
        return (mk("x2", "x3", a2 - a3), mk("x3", "x1", a3 - a1),
                mk("x1", "x2", a1 - a2))

    def a_mod_p(self):
        return tuple(ai.truncate(1) for ai in self.a)

    def hasse_at(self, c1, c2):
        """A_{p-1}(c1, c2) in F_p."""
        v = self.A_z.eval({"z1": c1, "z2": c2})
        return v.truncate(1) if isinstance(v, TruncatedPadic) else v


class AdmissibleFiber:
    """A fiber point c = (c1, c2) with Teichmuller coordinates and
    N(c) A_{p-1}(c) a unit."""

    def __init__(self, sys, r1, r2):
        p = sys.p
        self.c1 = teichmuller(p, r1 % p, sys.prec)
        self.c2 = teichmuller(p, r2 % p, sys.prec)
        nv = sys.N_z.eval({"z1": self.c1, "z2": self.c2})
        av = sys.A_z.eval({"z1": self.c1, "z2": self.c2})
        if not (nv.is_unit() and av.is_unit()):
            raise ChartError("inadmissible fiber: N(c) A(c) not a unit")


def sample_admissible_fiber(sys, rng, need_c2_unit=False):
    p = sys.p
    while True:
        r1 = rng.randrange(p)
        r2 = rng.randrange(1, p) if need_c2_unit else rng.randrange(p)
        try:
            return AdmissibleFiber(sys, r1, r2)
        except ChartError:
            continue


# ---------------------------------------------------------------------------
# staged construction of the arithmetic flow

class FlowBuilder:
    """Maintains the flow images and the prime-integral residuals
    R_j = phi(H_j) - H_j^p incrementally (H_j are quadratic, so an update
    u += D changes R_j by 2p sum m_ji phi(x_i) D_i + p^2 sum m_ji D_i^2)."""

    def __init__(self, sys):
        self.sys = sys
        chart = sys.chart
        p, one = sys.p, sys.ring.from_int(1)
        self.u = {name: chart.zero() for name in chart.vars}
        self.phi_x = [chart.elem(MultiPoly.monomial(one, **{name: p}))
                      for name in chart.vars]
        # rows of the quadratic forms: H1 has weights a_i, H2 has weights 1
        self.weights = (sys.a, (one, one, one))
        self.R = []
        for w in self.weights:
            phiH = chart.zero()
            H = MultiPoly.const(0 * one)
            for i, wi in enumerate(w):
                H = H + MultiPoly.monomial(wi, **{"x%d" % (i + 1): 2})
                phiH = phiH + self.phi_x[i] * self.phi_x[i] * wi
            self.R.append(phiH - chart.elem(H ** p))

    def apply_increment(self, delta, p_order):
        """u += delta, where delta = p^p_order * (unit-level data)."""
        sys = self.sys
        p = sys.p
        for j, w in enumerate(self.weights):
            upd = sys.chart.zero()
            for i, wi in enumerate(w):
                d = delta[i]
                if d.is_zero():
                    continue
                upd = upd + self.phi_x[i] * d * (2 * p) * wi
                if 2 * p_order + 2 < sys.prec:
                    upd = upd + d * d * (p * p) * wi
            self.R[j] = self.R[j] + upd
        for i, name in enumerate(sys.chart.vars):
            if not delta[i].is_zero():
                self.u[name] = self.u[name] + delta[i]
                self.phi_x[i] = self.phi_x[i] + delta[i] * p

    def run_stage(self, s):
        """Kill the residuals at order p^{s+1} by a linear solve mod p."""
        sys = self.sys
        p = sys.p
        rho = [r.exact_div_p(s + 1).reduce_mod_p() for r in self.R]
        ab = sys.a_mod_p()
        cinv = ((ab[0] - ab[1]) * 2).inv()
        w1 = (rho[1] * ab[1] - rho[0]) * cinv
        w1 = w1.div_factor(0, p)
        w2 = (rho[0] - rho[1] * ab[0]) * cinv
        w2 = w2.div_factor(1, p)
        scale = self.sys.ring.from_int(p ** s)
        delta = [lift_elem(w1, sys.chart) * scale,
                 lift_elem(w2, sys.chart) * scale,
                 sys.chart.zero()]
        self.apply_increment(delta, s)

    def apply_gauge(self, t_mod_p):
        """u += lift(t) * kernel_vector; preserves R mod p^2 identically."""
        t = lift_elem(t_mod_p, self.sys.chart)
        delta = [t * v for v in self.sys.kernel_vector()]
        self.apply_increment(delta, 0)

    def residuals_zero(self):
        return all(r.is_zero() for r in self.R)

    def to_flow(self):
        flow = ArithmeticFlow(self.sys.chart, dict(self.u))
        flow._builder = self
        return flow


def lift_elem(e, chart):
    """Lift a mod-p chart element to the full-precision chart (top digits 0)."""
    ring = chart.ring
    num = e.num.map_coeffs(lambda c: TruncatedPadic(ring.p, ring.prec, c.val))
    return ChartElement(chart, num, e.den)


def build_flow(sys):
    """An arithmetic flow with phi(H1) = H1^p and phi(H2) = H2^p exactly."""
    b = FlowBuilder(sys)
    for s in range(sys.prec - 1):
        b.run_stage(s)
    if not b.residuals_zero():
        raise ArithmeticError("staged solve failed to kill the residuals")
    return b.to_flow()


def gauge_target_u3(sys):
    """The mod-p value of u3 that makes the pullback of the fiber 1-form
    congruent to A_{p-1}(c)^{-1} times itself on every admissible fiber.

    Integrates A^{-1} sum_{j != p-1} B_j(H1,H2) x3^j term by term (the
    exponents j+1 avoid p, so each is invertible mod p)."""
    p = sys.p
    cp = sys.chart.reduce_mod_p()
    gf = cp.ring
    H1p = reduce_poly_mod_p(sys.H1, gf)
    H2p = reduce_poly_mod_p(sys.H2, gf)
    sub = {"z1": H1p, "z2": H2p}
    total = cp.zero()
    for j, Bj in enumerate(sys.B):
        if j == p - 1 or Bj.is_zero():
            continue
        BH = reduce_poly_mod_p(Bj, gf).substitute(sub)
        mono = MultiPoly.monomial(gf.from_int(1), x3=j + 1)
        total = total + cp.elem(BH * mono) * gf.from_int(j + 1).inv()
    return total.div_factor(3, 1)


def gauge_adjust(flow, sys):
    """Move along the kernel direction so the linearization congruence holds,
    then re-run the higher stages to restore exact prime integrals."""
    b = getattr(flow, "_builder", None)
    if b is None:
        raise ValueError("gauge_adjust needs a flow from build_flow")
    target = gauge_target_u3(sys)
    current = b.u["x3"].reduce_mod_p()
    ab = sys.a_mod_p()
    t = (target - current) * (ab[0] - ab[1]).inv()
    t = t.div_factor(0, sys.p).div_factor(1, sys.p)
    b.apply_gauge(t)
    for s in range(1, sys.prec - 1):
        b.run_stage(s)
    if not b.residuals_zero():
        raise ArithmeticError("gauge adjustment broke the prime integrals")
    return b.to_flow()


# ---------------------------------------------------------------------------
# fiber verifications (all mod p)

def omega_rep(chart, ab):
    """dx3 / ((a1 - a2) x1 x2): the chart representative of the fiber 1-form
    (contraction with the tangent vector gives 1)."""
    coeff = ChartElement(chart, MultiPoly.const((ab[0] - ab[1]).inv()),
                         (1, 1) + (0,) * (chart.nfac - 2))
    return DiffForm(chart, 1, {(2,): coeff})


def pullback_coefficient(flow, sys):
    """<(phi*/p) omega, v> on the mod-p chart, before normal form.

    The result does not depend on the fiber, so it is cached on the flow."""
    cached = getattr(flow, "_pullback_cache", None)
    if cached is not None:
        return cached
    fp = flow.reduce_mod_p()
    cp = fp.chart
    ab = sys.a_mod_p()
    pulled = phi_star_over_p(omega_rep(cp, ab), fp)
    frame = FiberFrame(cp, ab)
    flow._pullback_cache = (frame.contract_1form(pulled), cp)
    return flow._pullback_cache


def verify_linearization(flow, sys, fiber):
    """Residual of (phi_c*/p) omega_c = A_{p-1}(c)^{-1} omega_c mod p,
    in fiber normal form; zero means the congruence holds."""
    h, cp = pullback_coefficient(flow, sys)
    Ac = sys.hasse_at(fiber.c1, fiber.c2)
    residual = h - cp.const(Ac.inv())
    nf = FiberNF(cp, sys.a_mod_p(), fiber.c1.truncate(1), fiber.c2.truncate(1))
    return nf.nf(residual)


def verify_new1(flow, sys, c2):
    """Residual of (phi*/p^2) eta = (H1^{p-1}/A_{p-1}(H1,c2)) eta mod p on
    the sphere H2 = c2, in sphere normal form."""
    fp = flow.reduce_mod_p()
    cp = fp.chart
    ab = sys.a_mod_p()
    gf = cp.ring
    H1p = reduce_poly_mod_p(sys.H1, gf)
    dH1 = DiffForm.function(cp.elem(H1p)).d()
    beta = -(dH1.wedge(omega_rep(cp, ab)))
    pulled = phi_star_over_p(beta, fp)
    frame = FiberFrame(cp, ab)
    h = frame.contract_2form(pulled) * gf.from_int(2).inv()
    lam = cp.elem(H1p ** (sys.p - 1)).div_factor(3, 1)
    residual = h - lam
    nf = SphereNF(cp, c2.truncate(1))
    return nf.nf(residual)


def fiber_frobenius(flow, sys, fiber):
    """The induced Frobenius lift on the fiber: checks that phi preserves the
    fiber ideal and returns the mod-p coordinate images."""
    cp = sys.chart.reduce_mod_p()
    nf = FiberNF(cp, sys.a_mod_p(), fiber.c1.truncate(1), fiber.c2.truncate(1))
    for H, c in ((sys.H1, fiber.c1), (sys.H2, fiber.c2)):
        e = flow.phi_poly(H) - sys.chart.const(c ** sys.p)
        if not nf.is_zero(e.reduce_mod_p()):
            raise ArithmeticError("phi does not preserve the fiber ideal")
    return {name: flow.phi_var(name).reduce_mod_p()
            for name in sys.chart.vars}


def derive_new2_form(flow, sys, fiber, coef=None):
    """Residual of -coef (phi_c*/p) omega_c + omega_c mod p on the fiber.

    coef defaults to A_{p-1}(c); passing the integer a_p instead must give
    the same vanishing by the trace congruence."""
    h, cp = pullback_coefficient(flow, sys)
    if coef is None:
        coef = sys.hasse_at(fiber.c1, fiber.c2)
    residual = cp.one() - h * coef
    nf = FiberNF(cp, sys.a_mod_p(), fiber.c1.truncate(1), fiber.c2.truncate(1))
    return nf.nf(residual)


# ---------------------------------------------------------------------------
# point counting

def _poly_mul_mod(f, g, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if not fi:
            continue
        for j, gj in enumerate(g):
            if gj:
                out[i + j] = (out[i + j] + fi * gj) % p
    return out


def hasse_value(p, a, c):
    """A_{p-1}(c1, c2) mod p by direct univariate expansion (independent of
    the symbolic route: used as the second side of the congruence check)."""
    a1, a2, a3 = [x % p for x in a]
    c1, c2 = [x % p for x in c]
    f1 = [(c1 - a2 * c2) % p, 0, (a2 - a3) % p]
    f2 = [(-c1 + a1 * c2) % p, 0, (a3 - a1) % p]
    F = _poly_mul_mod(f1, f2, p)
    acc = [1]
    for _ in range((p - 1) // 2):
        acc = _poly_mul_mod(acc, F, p)
    return acc[p - 1] if len(acc) > p - 1 else 0


def count_points_and_ap(p, a, c):
    """Point count of the smooth quartic model y^2 = F(c1,c2,x) over F_p and
    the trace a_p = p + 1 - count."""
    a1, a2, a3 = [x % p for x in a]
    c1, c2 = [x % p for x in c]
    for ai in (a1, a2, a3):
        if (c1 - ai * c2) % p == 0:
            raise ValueError("degenerate quartic: N(c) is not a unit")
    squares = set(i * i % p for i in range(1, (p - 1) // 2 + 1))

    def chi(v):
        v %= p
        if v == 0:
            return 0
        return 1 if v in squares else -1

    def F(x):
        return ((a2 - a3) * x * x + c1 - a2 * c2) * \
               ((a3 - a1) * x * x - c1 + a1 * c2)

    count = p + sum(chi(F(x)) for x in range(p))
    lead = (a2 - a3) * (a3 - a1)
    count += 2 if chi(lead) == 1 else 0
    ap = p + 1 - count
    return count, ap
