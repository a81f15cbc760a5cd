"""Flows on charts.

A classical flow is a derivation given by its generator images plus a base
derivation on coefficients.  An arithmetic flow is a p-derivation given by
the images u_i with phi(x_i) = x_i^p + p u_i; phi extends to denominators by
a truncated geometric series, exact at the working precision.

Also here: Poisson structures (explicit brackets or Lie-Poisson from
structure constants), the symplectic-derived bracket on the sphere, Lax
flows with characteristic-polynomial prime integrals, and Euler-Lagrange
residuals for canonical flows.
"""

from __future__ import annotations

from .poly import MultiPoly, ChartElement, Zp
from .forms import DiffForm, elem_deriv, lie_derivative


class ClassicalFlow:
    """A derivation of the chart ring extending a base derivation."""

    def __init__(self, chart, images, base_deriv=None):
        self.chart = chart
        self.images = dict(images)
        # base_deriv maps a coefficient to its derivative; default is zero
        self.base_deriv = base_deriv

    def image(self, name):
        if name in self.images:
            return self.images[name]
        return self.chart.zero()

    def apply_poly(self, f):
        """Apply the derivation to a polynomial; result is a chart element."""
        out = self.chart.zero()
        for name in f.variables():
            u = self.image(name)
            out = out + self.chart.elem(f.deriv(name)) * u
        if self.base_deriv is not None:
            out = out + self.chart.elem(f.map_coeffs(self.base_deriv))
        return out

    def apply_elem(self, e):
        """Quotient rule over the declared denominator factors."""
        chart = self.chart
        out = self.apply_poly(e.num)
        out = ChartElement(chart, out.num, tuple(a + b for a, b in zip(out.den, e.den)))
        for i, f in enumerate(chart.factors):
            k = e.den[i]
            if not k:
                continue
            dfi = self.apply_poly(f)
            if dfi.is_zero():
                continue
            den = list(e.den)
            den[i] += 1
            term = ChartElement(chart, e.num * (-k), den) * dfi
            out = out + term
        return out


def check_prime_integral(flow, H):
    """Residual of the prime-integral condition.

    Classical flows: the derivation applied to H.  Arithmetic flows:
    phi(H) - H^p, which is p times the p-derivation of H.
    """
    if isinstance(flow, (ArithmeticFlow, ModPFrobenius)):
        return flow.phi_elem_or_poly(H) - flow.power_p(H)
    if isinstance(H, MultiPoly):
        return flow.apply_poly(H)
    return flow.apply_elem(H)


def is_canonical_flow(flow, pairs):
    """True iff the flow image of each base variable x is its jet partner x'."""
    for base, prolonged in pairs:
        if not flow.image(base) == flow.chart.var(prolonged):
            return False
    return True


# ---------------------------------------------------------------------------
# Poisson structures

class PoissonStructure:
    """Antisymmetric biderivation given by generator brackets."""

    def __init__(self, chart, brackets):
        """brackets maps ordered pairs (name_i, name_j) with i < j to elements."""
        self.chart = chart
        self.brackets = dict(brackets)

    @classmethod
    def lie_poisson(cls, chart, constants):
        """Linear bracket {x_i, x_j} = sum_k c_ijk x_k from structure constants.

        constants maps (i, j) with i < j to a dict {k: c_ijk} over variable
        names.
        """
        brackets = {}
        for (ni, nj), combo in constants.items():
            e = chart.zero()
            for nk, c in combo.items():
                e = e + chart.var(nk) * c
            brackets[(ni, nj)] = e
        return cls(chart, brackets)

    def generator_bracket(self, ni, nj):
        if ni == nj:
            return self.chart.zero()
        if (ni, nj) in self.brackets:
            return self.brackets[(ni, nj)]
        if (nj, ni) in self.brackets:
            return -self.brackets[(nj, ni)]
        return self.chart.zero()

    def bracket(self, f, g):
        if isinstance(f, MultiPoly):
            f = self.chart.elem(f)
        if isinstance(g, MultiPoly):
            g = self.chart.elem(g)
        out = self.chart.zero()
        for ni in self.chart.vars:
            dfi = elem_deriv(f, ni)
            if dfi.is_zero():
                continue
            for nj in self.chart.vars:
                if ni == nj:
                    continue
                dgj = elem_deriv(g, nj)
                if dgj.is_zero():
                    continue
                out = out + dfi * dgj * self.generator_bracket(ni, nj)
        return out

    def jacobi_defect(self, f, g, h):
        return (self.bracket(f, self.bracket(g, h))
                + self.bracket(g, self.bracket(h, f))
                + self.bracket(h, self.bracket(f, g)))


def poisson_from_symplectic(frame, f, g):
    """The bracket df^dg / eta on the sphere, via the dual bivector frame."""
    if isinstance(f, MultiPoly):
        f = frame.chart.elem(f)
    if isinstance(g, MultiPoly):
        g = frame.chart.elem(g)
    df = DiffForm.function(f).d()
    dg = DiffForm.function(g).d()
    return frame.contract_2form(df.wedge(dg))


def is_symplectic_hamiltonian(flow, eta, frame, sphere_nf):
    """True iff the Lie derivative of the symplectic form restricts to 0."""
    lied = lie_derivative(flow, eta)
    return sphere_nf.is_zero(frame.contract_2form(lied))


# ---------------------------------------------------------------------------
# arithmetic flows

class ArithmeticFlow:
    """A p-derivation on a chart with p-adic coefficients.

    Stored as the images u_i with phi(x_i) = x_i^p + p u_i; phi acts as the
    identity on coefficients.  phi of a denominator factor is inverted by a
    truncated geometric series, exact at the chart's precision.
    """

    def __init__(self, chart, images):
        if not isinstance(chart.ring, Zp):
            raise TypeError("arithmetic flows need a p-adic chart")
        self.chart = chart
        self.p = chart.ring.p
        self.prec = chart.ring.prec
        self.images = dict(images)
        self._phi_var = {}
        self._inv_phi_factor = {}

    def image(self, name):
        if name in self.images:
            return self.images[name]
        return self.chart.zero()

    def phi_var(self, name):
        if name not in self._phi_var:
            xp = self.chart.elem(
                MultiPoly.monomial(self.chart.ring.from_int(1), **{name: self.p}))
            self._phi_var[name] = xp + self.image(name) * self.p
        return self._phi_var[name]

    def phi_poly(self, f):
        """phi of a polynomial: substitute each variable by its phi image."""
        out = self.chart.zero()
        pow_cache = {}
        for key, c in f.terms.items():
            term = self.chart.const(c)
            for name, e in key:
                pk = (name, e)
                if pk not in pow_cache:
                    pow_cache[pk] = _elem_pow(self.phi_var(name), e)
                term = term * pow_cache[pk]
            out = out + term
        return out

    def delta_poly(self, f):
        """(phi(f) - f^p)/p; divisibility is structural and asserted."""
        diff = self.phi_poly(f) - self.chart.elem(f ** self.p)
        return diff.exact_div_p()

    def power_p(self, f):
        if isinstance(f, MultiPoly):
            return self.chart.elem(f ** self.p)
        return _elem_pow(f, self.p)

    def phi_elem_or_poly(self, f):
        if isinstance(f, MultiPoly):
            return self.phi_poly(f)
        return self.phi_elem(f)

    def inv_phi_factor(self, i):
        """1/phi(C) for the i-th denominator factor C, as a chart element.

        With g = delta(C)/C^p one has phi(C) = C^p(1 + p g), so the inverse
        is C^{-p} sum_{k<N} (-p g)^k; the tail vanishes mod p^N.
        """
        if i not in self._inv_phi_factor:
            chart = self.chart
            C = chart.factors[i]
            dC = self.delta_poly(C)
            shift = [0] * chart.nfac
            shift[i] = self.p
            g = ChartElement(chart, dC.num,
                             tuple(a + b for a, b in zip(dC.den, shift)))
            total = chart.one()
            term = chart.one()
            for _ in range(1, self.prec):
                term = term * g * (-self.p)
                if term.num.is_zero():
                    break
                total = total + term
            self._inv_phi_factor[i] = ChartElement(
                chart, total.num, tuple(a + b for a, b in zip(total.den, shift)))
        return self._inv_phi_factor[i]

    def phi_elem(self, e):
        out = self.phi_poly(e.num)
        for i, k in enumerate(e.den):
            if k:
                out = out * _elem_pow(self.inv_phi_factor(i), k)
        return out

    def reduce_mod_p(self):
        """The induced Frobenius on the mod-p chart (fast substitution path)."""
        images = {name: u.reduce_mod_p() for name, u in self.images.items()}
        return ModPFrobenius(self.chart.reduce_mod_p(), self.p, images)


class ModPFrobenius:
    """phi mod p: plain p-power Frobenius substitution on an F_p chart.

    Carries the mod-p flow images u_i so arithmetic pullbacks of forms can
    still be formed (the images enter through du_j, not through phi itself).
    """

    def __init__(self, chart, p, images):
        self.chart = chart
        self.p = p
        self.images = dict(images)

    def image(self, name):
        if name in self.images:
            return self.images[name]
        return self.chart.zero()

    def phi_poly(self, f):
        return ChartElement(self.chart, f.frobenius_exponents(self.p),
                            (0,) * self.chart.nfac)

    def phi_elem(self, e):
        return ChartElement(self.chart, e.num.frobenius_exponents(self.p),
                            tuple(k * self.p for k in e.den))

    def phi_elem_or_poly(self, f):
        if isinstance(f, MultiPoly):
            return self.phi_poly(f)
        return self.phi_elem(f)

    def power_p(self, f):
        if isinstance(f, MultiPoly):
            return self.chart.elem(f ** self.p)
        return _elem_pow(f, self.p)


def _elem_pow(e, n):
    result = e.chart.one()
    base = e
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


# ---------------------------------------------------------------------------
# Lax flows and characteristic polynomials

def mat_mul(A, B):
    n = len(A)
    m = len(B[0])
    inner = len(B)
    return [[sum((A[i][k] * B[k][j] for k in range(inner)),
                 start=_zero_like(A[i][0]))
             for j in range(m)] for i in range(n)]


def _zero_like(e):
    if isinstance(e, ChartElement):
        return e.chart.zero()
    return 0


def commutator(M, X):
    MX = mat_mul(M, X)
    XM = mat_mul(X, M)
    return [[MX[i][j] - XM[i][j] for j in range(len(X))] for i in range(len(X))]


def generic_matrix(chart, n, prefix="x"):
    """The matrix of chart coordinate variables x{i}{j} (1-based)."""
    return [[chart.var("%s%d%d" % (prefix, i + 1, j + 1)) for j in range(n)]
            for i in range(n)]


def lax_flow(chart, M, n, prefix="x"):
    """The flow delta x = [M, x] on a gl_n coordinate chart."""
    X = generic_matrix(chart, n, prefix)
    C = commutator(M, X)
    images = {}
    for i in range(n):
        for j in range(n):
            images["%s%d%d" % (prefix, i + 1, j + 1)] = C[i][j]
    return ClassicalFlow(chart, images)


def _det(mat):
    """Permutation-expansion determinant for small matrices."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def char_poly_coeffs(X):
    """P_1 .. P_n with det(s - X) = s^n - P_1 s^{n-1} + ... + (-1)^n P_n.

    P_j is the sum of the principal j x j minors (direct expansion, n <= 4).
    """
    n = len(X)
    out = []
    for j in range(1, n + 1):
        total = None
        for subset in _subsets(range(n), j):
            sub = [[X[i][k] for k in subset] for i in subset]
            d = _det(sub)
            total = d if total is None else total + d
        out.append(total)
    return out


def _subsets(pool, k):
    pool = list(pool)
    n = len(pool)
    if k == 0:
        yield ()
        return
    for i in range(n - k + 1):
        for rest in _subsets(pool[i + 1:], k - 1):
            yield (pool[i],) + rest


def isospectrality_defect(chart, M, n, j, prefix="x"):
    """The flow applied to P_j; identically zero for every Lax flow."""
    flow = lax_flow(chart, M, n, prefix)
    X = generic_matrix(chart, n, prefix)
    Pj = char_poly_coeffs(X)[j - 1]
    return flow.apply_elem(Pj)


# ---------------------------------------------------------------------------
# Euler-Lagrange residuals on a (x, x') chart

def euler_lagrange_form(flow, nu):
    """epsilon := the Lie derivative of the 1-form nu along the flow."""
    return lie_derivative(flow, nu)


def el_defect(flow, lagrangian, base="x", prolonged="x'"):
    """delta(dL/dx') - dL/dx for a canonical flow on the (x, x') chart."""
    if not is_canonical_flow(flow, [(base, prolonged)]):
        raise ValueError("Euler-Lagrange residual needs a canonical flow")
    if isinstance(lagrangian, MultiPoly):
        lagrangian = flow.chart.elem(lagrangian)
    dLdxp = elem_deriv(lagrangian, prolonged)
    dLdx = elem_deriv(lagrangian, base)
    return flow.apply_elem(dLdxp) - dLdx
