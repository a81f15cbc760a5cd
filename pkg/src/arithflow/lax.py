"""Arithmetic Lax constructions on GL_n over truncated p-adics.

Two Frobenius lifts on matrix charts: the eigenvalue lift (diagonalize,
raise the torus part and the conjugating matrix entrywise to the p-th
power) and the characteristic-polynomial lift (companion form with the
char-poly coefficients raised to the p-th power).  Both reduce to the
p-power Frobenius mod p; the second makes every P_j a delta-constant.
"""

from __future__ import annotations

from .padic import TruncatedPadic, is_delta_constant


class RepeatedEigenvalueError(ValueError):
    """Eigenvalues collide mod p; the eigenvalue chart does not apply."""


class NotRegularError(ValueError):
    """No cyclic vector mod p; the companion chart does not apply."""


class PMatrix:
    """A square matrix of TruncatedPadic entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        self.n = len(self.rows)
        for r in self.rows:
            if len(r) != self.n:
                raise ValueError("matrix must be square")

    @classmethod
    def identity(cls, n, p, prec):
        one = TruncatedPadic(p, prec, 1)
        zero = TruncatedPadic(p, prec, 0)
        return cls([[one if i == j else zero for j in range(n)]
                    for i in range(n)])

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        e0 = entries[0]
        zero = TruncatedPadic(e0.p, e0.prec, 0)
        return cls([[entries[i] if i == j else zero for j in range(n)]
                    for i in range(n)])

    @property
    def p(self):
        return self.rows[0][0].p

    @property
    def prec(self):
        return self.rows[0][0].prec

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __mul__(self, other):
        if isinstance(other, PMatrix):
            n = self.n
            return PMatrix([[sum((self.rows[i][k] * other.rows[k][j]
                                  for k in range(n)),
                                 start=TruncatedPadic(self.p, self.prec, 0))
                             for j in range(n)] for i in range(n)])
        return PMatrix([[e * other for e in r] for r in self.rows])

    def __add__(self, other):
        return PMatrix([[a + b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return PMatrix([[a - b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.rows, other.rows)])

    def __eq__(self, other):
        if not isinstance(other, PMatrix):
            return NotImplemented
        return self.n == other.n and all(
            a == b for r1, r2 in zip(self.rows, other.rows)
            for a, b in zip(r1, r2))

    def map_entries(self, fn):
        return PMatrix([[fn(e) for e in r] for r in self.rows])

    def inv(self):
        """Gauss-Jordan with unit pivots; never divides by p."""
        n = self.n
        aug = [list(r) + [TruncatedPadic(self.p, self.prec, 1 if i == j else 0)
                          for j in range(n)]
               for i, r in enumerate(self.rows)]
        for col in range(n):
            pivot = None
            for row in range(col, n):
                if aug[row][col].is_unit():
                    pivot = row
                    break
            if pivot is None:
                raise ZeroDivisionError("matrix is not invertible (no unit pivot)")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = aug[col][col].inv()
            aug[col] = [e * inv for e in aug[col]]
            for row in range(n):
                if row == col:
                    continue
                f = aug[row][col]
                if f.is_zero():
                    continue
                aug[row] = [e - f * g for e, g in zip(aug[row], aug[col])]
        return PMatrix([r[n:] for r in aug])

    def det(self):
        from .flows import _det
        return _det(self.rows)

    def trace(self):
        t = self.rows[0][0]
        for i in range(1, self.n):
            t = t + self.rows[i][i]
        return t

    def __repr__(self):
        return "PMatrix(%r)" % ([[e.val for e in r] for r in self.rows],)


def char_poly(x):
    """P_1 .. P_n with det(s - x) = sum_j (-1)^j P_j s^{n-j} (P_0 = 1);
    P_j is the sum of the principal j x j minors."""
    from .flows import char_poly_coeffs
    return char_poly_coeffs(x.rows)


def conj(h, g):
    """g^{-1} h g."""
    return g.inv() * h * g


def phi0_entrywise(g):
    """Entrywise p-th power; the Frobenius lift on the torus and on the
    coordinates of the conjugating copy of G."""
    return g.map_entries(lambda e: e.frobenius())


def _charpoly_eval(P, t):
    """det(t - x) = t^n - P_1 t^{n-1} + ... given the minor sums P."""
    n = len(P)
    val = t ** n
    sign = -1
    for j, Pj in enumerate(P, start=1):
        val = val + Pj * (t ** (n - j)) * sign
        sign = -sign
    return val


def _charpoly_deriv_eval(P, t):
    n = len(P)
    val = t ** (n - 1) * n
    sign = -1
    for j, Pj in enumerate(P, start=1):
        if n - j >= 1:
            val = val + Pj * (t ** (n - j - 1)) * (n - j) * sign
        sign = -sign
    return val


def eigen_split(x):
    """Write x = g^{-1} h g with h diagonal.

    Needs the char poly to split over the base with pairwise distinct roots
    mod p: roots are found by scanning residues and Hensel-lifted (the
    derivative is a unit at a simple root)."""
    n = x.n
    p, prec = x.p, x.prec
    P = char_poly(x)
    residues = []
    for r in range(p):
        t = TruncatedPadic(p, prec, r)
        if _charpoly_eval(P, t).truncate(1).is_zero():
            residues.append(r)
    if len(residues) < n:
        raise RepeatedEigenvalueError(
            "char poly has %d simple roots mod p, need %d" % (len(residues), n))
    roots = []
    for r in residues:
        t = TruncatedPadic(p, prec, r)
        d = _charpoly_deriv_eval(P, t)
        if not d.is_unit():
            raise RepeatedEigenvalueError("repeated eigenvalue mod p")
        for _ in range(prec):
            t = t - _charpoly_eval(P, t) * _charpoly_deriv_eval(P, t).inv()
        assert _charpoly_eval(P, t).is_zero()
        roots.append(t)
    # eigenvector for each root: kernel of (x - t), unit-pivot elimination
    cols = []
    for t in roots:
        m = [[x.rows[i][j] - (t if i == j else 0 * t) for j in range(n)]
             for i in range(n)]
        cols.append(_kernel_vector(m, p, prec))
    W = PMatrix([[cols[j][i] for j in range(n)] for i in range(n)])
    g = W.inv()
    h = PMatrix.diagonal(roots)
    assert conj(h, g) == x
    return h, g


def _kernel_vector(m, p, prec):
    """A kernel vector of a rank n-1 matrix over Z/p^N with a unit-normalized
    free coordinate."""
    n = len(m)
    m = [list(r) for r in m]
    pivots = {}
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, n):
            if m[r][col].is_unit():
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col].inv()
        m[row] = [e * inv for e in m[row]]
        for r in range(n):
            if r != row and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [e - f * g for e, g in zip(m[r], m[row])]
        pivots[col] = row
        row += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        raise RepeatedEigenvalueError("no kernel: eigenvalue is not exact")
    fc = free[0]
    one = TruncatedPadic(p, prec, 1)
    zero = TruncatedPadic(p, prec, 0)
    v = [zero] * n
    v[fc] = one
    for col, r in pivots.items():
        v[col] = -m[r][fc]
    return v


def frobenius_star(x):
    """The eigenvalue Frobenius lift: conjugation data maps through the
    entrywise p-th power."""
    h, g = eigen_split(x)
    hp = PMatrix.diagonal([h.rows[i][i].frobenius() for i in range(h.n)])
    return conj(hp, phi0_entrywise(g))


def _mat_vec(x, v):
    n = x.n
    return [sum((x.rows[i][k] * v[k] for k in range(n)),
                start=TruncatedPadic(x.p, x.prec, 0)) for i in range(n)]


def _cyclic_matrix(x, v):
    """Columns v, xv, ..., x^{n-1}v; None if not invertible."""
    n = x.n
    cols = [v]
    for _ in range(n - 1):
        cols.append(_mat_vec(x, cols[-1]))
    S = PMatrix([[cols[j][i] for j in range(n)] for i in range(n)])
    try:
        Sinv = S.inv()
    except ZeroDivisionError:
        return None, None
    return S, Sinv


def _companion(P, p, prec):
    """Companion matrix of s^n - P_1 s^{n-1} + ... + (-1)^n P_n."""
    n = len(P)
    zero = TruncatedPadic(p, prec, 0)
    one = TruncatedPadic(p, prec, 1)
    rows = [[zero] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = one
    # Cayley-Hamilton: x^n = sum_j (-1)^{j-1} P_j x^{n-j}
    for i in range(n):
        j = n - i
        rows[i][n - 1] = P[j - 1] if (j - 1) % 2 == 0 else -P[j - 1]
    return PMatrix(rows)


def frobenius_star_star(x, rng=None):
    """The char-poly Frobenius lift: companion-form conjugation data with
    each P_j raised to the p-th power."""
    n = x.n
    p, prec = x.p, x.prec
    one = TruncatedPadic(p, prec, 1)
    zero = TruncatedPadic(p, prec, 0)
    candidates = []
    for k in range(n):
        candidates.append([one if i <= k else zero for i in range(n)])
    S = Sinv = None
    for v in candidates:
        S, Sinv = _cyclic_matrix(x, v)
        if S is not None:
            break
    if S is None and rng is not None:
        for _ in range(50):
            v = [TruncatedPadic(p, prec, rng.randrange(p ** prec))
                 for _ in range(n)]
            S, Sinv = _cyclic_matrix(x, v)
            if S is not None:
                break
    if S is None:
        raise NotRegularError("no cyclic vector found mod p")
    P = char_poly(x)
    Cp = _companion([Pj.frobenius() for Pj in P], p, prec)
    return phi0_entrywise(S) * Cp * phi0_entrywise(S).inv()


def conjugate_lift(y, alpha):
    """epsilon^{-1} y epsilon with epsilon = 1 + p alpha (always invertible)."""
    eps = PMatrix.identity(y.n, y.p, y.prec) + alpha * TruncatedPadic(
        y.p, y.prec, y.p)
    return eps.inv() * y * eps


def spectrum_delta_constant_check(x):
    """For a fixed point of the eigenvalue lift: every eigenvalue must be a
    Teichmuller representative."""
    if not frobenius_star(x) == x:
        raise ValueError("input is not fixed by the eigenvalue Frobenius lift")
    h, _ = eigen_split(x)
    return all(is_delta_constant(h.rows[i][i]) for i in range(x.n))
