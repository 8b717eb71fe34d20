"""Matrix differential operators in normal form, acting on the right.

An operator is stored as ``sum_j d^j F_j(x)`` with square matrix coefficients
``F_j``. It acts on a matrix polynomial P from the right:

    P . D = sum_j P^(j)(x) F_j(x)

and consequently the product ``compose(A, B)`` is "apply A first, then B".
That convention matches the factorization D = V N in which V is applied
first, and it fixes all sign and ordering questions below:

    (d^i F)(d^j G) = sum_m binom(j, m) d^(i+m) F^(j-m) G.

The formal adjoint * is the involution fixing constant real matrices by
transposition and sending d to -d; the weight adjoint is computed from the
closed-form coefficient sum, with the non-rational scalar density cancelled
through its logarithmic derivative.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactalg import (
    DomainError,
    FracMat,
    MatRF,
    NonPolynomialError,
    Poly,
    RatFunc,
    ShapeError,
    frac,
    nonneg_integer_roots,
)

_P1 = Poly((1,))


# ---------------------------------------------------------------------------
# square matrices of polynomials


class MatPoly:
    """Square matrix with Poly entries (degree -1 when zero)."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows):
        self.rows = tuple(tuple(_as_p(c) for c in r) for r in rows)
        n = len(self.rows)
        if n < 1 or any(len(r) != n for r in self.rows):
            raise ShapeError("MatPoly must be square, size >= 1")
        self._hash = None

    @staticmethod
    def identity(n: int) -> "MatPoly":
        return MatPoly([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(n: int) -> "MatPoly":
        return MatPoly([[0] * n for _ in range(n)])

    @staticmethod
    def scalar(p: Poly, n: int) -> "MatPoly":
        return MatPoly([[p if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_const(m: FracMat) -> "MatPoly":
        return MatPoly([[Poly.const(c) for c in r] for r in m.rows])

    @property
    def size(self) -> int:
        return len(self.rows)

    def entry(self, i, j) -> Poly:
        return self.rows[i][j]

    @property
    def degree(self) -> int:
        return max(c.degree for r in self.rows for c in r)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for r in self.rows for c in r)

    def coeff(self, k: int) -> FracMat:
        return FracMat([[c[k] for c in r] for r in self.rows])

    def __eq__(self, other):
        if not isinstance(other, MatPoly):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __add__(self, other):
        if self.size != other.size:
            raise ShapeError("matrix size mismatch")
        return MatPoly([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MatPoly([[-c for c in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, MatPoly):
            if self.size != other.size:
                raise ShapeError("matrix size mismatch")
            bt = list(zip(*other.rows))
            return MatPoly([[_p_dot(row, col) for col in bt] for row in self.rows])
        if isinstance(other, (Poly, int, Fraction)):
            return MatPoly([[c * other for c in r] for r in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Poly, int, Fraction)):
            return MatPoly([[other * c for c in r] for r in self.rows])
        return NotImplemented

    def lmul_const(self, m: FracMat) -> "MatPoly":
        """m . self with a constant matrix on the left."""
        if m.nrows != m.ncols or m.nrows != self.size:
            raise ShapeError("matrix size mismatch")
        bt = list(zip(*self.rows))
        return MatPoly(
            [
                [sum((a * p for a, p in zip(mrow, col) if a), Poly()) for col in bt]
                for mrow in m.rows
            ]
        )

    def transpose(self) -> "MatPoly":
        return MatPoly(list(zip(*self.rows)))

    def derivative(self) -> "MatPoly":
        return MatPoly([[c.derivative() for c in r] for r in self.rows])

    def to_matrf(self) -> MatRF:
        return MatRF(self.rows)

    def __repr__(self):
        body = "; ".join(", ".join(str(c) for c in r) for r in self.rows)
        return f"MatPoly[{body}]"


def _as_p(v):
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, Fraction)):
        return Poly.const(v)
    if isinstance(v, RatFunc):
        return v.as_poly()
    raise TypeError(f"cannot coerce {v!r} to Poly")


def _p_dot(row, col):
    acc = Poly()
    for a, b in zip(row, col):
        if a.is_zero or b.is_zero:
            continue
        acc = acc + a * b
    return acc


def matrf_to_matpoly(m: MatRF) -> MatPoly:
    return MatPoly(m.poly_rows())


# ---------------------------------------------------------------------------
# operators


class DiffOp:
    """Normal-form operator sum_j d^j F_j with MatRF coefficients.

    The zero operator has an empty coefficient tuple and order -1.
    """

    __slots__ = ("size", "coeffs", "_hash", "_poly")

    def __init__(self, size: int, coeffs=()):
        cs = [c if isinstance(c, MatRF) else MatRF(c.rows) for c in coeffs]
        for c in cs:
            if c.size != size:
                raise ShapeError("coefficient size mismatch")
        while cs and cs[-1].is_zero:
            cs.pop()
        self.size = size
        self.coeffs = tuple(cs)
        self._hash = None
        self._poly = None

    # -- constructors

    @staticmethod
    def zero(size: int) -> "DiffOp":
        return DiffOp(size, ())

    @staticmethod
    def identity(size: int) -> "DiffOp":
        return DiffOp(size, (MatRF.identity(size),))

    @staticmethod
    def from_matrices(size: int, coeffs) -> "DiffOp":
        out = []
        for c in coeffs:
            if isinstance(c, MatPoly):
                c = c.to_matrf()
            out.append(c)
        return DiffOp(size, out)

    @staticmethod
    def scalar(coeffs) -> "DiffOp":
        """1x1 operator from a list of Poly/RatFunc coefficients by d-power."""
        return DiffOp(1, [MatRF([[c]]) for c in coeffs])

    @staticmethod
    def ddx(size: int = 1) -> "DiffOp":
        return DiffOp(size, (MatRF.zeros(size), MatRF.identity(size)))

    @staticmethod
    def const(m: FracMat) -> "DiffOp":
        return DiffOp(m.nrows, (MatRF([[Poly.const(c) for c in r] for r in m.rows]),))

    # -- structure

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> MatRF:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return MatRF.zeros(self.size)

    @property
    def is_polynomial(self) -> bool:
        return self.poly_coeffs() is not None

    def poly_coeffs(self) -> tuple[MatPoly, ...] | None:
        """Coefficients as MatPoly when every entry is polynomial, else None."""
        if self._poly is None:
            if all(c.is_polynomial for c in self.coeffs):
                self._poly = tuple(matrf_to_matpoly(c) for c in self.coeffs)
            else:
                self._poly = False
        return self._poly if self._poly is not False else None

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.size == other.size and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.size, self.coeffs))
        return self._hash

    # -- linear structure (scalar multiples commute with everything, so these
    #    are safe; any other product must go through compose)

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        if self.size != other.size:
            raise ShapeError("operator size mismatch")
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.size, [self.coeff(j) + other.coeff(j) for j in range(n)])

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return DiffOp(self.size, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = frac(other)
            return DiffOp(self.size, [m * c for m in self.coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        from .dsl import op_str  # local import; dsl depends on this module

        return f"DiffOp<{op_str(self)}>"


def apply(p: MatPoly, d: DiffOp):
    """Right action P . D = sum_j P^(j) F_j; MatPoly when D is polynomial."""
    if p.size != d.size:
        raise ShapeError("size mismatch in apply")
    polys = d.poly_coeffs()
    if polys is not None:
        acc = MatPoly.zeros(p.size)
        der = p
        for j, f in enumerate(polys):
            if j:
                der = der.derivative()
            if not f.is_zero:
                acc = acc + der * f
        return acc
    acc = MatRF.zeros(p.size)
    der = p
    for j, f in enumerate(d.coeffs):
        if j:
            der = der.derivative()
        if not f.is_zero:
            acc = acc + der.to_matrf() * f
    if acc.is_polynomial:
        return matrf_to_matpoly(acc)
    return acc


def compose(first: DiffOp, second: DiffOp) -> DiffOp:
    """Operator product: apply ``first``, then ``second``."""
    if first.size != second.size:
        raise ShapeError("size mismatch in compose")
    if first.is_zero or second.is_zero:
        return DiffOp.zero(first.size)
    n = first.size
    out: list[MatRF | None] = [None] * (first.order + second.order + 1)
    for j, g in enumerate(second.coeffs):
        if g.is_zero:
            continue
        for i, f in enumerate(first.coeffs):
            if f.is_zero:
                continue
            fder = f
            # m runs down from j so that fder is differentiated j-m times
            terms = []
            for k in range(j + 1):
                terms.append(fder)
                fder = fder.derivative()
            for m in range(j + 1):
                contrib = terms[j - m] * g * Fraction(math.comb(j, m))
                k = i + m
                out[k] = contrib if out[k] is None else out[k] + contrib
    return DiffOp(n, [MatRF.zeros(n) if c is None else c for c in out])


def op_power(d: DiffOp, k: int) -> DiffOp:
    if k < 0:
        raise DomainError("negative operator power")
    out = DiffOp.identity(d.size)
    for _ in range(k):
        out = compose(out, d)
    return out


def poly_of_op(p: Poly, d: DiffOp) -> DiffOp:
    """p(D) for a scalar polynomial p."""
    acc = DiffOp.zero(d.size)
    power = DiffOp.identity(d.size)
    for k in range(p.degree + 1):
        if p[k]:
            acc = acc + power * p[k]
        if k < p.degree:
            power = compose(power, d)
    return acc


def formal_star(d: DiffOp) -> DiffOp:
    """The involution sending d to -d and constant matrices to transposes.

    Over Q the Hermitian conjugate of a coefficient matrix is its transpose;
    the reordering of F* (-d)^j into normal form is a Leibniz expansion.
    """
    if d.is_zero:
        return d
    n = d.order
    out = []
    for m in range(n + 1):
        acc = MatRF.zeros(d.size)
        for j in range(m, n + 1):
            f = d.coeffs[j]
            if f.is_zero:
                continue
            t = f.transpose()
            for _ in range(j - m):
                t = t.derivative()
            sign = Fraction(-1) ** j
            acc = acc + t * (sign * math.comb(j, m))
        out.append(acc)
    return DiffOp(d.size, out)


def _twisted_derivative(r: MatRF, sigma: RatFunc) -> MatRF:
    # (rho R)' = rho (R' + sigma R) with sigma = rho'/rho
    return r.derivative() + r * sigma


def w_adjoint(d: DiffOp, weight) -> DiffOp:
    """Formal W-adjoint of d with respect to ``weight``.

    ``weight`` must expose ``sigma()`` (the logarithmic derivative of its
    scalar density, a RatFunc) and ``factor_matrix()`` (the rational matrix
    factor M with W = rho M). The density rho never appears: every occurrence
    enters through sigma.
    """
    if d.is_zero:
        return d
    sigma: RatFunc = weight.sigma()
    m: MatRF = weight.factor_matrix()
    if m.size != d.size:
        raise ShapeError("weight size does not match operator size")
    minv = m.inverse()
    n = d.order
    # twisted[l][t] = T_t(M F_l^*), built incrementally per l
    out = []
    twisted_rows: list[list[MatRF]] = []
    for l in range(n + 1):
        f = d.coeffs[l]
        seq = [m * f.transpose()]
        for _ in range(l):
            seq.append(_twisted_derivative(seq[-1], sigma))
        twisted_rows.append(seq)
    for k in range(n + 1):
        acc = MatRF.zeros(d.size)
        for l in range(k, n + 1):
            if d.coeffs[l].is_zero:
                continue
            sign = Fraction(-1) ** l
            acc = acc + twisted_rows[l][l - k] * (sign * math.comb(l, k))
        out.append(acc * minv)
    return DiffOp(d.size, out)


def op_order_lead(d: DiffOp) -> tuple[int, MatRF]:
    if d.is_zero:
        raise DomainError("zero operator has no order")
    return d.order, d.coeffs[-1]


class DegreeReport:
    """Outcome of the degree-preservation test, with a witness on failure."""

    __slots__ = ("ok", "reason", "witness_n", "symbol_det")

    def __init__(self, ok, reason=None, witness_n=None, symbol_det=None):
        self.ok = ok
        self.reason = reason
        self.witness_n = witness_n
        self.symbol_det = symbol_det

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"DegreeReport(ok={self.ok}, reason={self.reason!r}, witness_n={self.witness_n})"


def _falling_factorial(j: int) -> Poly:
    # n(n-1)...(n-j+1) as a polynomial in n
    out = Poly((1,))
    for t in range(j):
        out = out * Poly((-t, 1))
    return out


def degree_preserving(d: DiffOp) -> DegreeReport:
    """Decide whether P . d always has the degree of P.

    Criterion: every coefficient F_j is polynomial with deg F_j <= j, and the
    symbol S_n = sum_j (n)_j [x^j]F_j is nonsingular for every integer n >= 0.
    The unbounded quantifier over n is decided by taking det S_n as a
    polynomial in n and ruling out nonnegative integer roots.
    """
    if d.is_zero:
        return DegreeReport(False, reason="zero operator")
    polys = d.poly_coeffs()
    if polys is None:
        return DegreeReport(False, reason="non-polynomial coefficient")
    for j, f in enumerate(polys):
        if f.degree > j:
            return DegreeReport(False, reason=f"coefficient degree {f.degree} exceeds d-power {j}")
    # entries of S_n are polynomials in n; reuse MatRF with x standing for n
    n = d.size
    rows = [[RatFunc(Poly()) for _ in range(n)] for _ in range(n)]
    for j, f in enumerate(polys):
        top = f.coeff(j)
        if top.is_zero:
            continue
        fall = _falling_factorial(j)
        for r in range(n):
            for c in range(n):
                if top.entry(r, c):
                    rows[r][c] = rows[r][c] + RatFunc(fall * top.entry(r, c))
    det = MatRF(rows).det().as_poly()
    if det.is_zero:
        return DegreeReport(False, reason="symbol determinant vanishes identically", witness_n=0)
    roots = nonneg_integer_roots(det)
    if roots:
        return DegreeReport(
            False, reason=f"symbol singular at n = {roots[0]}", witness_n=roots[0], symbol_det=det
        )
    return DegreeReport(True, symbol_det=det)


# ---------------------------------------------------------------------------
# assembly helpers


def embed_scalar(t: DiffOp, size: int, i: int, j: int) -> DiffOp:
    """Place a 1x1 operator at cell (i, j) of a size x size operator."""
    if t.size != 1:
        raise ShapeError("embed_scalar expects a scalar operator")
    out = []
    for c in t.coeffs:
        rows = [[RatFunc(Poly()) for _ in range(size)] for _ in range(size)]
        rows[i][j] = c.entry(0, 0)
        out.append(MatRF(rows))
    return DiffOp(size, out)


def block_antidiagonal(v: DiffOp, n: DiffOp) -> DiffOp:
    """The operator (0 V / N 0), sized v.size + n.size."""
    if v.size != n.size:
        raise ShapeError("blocks must have equal size")
    s = v.size
    total = 2 * s
    out = []
    for j in range(max(len(v.coeffs), len(n.coeffs))):
        a = v.coeff(j)
        b = n.coeff(j)
        rows = [[RatFunc(Poly()) for _ in range(total)] for _ in range(total)]
        for r in range(s):
            for c in range(s):
                rows[r][s + c] = a.entry(r, c)
                rows[s + r][c] = b.entry(r, c)
        out.append(MatRF(rows))
    return DiffOp(total, out)


def block_diagonal(*ops: DiffOp) -> DiffOp:
    total = sum(o.size for o in ops)
    order = max((o.order for o in ops), default=-1)
    out = []
    for j in range(order + 1):
        rows = [[RatFunc(Poly()) for _ in range(total)] for _ in range(total)]
        off = 0
        for o in ops:
            c = o.coeff(j)
            for r in range(o.size):
                for cc in range(o.size):
                    rows[off + r][off + cc] = c.entry(r, cc)
            off += o.size
        out.append(MatRF(rows))
    return DiffOp(total, out)


def coefficient_sites(d: DiffOp):
    """Yield (j, row, col, power) for every stored nonzero x-power coefficient."""
    for j, f in enumerate(d.coeffs):
        for r in range(d.size):
            for c in range(d.size):
                e = f.entry(r, c)
                if not e.is_polynomial:
                    raise NonPolynomialError("coefficient sites require polynomial entries")
                p = e.as_poly()
                for k in range(p.degree + 1):
                    if p[k]:
                        yield (j, r, c, k)


def bump_coefficient(d: DiffOp, site, delta=1) -> DiffOp:
    """Return d with the rational coefficient at ``site`` shifted by delta."""
    j, r, c, k = site
    out = []
    for jj, f in enumerate(d.coeffs):
        if jj != j:
            out.append(f)
            continue
        rows = [list(row) for row in f.rows]
        p = rows[r][c].as_poly()
        rows[r][c] = RatFunc(p + Poly.monomial(k, delta))
        out.append(MatRF(rows))
    return DiffOp(d.size, out)


def diff_cells(a: DiffOp, b: DiffOp) -> list[tuple[int, int, int]]:
    """Cells (d-power, row, col) where the two operators disagree."""
    if a.size != b.size:
        raise ShapeError("operator size mismatch")
    cells = []
    for j in range(max(len(a.coeffs), len(b.coeffs))):
        fa, fb = a.coeff(j), b.coeff(j)
        for r in range(a.size):
            for c in range(a.size):
                if fa.entry(r, c) != fb.entry(r, c):
                    cells.append((j, r, c))
    return cells
