"""Classical scalar weight families, matrix weights, moments and monic
orthogonal polynomial sequences.

A matrix weight is stored as a classical scalar density rho times a square
rational matrix factor M (``Atomic``), or a direct sum of weights. All inner
products are normalized by the zeroth moment of the base density, which keeps
every value in Q; orthogonality and nonsingularity statements are unaffected
by a positive global factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactalg import (
    DomainError,
    FracMat,
    MatRF,
    NonPolynomialError,
    Poly,
    RatFunc,
    ShapeError,
    X,
    frac,
)
from .diffop import DiffOp, MatPoly, matrf_to_matpoly


# ---------------------------------------------------------------------------
# scalar families


class ScalarWeightFamily:
    """Base for the three classical families (shifted Hermite, Laguerre, Jacobi)."""

    def scalar_weight(self) -> "Weight":
        return Weight.atomic(self, MatRF.identity(1))


@dataclass(frozen=True)
class HermiteShifted(ScalarWeightFamily):
    """exp(-x^2 + 2 b x) on the real line."""

    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", frac(self.b))

    def delta(self) -> DiffOp:
        return DiffOp.scalar([Poly(), Poly((2 * self.b, -2)), Poly((1,))])

    def sigma(self) -> RatFunc:
        return RatFunc(Poly((2 * self.b, -2)))

    def recursion(self, n: int) -> tuple[Fraction, Fraction]:
        return self.b, Fraction(n, 2)

    def support_key(self) -> str:
        return "real-line"

    def sample_points(self, k: int = 16):
        return [Fraction(-3) + Fraction(6 * i, k + 1) for i in range(1, k + 1)]

    def moment_step(self, s: int, values) -> Fraction:
        # mu_{s+1} = b mu_s + (s/2) mu_{s-1}, from d/dx[x^s rho] integrating to 0
        prev = values[s - 1] if s >= 1 else Fraction(0)
        return self.b * values[s] + Fraction(s, 2) * prev


@dataclass(frozen=True)
class Laguerre(ScalarWeightFamily):
    """exp(-x) x^alpha on (0, infinity), alpha > -1."""

    alpha: Fraction

    def __post_init__(self):
        a = frac(self.alpha)
        if a <= -1:
            raise DomainError(f"Laguerre parameter must exceed -1, got {a}")
        object.__setattr__(self, "alpha", a)

    def delta(self) -> DiffOp:
        return DiffOp.scalar([Poly(), Poly((self.alpha + 1, -1)), X])

    def sigma(self) -> RatFunc:
        return RatFunc(Poly((self.alpha, -1)), X)

    def recursion(self, n: int) -> tuple[Fraction, Fraction]:
        a = self.alpha
        return 2 * n + a + 1, Fraction(n) * (n + a)

    def support_key(self) -> str:
        return "half-line"

    def sample_points(self, k: int = 16):
        return [Fraction(8 * i, k + 1) for i in range(1, k + 1)]

    def moment_step(self, s: int, values) -> Fraction:
        # Gamma recursion: mu_{s+1} = (alpha + 1 + s) mu_s
        return (self.alpha + 1 + s) * values[s]


@dataclass(frozen=True)
class Jacobi(ScalarWeightFamily):
    """(1-x)^alpha (1+x)^beta on (-1, 1), alpha, beta > -1."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        a, b = frac(self.alpha), frac(self.beta)
        if a <= -1 or b <= -1:
            raise DomainError(f"Jacobi parameters must exceed -1, got ({a}, {b})")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def delta(self) -> DiffOp:
        a, b = self.alpha, self.beta
        return DiffOp.scalar([Poly(), Poly((b - a, -(a + b + 2))), Poly((1, 0, -1))])

    def sigma(self) -> RatFunc:
        a, b = self.alpha, self.beta
        return RatFunc(Poly((b - a, -(a + b))), Poly((1, 0, -1)))

    def recursion(self, n: int) -> tuple[Fraction, Fraction]:
        a, b = self.alpha, self.beta
        if n == 0:
            bn = (b - a) / (a + b + 2)
        else:
            bn = (b - a) * (b + a) / ((2 * n + a + b) * (2 * n + a + b + 2))
        if n == 0:
            cn = Fraction(0)
        elif n == 1:
            # the (n + a + b) factor cancels (2n + a + b - 1) at n = 1
            cn = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
        else:
            cn = (
                4
                * n
                * (n + a)
                * (n + b)
                * (n + a + b)
                / ((2 * n + a + b) ** 2 * (2 * n + a + b + 1) * (2 * n + a + b - 1))
            )
        return bn, cn

    def support_key(self) -> str:
        return "interval"

    def sample_points(self, k: int = 16):
        return [Fraction(-1) + Fraction(2 * i, k + 1) for i in range(1, k + 1)]

    def moment_step(self, s: int, values) -> Fraction:
        # integration by parts of d/dx[(1-x)^(a+1) (1+x)^(b+1) x^s]
        a, b = self.alpha, self.beta
        prev = values[s - 1] if s >= 1 else Fraction(0)
        return ((b - a) * values[s] + s * prev) / (a + b + 2 + s)


def classical_delta(family: ScalarWeightFamily) -> DiffOp:
    return family.delta()


def scalar_recursion(family: ScalarWeightFamily, n: int) -> tuple[Fraction, Fraction]:
    if n < 0:
        raise DomainError("recursion index must be nonnegative")
    return family.recursion(n)


def density_ratio(f1: ScalarWeightFamily, f2: ScalarWeightFamily) -> RatFunc | None:
    """f1/f2 as a rational function, or None when the ratio is not rational."""
    if type(f1) is not type(f2):
        return None
    if isinstance(f1, HermiteShifted):
        return RatFunc(Poly((1,))) if f1.b == f2.b else None
    if isinstance(f1, Laguerre):
        d = f1.alpha - f2.alpha
        if d.denominator != 1:
            return None
        k = int(d)
        return RatFunc(X**k) if k >= 0 else RatFunc(Poly((1,)), X ** (-k))
    da = f1.alpha - f2.alpha
    db = f1.beta - f2.beta
    if da.denominator != 1 or db.denominator != 1:
        return None
    ka, kb = int(da), int(db)
    num, den = Poly((1,)), Poly((1,))
    one_minus, one_plus = Poly((1, -1)), Poly((1, 1))
    num = (one_minus ** max(ka, 0)) * (one_plus ** max(kb, 0))
    den = (one_minus ** max(-ka, 0)) * (one_plus ** max(-kb, 0))
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# normalized moments


@dataclass(frozen=True)
class MomentTable:
    """Normalized power moments nu_s = mu_s / mu_0 of a scalar family."""

    family: ScalarWeightFamily
    values: tuple[Fraction, ...]

    def __getitem__(self, s: int) -> Fraction:
        return self.values[s]


_MOMENT_CACHE: dict[ScalarWeightFamily, list[Fraction]] = {}


def _moments_list(family: ScalarWeightFamily, s_max: int) -> list[Fraction]:
    cached = _MOMENT_CACHE.get(family)
    if cached is not None and len(cached) > s_max:
        return cached
    # nu_s is the (0,0) entry of the s-th power of the truncated monic Jacobi
    # matrix; a row vector times J, iterated, keeps this O(s_max^2)
    size = s_max + 1
    bs = []
    cs = []
    for n in range(size):
        b, c = family.recursion(n)
        bs.append(b)
        cs.append(c)
    u = [Fraction(0)] * size
    u[0] = Fraction(1)
    values = [Fraction(1)]
    for _ in range(s_max):
        nxt = [Fraction(0)] * size
        for i, ui in enumerate(u):
            if not ui:
                continue
            nxt[i] += ui * bs[i]
            if i + 1 < size:
                nxt[i + 1] += ui  # superdiagonal 1 in the monic normalization
            if i - 1 >= 0:
                nxt[i - 1] += ui * cs[i]
        u = nxt
        values.append(u[0])
    _MOMENT_CACHE[family] = values
    return values


def normalized_moments(family: ScalarWeightFamily, s_max: int) -> MomentTable:
    if s_max < 0:
        raise DomainError("s_max must be nonnegative")
    return MomentTable(family, tuple(_moments_list(family, s_max)[: s_max + 1]))


def closed_moments(family: ScalarWeightFamily, s_max: int) -> list[Fraction]:
    """Moments from the family's closed one-step recurrence (cross-check path)."""
    values = [Fraction(1)]
    for s in range(s_max):
        values.append(family.moment_step(s, values))
    return values


# ---------------------------------------------------------------------------
# weights


class Weight:
    """Either Atomic(family, M) with W = rho_family * M, or a direct sum."""

    __slots__ = ("family", "M", "blocks", "_hash", "_atomic")

    def __init__(self, family=None, M=None, blocks=None):
        self.family = family
        self.M = M
        self.blocks = blocks
        self._hash = None
        self._atomic = None

    @staticmethod
    def atomic(family: ScalarWeightFamily, M: MatRF) -> "Weight":
        if M.size < 1:
            raise ShapeError("weight matrix factor must have size >= 1")
        if M != M.transpose():
            raise DomainError("matrix factor must be symmetric")
        if M.det().is_zero:
            raise DomainError("matrix factor is singular as a rational matrix")
        w = Weight(family=family, M=M)
        w._positivity_spot_check()
        return w

    @staticmethod
    def direct_sum(blocks) -> "Weight":
        blocks = tuple(blocks)
        if not blocks:
            raise ShapeError("direct sum needs at least one block")
        keys = {b.support_key() for b in blocks}
        if len(keys) != 1:
            raise DomainError("direct sum blocks must share a support interval")
        if len(blocks) == 1:
            return blocks[0]
        return Weight(blocks=blocks)

    @staticmethod
    def of_scalars(*families: ScalarWeightFamily) -> "Weight":
        return Weight.direct_sum([f.scalar_weight() for f in families])

    # -- structure

    @property
    def is_atomic(self) -> bool:
        return self.blocks is None

    @property
    def size(self) -> int:
        if self.is_atomic:
            return self.M.size
        return sum(b.size for b in self.blocks)

    def support_key(self) -> str:
        if self.is_atomic:
            return self.family.support_key()
        return self.blocks[0].support_key()

    def flat_blocks(self) -> list["Weight"]:
        if self.is_atomic:
            return [self]
        out = []
        for b in self.blocks:
            out.extend(b.flat_blocks())
        return out

    def scalar_family(self) -> ScalarWeightFamily:
        """The family of a 1x1 weight with trivial factor."""
        if not (self.is_atomic and self.size == 1 and self.M == MatRF.identity(1)):
            raise DomainError("not a plain scalar classical weight")
        return self.family

    def __eq__(self, other):
        if not isinstance(other, Weight):
            return NotImplemented
        return (self.family, self.M, self.blocks) == (other.family, other.M, other.blocks)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.family, self.M, self.blocks))
        return self._hash

    def __repr__(self):
        if self.is_atomic:
            return f"Weight({self.family!r} * {self.M!r})"
        return "Weight(" + " (+) ".join(repr(b) for b in self.blocks) + ")"

    # -- common atomic form

    def as_atomic(self) -> tuple[ScalarWeightFamily, MatRF]:
        """Rewrite as a single (family, M) pair with one base density.

        Direct sums are merged through rational density ratios relative to
        the minimal parameters; Hermite blocks with distinct shifts have a
        non-rational ratio and raise NonPolynomialError.
        """
        if self._atomic is not None:
            return self._atomic
        if self.is_atomic:
            self._atomic = (self.family, self.M)
            return self._atomic
        parts = self.flat_blocks()
        fams = [p.family for p in parts]
        kinds = {type(f) for f in fams}
        if len(kinds) != 1:
            raise NonPolynomialError("direct sum mixes weight families")
        kind = kinds.pop()
        if kind is HermiteShifted:
            shifts = {f.b for f in fams}
            if len(shifts) != 1:
                raise NonPolynomialError(
                    "Hermite blocks with distinct shifts have no common rational density"
                )
            base = fams[0]
        elif kind is Laguerre:
            amin = min(f.alpha for f in fams)
            if any((f.alpha - amin).denominator != 1 for f in fams):
                raise NonPolynomialError("Laguerre parameters differ by a non-integer")
            base = Laguerre(amin)
        else:
            amin = min(f.alpha for f in fams)
            bmin = min(f.beta for f in fams)
            if any(
                (f.alpha - amin).denominator != 1 or (f.beta - bmin).denominator != 1
                for f in fams
            ):
                raise NonPolynomialError("Jacobi parameters differ by a non-integer")
            base = Jacobi(amin, bmin)
        total = self.size
        rows = [[RatFunc(Poly()) for _ in range(total)] for _ in range(total)]
        off = 0
        for part in parts:
            ratio = density_ratio(part.family, base)
            for r in range(part.size):
                for c in range(part.size):
                    rows[off + r][off + c] = part.M.entry(r, c) * ratio
            off += part.size
        self._atomic = (base, MatRF(rows))
        return self._atomic

    def sigma(self) -> RatFunc:
        return self.as_atomic()[0].sigma()

    def factor_matrix(self) -> MatRF:
        return self.as_atomic()[1]

    # -- validation

    def _positivity_spot_check(self):
        # ratio > 0 on the open support, so positive definiteness of W(x) at a
        # rational sample point is exactly positivity of M(x)'s leading minors
        pts = self.family.sample_points()
        for x in pts:
            try:
                m = self.M.eval(x)
            except DomainError:
                m = self.M.eval(x + Fraction(1, 997))
            n = m.nrows
            for k in range(1, n + 1):
                sub = FracMat([row[:k] for row in m.rows[:k]])
                if sub.det() <= 0:
                    raise DomainError(
                        f"weight factor not positive definite at sample x = {x}"
                    )


# ---------------------------------------------------------------------------
# monic orthogonal polynomial sequences


class OPSequence:
    """Monic orthogonal polynomials of a weight, with recursion data.

    Construction memoizes inside the object (build-then-share: one thread
    extends, any number may read afterwards).
    """

    def __init__(self, weight: Weight):
        self.weight = weight
        self._polys: list[MatPoly] = []
        self._B: list[FracMat] = []
        self._C: list[FracMat] = []
        self._children: list[OPSequence] | None = None
        self._scalar: list[Poly] | None = None
        self._mode = self._pick_mode()

    def _pick_mode(self) -> str:
        w = self.weight
        if not w.is_atomic:
            self._children = [sequence_for(b) for b in w.blocks]
            return "blocks"
        if w.M == MatRF.identity(w.size):
            self._scalar = []
            return "scalar"
        return "hankel"

    # -- public access

    def poly(self, n: int) -> MatPoly:
        if n < 0:
            return MatPoly.zeros(self.weight.size)
        self._extend(n)
        return self._polys[n]

    def recursion_pair(self, n: int) -> tuple[FracMat, FracMat]:
        self._extend(n + 1)
        return self._B[n], self._C[n]

    # -- construction

    def _extend(self, n: int):
        while len(self._polys) <= n:
            k = len(self._polys)
            if self._mode == "scalar":
                self._extend_scalar(k)
            elif self._mode == "blocks":
                self._extend_blocks(k)
            else:
                self._extend_hankel(k)

    def _extend_scalar(self, k: int):
        fam = self.weight.family
        if k == 0:
            self._scalar.append(Poly((1,)))
        else:
            b, c = fam.recursion(k - 1)
            p = (X - Poly.const(b)) * self._scalar[k - 1]
            if k >= 2:
                p = p - c * self._scalar[k - 2]
            self._scalar.append(p)
        b, c = fam.recursion(k)
        n = self.weight.size
        self._polys.append(MatPoly.scalar(self._scalar[k], n))
        self._B.append(FracMat([[b if i == j else 0 for j in range(n)] for i in range(n)]))
        self._C.append(FracMat([[c if i == j else 0 for j in range(n)] for i in range(n)]))

    def _extend_blocks(self, k: int):
        parts = [child.poly(k) for child in self._children]
        recs = [child.recursion_pair(k) for child in self._children]
        self._polys.append(_blockdiag_poly(parts))
        self._B.append(_blockdiag_frac([r[0] for r in recs]))
        self._C.append(_blockdiag_frac([r[1] for r in recs]))

    def _extend_hankel(self, k: int):
        size = self.weight.size
        p = self._solve_hankel(k)
        self._polys.append(p)
        # three-term data B_{k-1}, C_{k-1} become available once P_k exists
        if k >= 1:
            n = k - 1
            pn, pn1 = self._polys[n], self._polys[k]
            xpn = MatPoly.scalar(X, size) * pn
            rest = xpn - pn1
            bn = rest.coeff(n)
            rest = rest - pn.lmul_const(bn)
            cn = rest.coeff(n - 1) if n >= 1 else FracMat.zeros(size)
            recon = pn1 + pn.lmul_const(bn)
            if n >= 1:
                recon = recon + self._polys[n - 1].lmul_const(cn)
            if recon != xpn:
                raise DomainError("three-term recursion failed to close exactly")
            self._B.append(bn)
            self._C.append(cn)

    def _solve_hankel(self, n: int) -> MatPoly:
        from .exactalg import solve_square

        size = self.weight.size
        if n == 0:
            return MatPoly.identity(size)
        s = self._moment  # S_m
        dim = n * size
        a = [[Fraction(0)] * dim for _ in range(dim)]
        for j in range(n):
            for c in range(size):
                for k in range(n):
                    mat = s(k + j)
                    for e in range(size):
                        a[j * size + c][k * size + e] = mat.entry(e, c)
        b = [[Fraction(0)] * size for _ in range(dim)]
        for j in range(n):
            mat = s(n + j)
            for c in range(size):
                for r in range(size):
                    b[j * size + c][r] = -mat.entry(r, c)
        try:
            sol = solve_square(a, b)
        except Exception as exc:
            from .exactalg import SingularError

            raise SingularError(f"degenerate moment system at degree {n}") from exc
        rows = [[Poly.monomial(n, 1) if r == c else Poly() for c in range(size)] for r in range(size)]
        for k in range(n):
            for r in range(size):
                for e in range(size):
                    coef = sol[k * size + e][r]
                    if coef:
                        rows[r][e] = rows[r][e] + Poly.monomial(k, coef)
        return MatPoly(rows)

    def _moment(self, m: int) -> FracMat:
        fam, mat = self.weight.as_atomic()
        if not mat.is_polynomial:
            raise NonPolynomialError("moment computation requires a polynomial factor")
        mp = matrf_to_matpoly(mat)
        deg = mp.degree
        nu = _moments_list(fam, m + deg)
        size = self.weight.size
        acc = FracMat.zeros(size)
        for sdeg in range(deg + 1):
            coeffmat = mp.coeff(sdeg)
            if not coeffmat.is_zero:
                acc = acc + coeffmat * nu[m + sdeg]
        return acc


def _blockdiag_poly(parts: list[MatPoly]) -> MatPoly:
    total = sum(p.size for p in parts)
    rows = [[Poly() for _ in range(total)] for _ in range(total)]
    off = 0
    for p in parts:
        for r in range(p.size):
            for c in range(p.size):
                rows[off + r][off + c] = p.entry(r, c)
        off += p.size
    return MatPoly(rows)


def _blockdiag_frac(parts: list[FracMat]) -> FracMat:
    total = sum(p.nrows for p in parts)
    rows = [[Fraction(0)] * total for _ in range(total)]
    off = 0
    for p in parts:
        for r in range(p.nrows):
            for c in range(p.ncols):
                rows[off + r][off + c] = p.entry(r, c)
        off += p.nrows
    return FracMat(rows)


_SEQUENCE_CACHE: dict[Weight, OPSequence] = {}


def sequence_for(weight: Weight) -> OPSequence:
    seq = _SEQUENCE_CACHE.get(weight)
    if seq is None:
        seq = OPSequence(weight)
        _SEQUENCE_CACHE[weight] = seq
    return seq


def monic_ops(weight: Weight, n_max: int = 8) -> OPSequence:
    """The unique monic orthogonal sequence, materialized up to n_max."""
    seq = sequence_for(weight)
    seq.poly(n_max)
    return seq


def classical_monic(family: ScalarWeightFamily, n: int) -> Poly:
    """Monic classical polynomial of the scalar family (zero for n < 0)."""
    if n < 0:
        return Poly()
    p = sequence_for(family.scalar_weight()).poly(n)
    return p.entry(0, 0)


# ---------------------------------------------------------------------------
# inner products


def inner_product(p: MatPoly, q: MatPoly, weight: Weight) -> FracMat:
    """<P, Q> = integral P W Q^T, normalized by the base density's mass.

    Requires the merged factor matrix to be polynomial, so that the integrand
    expands into power moments.
    """
    if p.size != q.size or p.size != weight.size:
        raise ShapeError("inner product size mismatch")
    fam, mat = weight.as_atomic()
    if not mat.is_polynomial:
        raise NonPolynomialError("weight factor has non-polynomial entries after merging")
    integrand = p * matrf_to_matpoly(mat) * q.transpose()
    deg = integrand.degree
    if deg < 0:
        return FracMat.zeros(p.size)
    nu = _moments_list(fam, deg)
    acc = FracMat.zeros(p.size)
    for s in range(deg + 1):
        c = integrand.coeff(s)
        if not c.is_zero:
            acc = acc + c * nu[s]
    return acc
