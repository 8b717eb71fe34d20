"""Membership in the eigenoperator algebra of a weight, symmetry, Darboux
certificates, intertwiner search, module generators and decomposition, and
the classification of direct sums of classical scalar weights.

Every verification here is an exact statement about rational data: a check
either holds coefficient-for-coefficient or fails with a witness (the first
offending index n and the nonzero residual). Searches are linear algebra
over Q and are reported as bounded evidence, never as nonexistence proofs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import (
    DecompositionError,
    DomainError,
    FracMat,
    MatRF,
    Poly,
    ShapeError,
    X,
    nullspace,
)
from .diffop import (
    DiffOp,
    MatPoly,
    apply,
    block_antidiagonal,
    compose,
    degree_preserving,
    op_power,
)
from .weights import (
    HermiteShifted,
    Jacobi,
    Laguerre,
    ScalarWeightFamily,
    Weight,
    sequence_for,
)


# ---------------------------------------------------------------------------
# report plumbing


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def __bool__(self):
        return self.ok


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append(CheckResult(name, bool(ok), detail))

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(CheckResult(prefix + c.name, c.ok, c.detail))

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def __bool__(self):
        return self.ok


def _family_of(w) -> ScalarWeightFamily:
    if isinstance(w, ScalarWeightFamily):
        return w
    if isinstance(w, Weight):
        return w.scalar_family()
    raise TypeError(f"expected a scalar weight, got {w!r}")


def _weight_of(w) -> Weight:
    if isinstance(w, ScalarWeightFamily):
        return w.scalar_weight()
    return w


# ---------------------------------------------------------------------------
# membership and eigenvalues


@dataclass
class EigenData:
    op: DiffOp
    eigs: list[FracMat]


@dataclass
class MembershipReport:
    ok: bool
    eigs: list[FracMat] | None = None
    fail_n: int | None = None
    residual: object = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def verify_in_DW(d: DiffOp, weight: Weight, n_max: int = 8) -> MembershipReport:
    """Check P_n . d = Lambda_n P_n for n <= n_max, extracting Lambda_n from
    the degree-n coefficient (the sequence is monic)."""
    weight = _weight_of(weight)
    if d.size != weight.size:
        raise ShapeError("operator and weight sizes differ")
    seq = sequence_for(weight)
    eigs: list[FracMat] = []
    for n in range(n_max + 1):
        p = seq.poly(n)
        r = apply(p, d)
        if isinstance(r, MatRF):
            return MembershipReport(
                False, fail_n=n, residual=r, detail=f"non-polynomial action at n={n}"
            )
        lam = r.coeff(n)
        resid = r - p.lmul_const(lam)
        if not resid.is_zero:
            return MembershipReport(
                False, fail_n=n, residual=resid, detail=f"not an eigenfunction at n={n}"
            )
        eigs.append(lam)
    return MembershipReport(True, eigs=eigs)


def eigen_data(d: DiffOp, weight: Weight, n_max: int = 8) -> EigenData:
    rep = verify_in_DW(d, weight, n_max)
    if not rep.ok:
        raise DomainError(f"operator is not in the algebra: {rep.detail}")
    return EigenData(d, rep.eigs)


def lambda_multiplicativity_check(d1: DiffOp, d2: DiffOp, weight: Weight, n_max: int = 8) -> bool:
    """Lambda_n(d1 d2) = Lambda_n(d1) Lambda_n(d2), a consequence of the right action."""
    r1 = verify_in_DW(d1, weight, n_max)
    r2 = verify_in_DW(d2, weight, n_max)
    rp = verify_in_DW(compose(d1, d2), weight, n_max)
    if not (r1.ok and r2.ok and rp.ok):
        return False
    return all(rp.eigs[n] == r1.eigs[n] * r2.eigs[n] for n in range(n_max + 1))


# ---------------------------------------------------------------------------
# symmetry


@dataclass
class SymmetryReport:
    ok: bool
    residuals: dict[int, MatRF] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def symmetry_check(d: DiffOp, weight: Weight) -> SymmetryReport:
    """Coefficient identities equivalent to W-symmetry.

    For each 0 <= k <= n the alternating binomial sum of derivatives of
    F_{n-j} W must equal W F_k^*; both sides are conjugated by W on the right
    so that the scalar density cancels through its logarithmic derivative.
    """
    weight = _weight_of(weight)
    if d.is_zero:
        return SymmetryReport(True)
    fam, m = weight.as_atomic()
    if m.size != d.size:
        raise ShapeError("operator and weight sizes differ")
    sigma = fam.sigma()
    minv = m.inverse()
    n = d.order
    twisted: list[list[MatRF]] = []
    for l in range(n + 1):
        seq = [d.coeffs[l] * m]
        for _ in range(l):
            prev = seq[-1]
            seq.append(prev.derivative() + prev * sigma)
        twisted.append(seq)
    residuals = {}
    for k in range(n + 1):
        acc = MatRF.zeros(d.size)
        for j in range(n - k + 1):
            l = n - j
            sign = Fraction(-1) ** l
            term = twisted[l][l - k] * (sign * _binom(l, k))
            acc = acc + term
        lhs = acc * minv
        rhs = m * d.coeffs[k].transpose() * minv
        resid = lhs - rhs
        if not resid.is_zero:
            residuals[k] = resid
    return SymmetryReport(not residuals, residuals)


def _binom(n, k):
    import math

    return math.comb(n, k)


# ---------------------------------------------------------------------------
# intertwiners between scalar weights


@dataclass
class IntertwineReport:
    ok: bool
    lambdas: list[Fraction] | None = None
    fail_n: int | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def intertwiner_verify(t: DiffOp, w1, w2, n_max: int = 8) -> IntertwineReport:
    """Check p_n^{w1} . t = lambda_n p_n^{w2} with scalar lambda_n (0 allowed)."""
    f1, f2 = _family_of(w1), _family_of(w2)
    if t.size != 1:
        raise ShapeError("intertwiner must be a scalar operator")
    s1 = sequence_for(f1.scalar_weight())
    s2 = sequence_for(f2.scalar_weight())
    lambdas = []
    for n in range(n_max + 1):
        r = apply(s1.poly(n), t)
        if isinstance(r, MatRF):
            return IntertwineReport(False, fail_n=n, detail=f"non-polynomial action at n={n}")
        rp = r.entry(0, 0)
        lam = rp[n]
        if rp != lam * s2.poly(n).entry(0, 0):
            return IntertwineReport(False, fail_n=n, detail=f"not proportional at n={n}")
        lambdas.append(lam)
    return IntertwineReport(True, lambdas=lambdas)


@dataclass
class IntertwinerBasis:
    w1: ScalarWeightFamily
    w2: ScalarWeightFamily
    order_bound: int
    degree_slack: int
    basis: tuple[DiffOp, ...]
    refused: bool = False
    reason: str = ""
    horizon: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    def describe(self) -> str:
        if self.refused:
            return f"refused structurally: {self.reason}"
        if not self.basis:
            return (
                f"no intertwiner up to order {self.order_bound}, slack "
                f"{self.degree_slack} (bounded evidence, not a nonexistence proof)"
            )
        from .dsl import op_scalar_str

        return "basis [" + "; ".join(op_scalar_str(t) for t in self.basis) + "]"


def _search_linear_space(
    seq1, seq2, size: int, order_bound: int, degree_slack: int, horizon: int
) -> list[DiffOp]:
    """Basis of {T of order <= K, deg F_j <= j + slack : P_n . T = C_n Pt_n, n <= horizon}.

    The extraction C_n := [x^n](P_n . T) is itself linear in T, so the whole
    condition is one homogeneous rational linear system.
    """
    variables = [
        (j, i, r, c)
        for j in range(order_bound + 1)
        for i in range(j + degree_slack + 1)
        for r in range(size)
        for c in range(size)
    ]
    index = {v: k for k, v in enumerate(variables)}
    nvars = len(variables)
    rows = []
    for n in range(horizon + 1):
        p = seq1.poly(n)
        pt = seq2.poly(n)
        derivs = [p]
        for _ in range(order_bound):
            derivs.append(derivs[-1].derivative())

        def coeff_rows(t):
            # linear form of [x^t](P_n . T), entry (r, c), as a vector over vars
            out = [[None] * size for _ in range(size)]
            for r in range(size):
                for c in range(size):
                    vec = [Fraction(0)] * nvars
                    for (j, i, e, cc), k in index.items():
                        if cc != c:
                            continue
                        vec[k] = derivs[j].entry(r, e)[t - i] if t - i >= 0 else Fraction(0)
                    out[r][c] = vec
                    continue
            return out

        top = coeff_rows(n)  # C_n entries
        for t in range(n + degree_slack + 1):
            cur = coeff_rows(t) if t != n else None
            for r in range(size):
                for c in range(size):
                    if t == n:
                        continue
                    vec = list(cur[r][c])
                    # subtract (C_n Pt_n)_{rc} coefficient of x^t
                    for e in range(size):
                        q = pt.entry(e, c)[t]
                        if q:
                            tvec = top[r][e]
                            for k in range(nvars):
                                if tvec[k]:
                                    vec[k] -= q * tvec[k]
                    if any(vec):
                        rows.append(vec)
    basis_vecs = nullspace(rows, nvars)
    ops = []
    for v in basis_vecs:
        coeffs = []
        for j in range(order_bound + 1):
            rws = [[Poly() for _ in range(size)] for _ in range(size)]
            for i in range(j + degree_slack + 1):
                for r in range(size):
                    for c in range(size):
                        val = v[index[(j, i, r, c)]]
                        if val:
                            rws[r][c] = rws[r][c] + Poly.monomial(i, val)
            coeffs.append(MatRF(rws))
        op = DiffOp(size, coeffs)
        if not op.is_zero:
            ops.append(_normalize_op(op))
    return ops


def _normalize_op(op: DiffOp) -> DiffOp:
    lead = op.coeffs[-1]
    scale = None
    for r in range(op.size):
        for c in range(op.size):
            e = lead.entry(r, c)
            if not e.is_zero:
                p = e.as_poly()
                scale = p.lc
    if scale is None or scale == 1:
        return op
    return op * (1 / scale)


def intertwiner_search(
    w1, w2, order_bound: int, degree_slack: int = 0, n_horizon: int | None = None
) -> IntertwinerBasis:
    """All scalar operators of bounded order/degree carrying one orthogonal
    family to the other, found by exact nullspace computation.

    An empty basis means "none up to this order and slack"; it is bounded
    evidence, not a nonexistence proof. Pairs whose density ratio is not a
    rational function are refused structurally: their module is zero.
    """
    f1, f2 = _family_of(w1), _family_of(w2)
    if n_horizon is None:
        n_horizon = order_bound + degree_slack + 3
    if n_horizon < order_bound + degree_slack + 3:
        raise DomainError("search horizon too small for the ansatz")
    from .weights import density_ratio

    if density_ratio(f1, f2) is None:
        return IntertwinerBasis(
            f1, f2, order_bound, degree_slack, (), refused=True,
            reason="density ratio is not rational: the module is zero",
            horizon=n_horizon,
        )
    s1 = sequence_for(f1.scalar_weight())
    s2 = sequence_for(f2.scalar_weight())
    ops = _search_linear_space(s1, s2, 1, order_bound, degree_slack, n_horizon)
    verified = tuple(t for t in ops if intertwiner_verify(t, f1, f2, n_horizon + 5).ok)
    return IntertwinerBasis(f1, f2, order_bound, degree_slack, verified, horizon=n_horizon)


def matrix_intertwiner_verify(v: DiffOp, w1: Weight, w2: Weight, n_max: int = 8) -> bool:
    """P_n . v = C_n Pt_n with any constant matrices C_n, checked exactly."""
    s1, s2 = sequence_for(w1), sequence_for(w2)
    for n in range(n_max + 1):
        r = apply(s1.poly(n), v)
        if isinstance(r, MatRF):
            return False
        cn = r.coeff(n)
        if r != s2.poly(n).lmul_const(cn):
            return False
    return True


def matrix_intertwiner_search(
    w1: Weight, w2: Weight, order_bound: int, degree_slack: int = 0,
    n_horizon: int | None = None,
) -> list[DiffOp]:
    """Matrix analogue of the bounded intertwiner search (used as evidence
    about factorizations between matrix weights)."""
    if w1.size != w2.size:
        raise ShapeError("weights must have equal size")
    if n_horizon is None:
        n_horizon = order_bound + degree_slack + 3
    s1, s2 = sequence_for(w1), sequence_for(w2)
    ops = _search_linear_space(s1, s2, w1.size, order_bound, degree_slack, n_horizon)
    return [v for v in ops if matrix_intertwiner_verify(v, w1, w2, n_horizon + 3)]


# ---------------------------------------------------------------------------
# module generators and decomposition


def module_generator(w1, w2) -> DiffOp:
    """Cyclic generator of the intertwiner right-module between two classical
    scalar weights: the zero operator when they are not Darboux related, the
    identity when equal, and the explicit first-order ladder products
    otherwise."""
    f1, f2 = _family_of(w1), _family_of(w2)
    zero = DiffOp.zero(1)
    if type(f1) is not type(f2):
        return zero
    if f1 == f2:
        return DiffOp.identity(1)
    if isinstance(f1, HermiteShifted):
        return zero
    if isinstance(f1, Laguerre):
        d = f2.alpha - f1.alpha
        if d.denominator != 1:
            return zero
        k = int(d)
        if k > 0:
            step = DiffOp.scalar([Poly((-1,)), Poly((1,))])
            return op_power(step, k)
        k = -k
        out = None
        for j in range(k, 0, -1):
            nj = DiffOp.scalar([Poly((f2.alpha + j,)), X])
            out = nj if out is None else compose(out, nj)
        return out
    if f1.alpha + f1.beta != f2.alpha + f2.beta:
        return zero
    d = f2.alpha - f1.alpha
    if d.denominator != 1:
        return zero
    k = int(d)
    out = None
    if k > 0:
        for j in range(k, 0, -1):
            vj = DiffOp.scalar([Poly((f2.beta + j,)), Poly((1, 1))])
            out = vj if out is None else compose(out, vj)
        return out
    for j in range(-k, 0, -1):
        nj = DiffOp.scalar([Poly((f2.alpha + j,)), Poly((-1, 1))])
        out = nj if out is None else compose(out, nj)
    return out


def module_decompose(a: DiffOp, w1, w2) -> Poly:
    """Write a = T p(delta_{w2}) with T the module generator; degree descent
    on leading coefficients, raising DecompositionError with the residual
    when a leaves the cyclic module."""
    f1, f2 = _family_of(w1), _family_of(w2)
    t = module_generator(f1, f2)
    if t.is_zero:
        raise DecompositionError("module generator is zero for this pair")
    if a.size != 1:
        raise ShapeError("module decomposition applies to scalar operators")
    delta = f2.delta()
    coeffs: dict[int, Fraction] = {}
    r = a
    torder = t.order
    while not r.is_zero:
        o = r.order
        if o < torder or (o - torder) % 2 != 0:
            raise DecompositionError(
                f"residual of order {o} cannot be matched by generator of order {torder}",
                residual=r,
            )
        m = (o - torder) // 2
        base = compose(t, op_power(delta, m))
        lead_r = r.coeffs[-1].entry(0, 0)
        lead_b = base.coeffs[-1].entry(0, 0)
        ratio = lead_r / lead_b
        if not (ratio.is_polynomial and ratio.num.degree <= 0):
            raise DecompositionError("leading coefficients are not proportional", residual=r)
        c = ratio.num[0]
        coeffs[m] = c
        r = r - base * c
        if not r.is_zero and r.order >= o:
            raise DecompositionError("descent failed to reduce the order", residual=r)
    if not coeffs:
        return Poly()
    deg = max(coeffs)
    return Poly([coeffs.get(m, Fraction(0)) for m in range(deg + 1)])


# ---------------------------------------------------------------------------
# Darboux certificates


@dataclass
class DarbouxCertificate:
    """The data realizing a Darboux transformation: D = V N in the algebra of
    W, with P_n . V = A_n Pt_n carrying the sequence of W onto that of Wt."""

    W: Weight
    Wt: Weight
    V: DiffOp
    Nn: DiffOp
    D: DiffOp
    n_max: int = 8
    conjugators: list[FracMat] = field(default_factory=list)


def darboux_verify(cert: DarbouxCertificate) -> Report:
    rep = Report()
    w, wt = _weight_of(cert.W), _weight_of(cert.Wt)
    seq = sequence_for(w)
    seqt = sequence_for(wt)
    n_max = cert.n_max

    composed = compose(cert.V, cert.Nn)
    rep.add(
        "factorization D = V N",
        composed == cert.D,
        "" if composed == cert.D else _diff_detail(composed, cert.D),
    )

    mem = verify_in_DW(cert.D, w, n_max)
    rep.add("D in algebra of W", mem.ok, mem.detail)

    dv = degree_preserving(cert.V)
    dn = degree_preserving(cert.Nn)
    rep.add(
        "V and N degree-preserving",
        dv.ok and dn.ok,
        "; ".join(s for s in (dv.reason, dn.reason) if s),
    )

    conj: list[FracMat] = []
    ok4 = True
    detail4 = ""
    for n in range(n_max + 1):
        q = apply(seq.poly(n), cert.V)
        if isinstance(q, MatRF):
            ok4, detail4 = False, f"non-polynomial image at n={n}"
            break
        an = q.coeff(n)
        if q != seqt.poly(n).lmul_const(an):
            ok4, detail4 = False, f"P_{n} . V is not a multiple of Pt_{n}"
            break
        if an.det() == 0:
            ok4, detail4 = False, f"conjugator A_{n} is singular"
            break
        conj.append(an)
    rep.add("P_n . V = A_n Pt_n with A_n nonsingular", ok4, detail4)
    cert.conjugators = conj

    memt = verify_in_DW(compose(cert.Nn, cert.V), wt, n_max)
    rep.add("N V in algebra of Wt", memt.ok, memt.detail)

    ok6 = ok4 and mem.ok
    detail6 = "" if ok6 else "skipped: prerequisites failed"
    if ok6:
        for n in range(n_max + 1):
            r = apply(seqt.poly(n), cert.Nn)
            expected = seq.poly(n).lmul_const(conj[n].inv() * mem.eigs[n])
            if not isinstance(r, MatPoly) or r != expected:
                ok6, detail6 = False, f"reverse relation fails at n={n}"
                break
    rep.add("Pt_n . N = A_n^-1 Lambda_n(D) P_n", ok6, detail6)

    block = block_antidiagonal(cert.V, cert.Nn)
    bw = Weight.direct_sum([w, wt])
    memb = verify_in_DW(block, bw, n_max)
    rep.add("antidiagonal block operator in algebra of W (+) Wt", memb.ok, memb.detail)
    return rep


def operator_mismatch_detail(a: DiffOp, b: DiffOp, limit: int = 4) -> str:
    """Name the differing (d-power, row, col) cells with both sides."""
    from .diffop import diff_cells

    cells = diff_cells(a, b)[:limit]
    parts = []
    for (j, r, c) in cells:
        parts.append(
            f"d^{j} cell ({r},{c}): {a.coeff(j).entry(r, c)} vs {b.coeff(j).entry(r, c)}"
        )
    return "; ".join(parts)


_diff_detail = operator_mismatch_detail


# ---------------------------------------------------------------------------
# classification of scalar weights and their direct sums


def scalar_darboux_class(f1, f2) -> bool:
    """Same Darboux-equivalence class: Hermite needs equal shifts; Laguerre an
    integer parameter difference; Jacobi an equal parameter sum and an integer
    difference. Mixed families are never equivalent."""
    f1, f2 = _family_of(f1), _family_of(f2)
    if type(f1) is not type(f2):
        return False
    if isinstance(f1, HermiteShifted):
        return f1.b == f2.b
    if isinstance(f1, Laguerre):
        return (f1.alpha - f2.alpha).denominator == 1
    return (
        f1.alpha + f1.beta == f2.alpha + f2.beta
        and (f1.alpha - f2.alpha).denominator == 1
    )


def _scalar_blocks(w: Weight) -> list[ScalarWeightFamily]:
    out = []
    for b in w.flat_blocks():
        out.append(b.scalar_family())
    return out


def diag_darboux_match(w: Weight, wt: Weight) -> tuple[int, ...] | None:
    """A permutation sigma with wt_j ~ w_{sigma(j)} for all j, or None.

    First-found matching in lexicographic order; any valid permutation
    certifies the pairing condition.
    """
    fs = _scalar_blocks(_weight_of(w))
    fts = _scalar_blocks(_weight_of(wt))
    if len(fs) != len(fts):
        raise ShapeError("direct sums have different lengths")
    n = len(fs)
    used = [False] * n
    sigma: list[int] = []

    def backtrack(j: int) -> bool:
        if j == n:
            return True
        for i in range(n):
            if not used[i] and scalar_darboux_class(fts[j], fs[i]):
                used[i] = True
                sigma.append(i)
                if backtrack(j + 1):
                    return True
                used[i] = False
                sigma.pop()
        return False

    if backtrack(0):
        return tuple(sigma)
    return None


def commutativity_predicate(w: Weight) -> bool:
    """The algebra of a direct sum of classical scalar weights is commutative
    exactly when no two blocks are Darboux related."""
    fams = _scalar_blocks(_weight_of(w))
    for i in range(len(fams)):
        for j in range(len(fams)):
            if i != j and scalar_darboux_class(fams[i], fams[j]):
                return False
    return True


# ---------------------------------------------------------------------------
# fullness


def fullness_check(
    weight: Weight, ds: list[DiffOp], generators: list[DiffOp], n_max: int = 8
) -> Report:
    """Orthogonal system evidence: pairwise products vanish, the sum is
    central against the supplied generators, and the sum is not a zero
    divisor (symbol nonsingularity, or nonsingular eigenvalues up to n_max)."""
    rep = Report()
    weight = _weight_of(weight)
    for i in range(len(ds)):
        for j in range(len(ds)):
            if i == j:
                continue
            prod = compose(ds[i], ds[j])
            rep.add(f"product D{i + 1} D{j + 1} = 0", prod.is_zero)
    total = ds[0]
    for d in ds[1:]:
        total = total + d
    for k, g in enumerate(generators):
        rep.add(
            f"sum commutes with generator {k + 1}",
            compose(total, g) == compose(g, total),
        )
    dp = degree_preserving(total)
    if dp.ok:
        rep.add("sum is not a zero divisor", True, "symbol nonsingular for every n >= 0")
    else:
        mem = verify_in_DW(total, weight, n_max)
        ok = mem.ok and all(e.det() != 0 for e in mem.eigs)
        rep.add(
            "sum is not a zero divisor",
            ok,
            f"eigenvalue determinants nonzero for n <= {n_max}" if ok else mem.detail,
        )
    return rep
