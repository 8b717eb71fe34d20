"""Operators: right action, composition, adjoints, degree preservation."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mvop.exactalg import DomainError, MatRF, Poly, RatFunc, ShapeError, X
from mvop.diffop import (
    DiffOp,
    MatPoly,
    apply,
    block_antidiagonal,
    bump_coefficient,
    coefficient_sites,
    compose,
    degree_preserving,
    embed_scalar,
    formal_star,
    op_order_lead,
    op_power,
    w_adjoint,
)
from mvop.weights import HermiteShifted, Jacobi, Laguerre, Weight, classical_monic

ALPHA = F(1, 2)


def lag_v():
    return DiffOp.scalar([Poly((-1,)), Poly((1,))])  # d - 1


def lag_n(alpha=ALPHA):
    return DiffOp.scalar([Poly((alpha + 1,)), X])  # d x + alpha + 1


class TestApply:
    def test_identity_action(self):
        p = MatPoly([[X**2, X], [Poly((1,)), Poly()]])
        assert apply(p, DiffOp.identity(2)) == p

    def test_scalar_example(self):
        # x . (d - 1) = 1 - x
        out = apply(MatPoly([[X]]), lag_v())
        assert out == MatPoly([[Poly((1, -1))]])

    def test_laguerre_ladder_degree_one(self):
        # l_1 with parameter alpha maps to minus l_1 with parameter alpha + 1
        l1 = classical_monic(Laguerre(ALPHA), 1)
        assert l1 == Poly((-(ALPHA + 1), 1))
        out = apply(MatPoly([[l1]]), lag_v()).entry(0, 0)
        assert out == -1 * classical_monic(Laguerre(ALPHA + 1), 1)

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            apply(MatPoly.identity(2), lag_v())


class TestCompose:
    def test_laguerre_factorization(self):
        # (d - 1)(d x + alpha + 1) = delta_alpha - (alpha + 1)
        got = compose(lag_v(), lag_n())
        want = Laguerre(ALPHA).delta() - (ALPHA + 1) * DiffOp.identity(1)
        assert got == want

    def test_laguerre_reverse_factorization(self):
        # (d x + alpha + 1)(d - 1) = delta_{alpha+1} - (alpha + 1)
        got = compose(lag_n(), lag_v())
        want = Laguerre(ALPHA + 1).delta() - (ALPHA + 1) * DiffOp.identity(1)
        assert got == want

    def test_identity_neutral(self):
        d = Jacobi(F(1, 2), F(3, 4)).delta()
        assert compose(d, DiffOp.identity(1)) == d
        assert compose(DiffOp.identity(1), d) == d

    @given(st.data())
    @settings(max_examples=20, deadline=None)
    def test_apply_compose_consistency(self, data):
        size = data.draw(st.integers(1, 3))
        p = _random_matpoly(data, size, 4)
        a = _random_op(data, size, 3)
        b = _random_op(data, size, 3)
        lhs = apply(p, compose(a, b))
        rhs = apply(_as_matpoly(apply(p, a), size), b)
        assert lhs == rhs

    @given(st.data())
    @settings(max_examples=15, deadline=None)
    def test_compose_associative(self, data):
        size = data.draw(st.integers(1, 2))
        a = _random_op(data, size, 2)
        b = _random_op(data, size, 2)
        c = _random_op(data, size, 2)
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def _random_matpoly(data, size, maxdeg):
    rows = [
        [Poly(data.draw(st.lists(st.integers(-2, 2), max_size=maxdeg + 1))) for _ in range(size)]
        for _ in range(size)
    ]
    return MatPoly(rows)


def _random_op(data, size, maxorder):
    order = data.draw(st.integers(0, maxorder))
    return DiffOp(
        size,
        [_random_matpoly(data, size, 2).to_matrf() for _ in range(order + 1)],
    )


def _as_matpoly(v, size):
    if isinstance(v, MatPoly):
        return v
    from mvop.diffop import matrf_to_matpoly

    return matrf_to_matpoly(v)


class TestFormalStar:
    def test_d_negates(self):
        assert formal_star(DiffOp.ddx(2)) == -1 * DiffOp.ddx(2)

    def test_constant_transposes(self):
        c = DiffOp(2, [MatRF([[Poly((1,)), X * 0 + Poly((2,))], [Poly((3,)), Poly((4,))]])])
        got = formal_star(c)
        assert got.coeff(0).entry(0, 1) == RatFunc(Poly((3,)))

    def test_square_of_ladder(self):
        # ((d-1)^2)* = (d+1)^2 = d^2 + 2d + 1
        got = formal_star(op_power(lag_v(), 2))
        want = DiffOp.scalar([Poly((1,)), Poly((2,)), Poly((1,))])
        assert got == want

    @given(st.data())
    @settings(max_examples=15, deadline=None)
    def test_involution_and_antihomomorphism(self, data):
        size = data.draw(st.integers(1, 2))
        a = _random_op(data, size, 2)
        b = _random_op(data, size, 2)
        assert formal_star(formal_star(a)) == a
        assert formal_star(compose(a, b)) == compose(formal_star(b), formal_star(a))


class TestWAdjoint:
    def test_classical_operator_self_adjoint(self):
        fam = Laguerre(ALPHA)
        assert w_adjoint(fam.delta(), fam.scalar_weight()) == fam.delta()

    def test_block_adjoint_shape(self):
        # adjoint of (0 T / 0 0) over w_a (+) w_{a+1} puts w2 T* w1^{-1} in the
        # lower corner: here -(d x + alpha + 1)
        t = lag_v()
        block = embed_scalar(t, 2, 0, 1)
        w = Weight.of_scalars(Laguerre(ALPHA), Laguerre(ALPHA + 1))
        dag = w_adjoint(block, w)
        want = embed_scalar(-1 * lag_n(), 2, 1, 0)
        assert dag == want

    def test_constant_diagonal_fixed(self):
        c = DiffOp(2, [MatRF.diag(Poly((2,)), Poly((3,)))])
        w = Weight.of_scalars(Laguerre(ALPHA), Laguerre(ALPHA))
        assert w_adjoint(c, w) == c

    def test_involution_on_catalog_operators(self):
        from mvop.catalog import ENTRY_NAMES, entry

        for name in ENTRY_NAMES:
            e = entry(name)
            for op in e.ops.values():
                if op.size != e.weight_W.size:
                    continue
                assert w_adjoint(w_adjoint(op, e.weight_W), e.weight_W) == op
                if e.weight_Wt is not None:
                    assert w_adjoint(w_adjoint(op, e.weight_Wt), e.weight_Wt) == op

    def test_antihomomorphism_on_catalog_pairs(self):
        from mvop.catalog import entry

        e = entry("JAC2")
        w = e.weight_Wt
        d1, d2 = e.ops["D1"], e.ops["D2"]
        assert w_adjoint(compose(d1, d2), w) == compose(w_adjoint(d2, w), w_adjoint(d1, w))
        lag2 = entry("LAG2DIAG")
        g5, g6 = lag2.ops["G5"], lag2.ops["G6"]
        ww = lag2.weight_W
        assert w_adjoint(compose(g5, g6), ww) == compose(w_adjoint(g6, ww), w_adjoint(g5, ww))

    @given(st.data())
    @settings(max_examples=10, deadline=None)
    def test_involution_on_random_operators(self, data):
        # the double adjoint is the identity for arbitrary coefficients, not
        # just algebra members
        w = Weight.atomic(
            Jacobi(F(1, 2), F(3, 4)),
            MatRF([[Poly((2,)), X], [X, Poly((1, 0, 1))]]),
        )
        d = _random_op(data, 2, 2)
        assert w_adjoint(w_adjoint(d, w), w) == d


class TestOrderLead:
    def test_jacobi_delta(self):
        order, lead = op_order_lead(Jacobi(F(1, 2), F(3, 4)).delta())
        assert order == 2
        assert lead == MatRF([[RatFunc(Poly((1, 0, -1)))]])

    def test_laguerre_ladder_products(self):
        from mvop.dwalgebra import module_generator

        for k in (1, 2, 3):
            t = module_generator(Laguerre(ALPHA + k), Laguerre(ALPHA))
            order, lead = op_order_lead(t)
            assert order == k
            assert lead == MatRF([[RatFunc(X**k)]])

    def test_constant(self):
        order, lead = op_order_lead(DiffOp.identity(2))
        assert order == 0 and lead == MatRF.identity(2)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            op_order_lead(DiffOp.zero(1))


class TestDegreePreserving:
    def test_ladder_down(self):
        rep = degree_preserving(lag_v())
        assert rep.ok

    def test_ladder_up(self):
        rep = degree_preserving(lag_n())
        assert rep.ok

    def test_bare_second_derivative(self):
        rep = degree_preserving(DiffOp.scalar([Poly(), Poly(), Poly((1,))]))
        assert not rep.ok

    def test_witness_for_integer_root(self):
        # symbol n - 2 vanishes at the nonnegative integer 2
        op = DiffOp.scalar([Poly((-2,)), X])
        rep = degree_preserving(op)
        assert not rep.ok and rep.witness_n == 2

    def test_degree_violation(self):
        op = DiffOp.scalar([X**2])
        rep = degree_preserving(op)
        assert not rep.ok and "degree" in rep.reason

    def test_catalog_factors_preserve_degrees(self):
        # consequence: monomials keep their degree and monic images keep a
        # nonsingular leading coefficient, up to degree 12
        from mvop.catalog import entry
        from mvop.weights import sequence_for

        for name in ("JAC2", "GEG2", "LAG3", "HER3"):
            e = entry(name)
            seq = sequence_for(e.weight_W)
            for op in (e.ops["V"], e.ops["N"]):
                assert degree_preserving(op).ok
                for n in range(13):
                    xn = MatPoly.scalar(X**n, op.size)
                    img = apply(xn, op)
                    assert img.degree == n
                    pn = apply(seq.poly(n), op)
                    assert pn.coeff(n).det() != 0


class TestAssembly:
    def test_block_antidiagonal_layout(self):
        b = block_antidiagonal(lag_v(), lag_n())
        assert b.size == 2
        assert b.coeff(1).entry(0, 1) == RatFunc(Poly((1,)))
        assert b.coeff(1).entry(1, 0) == RatFunc(X)

    def test_bump_round_trip(self):
        d = lag_n()
        sites = list(coefficient_sites(d))
        assert sites
        mutated = bump_coefficient(d, sites[0])
        assert mutated != d
        assert bump_coefficient(mutated, sites[0], -1) == d
