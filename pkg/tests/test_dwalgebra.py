"""Algebra membership, symmetry, intertwiners, Darboux machinery and the
classification of direct sums."""

import random
from fractions import Fraction as F

import pytest

from mvop.exactalg import DecompositionError, FracMat, Poly, ShapeError, X
from mvop.diffop import (
    DiffOp,
    MatPoly,
    apply,
    compose,
    embed_scalar,
    op_power,
    poly_of_op,
    w_adjoint,
)
from mvop.weights import HermiteShifted, Jacobi, Laguerre, Weight, sequence_for
from mvop.dwalgebra import (
    DarbouxCertificate,
    commutativity_predicate,
    darboux_verify,
    diag_darboux_match,
    fullness_check,
    intertwiner_search,
    intertwiner_verify,
    lambda_multiplicativity_check,
    matrix_intertwiner_verify,
    module_decompose,
    module_generator,
    scalar_darboux_class,
    symmetry_check,
    verify_in_DW,
)

ALPHA = F(1, 2)
LAG = Laguerre(ALPHA)
DDX = DiffOp.ddx(1)


class TestMembership:
    def test_laguerre_delta_eigenvalues(self):
        rep = verify_in_DW(LAG.delta(), LAG.scalar_weight(), 10)
        assert rep.ok
        assert [m.entry(0, 0) for m in rep.eigs] == [-n for n in range(11)]

    def test_jac2_second_order_lower_triangular(self):
        from mvop.catalog import entry

        e = entry("JAC2")
        rep = verify_in_DW(e.ops["D1"], e.weight_Wt, 8)
        assert rep.ok
        for lam in rep.eigs:
            assert lam.entry(0, 1) == 0  # lower triangular 2x2

    def test_bare_derivative_rejected(self):
        rep = verify_in_DW(DDX, LAG.scalar_weight(), 4)
        assert not rep.ok and rep.fail_n == 1

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            verify_in_DW(DiffOp.identity(2), LAG.scalar_weight(), 2)


class TestLambdaMultiplicativity:
    def test_delta_squared(self):
        w = LAG.scalar_weight()
        assert lambda_multiplicativity_check(LAG.delta(), LAG.delta(), w, 8)
        rep = verify_in_DW(compose(LAG.delta(), LAG.delta()), w, 8)
        assert [m.entry(0, 0) for m in rep.eigs] == [n * n for n in range(9)]

    def test_identity_neutral(self):
        w = LAG.scalar_weight()
        assert lambda_multiplicativity_check(LAG.delta(), DiffOp.identity(1), w, 6)

    def test_commuting_catalog_pair(self):
        from mvop.catalog import entry

        e = entry("JAC2")
        assert lambda_multiplicativity_check(e.ops["D1"], e.ops["D2"], e.weight_Wt, 6)


class TestSymmetry:
    def test_jacobi_delta_symmetric(self):
        fam = Jacobi(F(1, 2), F(3, 4))
        assert symmetry_check(fam.delta(), fam.scalar_weight()).ok

    def test_catalog_second_order_symmetric(self):
        from mvop.catalog import entry

        e = entry("JAC2")
        assert symmetry_check(e.ops["D2"], e.weight_Wt).ok

    def test_shifted_derivative_not_symmetric(self):
        op = DiffOp.scalar([X, Poly((1,))])  # d + x
        rep = symmetry_check(op, LAG.scalar_weight())
        assert not rep.ok and 1 in rep.residuals

    def test_agrees_with_adjoint_fixed_point(self):
        from mvop.catalog import entry

        e = entry("JAC2")
        for name in ("D1", "D2"):
            op = e.ops[name]
            fixed = w_adjoint(op, e.weight_Wt) == op
            assert symmetry_check(op, e.weight_Wt).ok == fixed


class TestIntertwinerVerify:
    def test_laguerre_ladder(self):
        t = DiffOp.scalar([Poly((-1,)), Poly((1,))])
        rep = intertwiner_verify(t, LAG, Laguerre(ALPHA + 1), 10)
        assert rep.ok and set(rep.lambdas) == {F(-1)}

    def test_jacobi_ladder(self):
        a, b = F(1, 2), F(3, 4)
        t = DiffOp.scalar([Poly((b + 1,)), Poly((1, 1))])
        rep = intertwiner_verify(t, Jacobi(a, b + 1), Jacobi(a + 1, b), 10)
        assert rep.ok
        assert rep.lambdas == [n + b + 1 for n in range(11)]

    def test_identity(self):
        rep = intertwiner_verify(DiffOp.identity(1), LAG, LAG, 6)
        assert rep.ok and set(rep.lambdas) == {F(1)}

    def test_rejects_non_intertwiner(self):
        rep = intertwiner_verify(DDX, LAG, Laguerre(ALPHA + 1), 6)
        assert not rep.ok

    def test_vanishing_scalar_eigenvalue_allowed(self):
        # composing the ladder with the classical operator makes lambda_0 = 0
        t = compose(DiffOp.scalar([Poly((-1,)), Poly((1,))]), Laguerre(ALPHA + 1).delta())
        rep = intertwiner_verify(t, LAG, Laguerre(ALPHA + 1), 8)
        assert rep.ok and rep.lambdas[0] == 0 and rep.lambdas[1] != 0


class TestIntertwinerSearch:
    def test_laguerre_single_step(self):
        basis = intertwiner_search(LAG, Laguerre(ALPHA + 1), 1, 0)
        assert basis.dim == 1
        assert basis.basis[0] == DiffOp.scalar([Poly((-1,)), Poly((1,))])

    def test_laguerre_double_step(self):
        basis = intertwiner_search(LAG, Laguerre(ALPHA + 2), 2, 0)
        assert basis.dim == 1
        want = op_power(DiffOp.scalar([Poly((-1,)), Poly((1,))]), 2)
        assert basis.basis[0] == want

    def test_jacobi_alpha_shift_empty(self):
        a, b = F(1, 2), F(3, 4)
        basis = intertwiner_search(Jacobi(a, b), Jacobi(a + 1, b), 4, 1)
        assert not basis.refused
        assert basis.dim == 0

    def test_hermite_distinct_shifts_refused(self):
        basis = intertwiner_search(HermiteShifted(F(0)), HermiteShifted(F(1)), 3, 0)
        assert basis.refused and basis.dim == 0
        assert module_generator(HermiteShifted(F(0)), HermiteShifted(F(1))).is_zero

    def test_generator_agreement_with_delta_multiples(self):
        # within order bound ord(T) + 2 the space is exactly T and T.delta
        cases = [
            (LAG, Laguerre(ALPHA + 1)),
            (Laguerre(ALPHA + 1), LAG),
            (Jacobi(F(1, 2), F(7, 4)), Jacobi(F(3, 2), F(3, 4))),
            (Jacobi(F(3, 2), F(3, 4)), Jacobi(F(1, 2), F(7, 4))),
        ]
        for w1, w2 in cases:
            t = module_generator(w1, w2)
            basis = intertwiner_search(w1, w2, t.order, 0)
            assert basis.dim == 1
            basis2 = intertwiner_search(w1, w2, t.order + 2, 0)
            assert basis2.dim == 2
            for el in basis2.basis:
                p = module_decompose(el, w1, w2)
                assert p.degree <= 1

    def test_two_step_generators(self):
        a, b = F(1, 2), F(3, 4)
        for k in (1, 2):
            t = module_generator(LAG, Laguerre(ALPHA + k))
            basis = intertwiner_search(LAG, Laguerre(ALPHA + k), k, 0)
            assert basis.dim == 1 and basis.basis[0] == t
            tj = module_generator(Jacobi(a, b + k), Jacobi(a + k, b))
            bj = intertwiner_search(Jacobi(a, b + k), Jacobi(a + k, b), k, 0)
            # the ladder product has leading coefficient (1+x)^k, already monic
            assert bj.dim == 1 and bj.basis[0] == tj

    def test_horizon_precondition(self):
        from mvop.exactalg import DomainError

        with pytest.raises(DomainError):
            intertwiner_search(LAG, Laguerre(ALPHA + 1), 2, 0, n_horizon=3)


class TestModuleGenerator:
    def test_laguerre_up_three(self):
        t = module_generator(LAG, Laguerre(ALPHA + 3))
        want = op_power(DiffOp.scalar([Poly((-1,)), Poly((1,))]), 3)
        assert t == want

    def test_jacobi_two_step(self):
        a, b = F(1, 2), F(3, 4)
        t = module_generator(Jacobi(a, b + 2), Jacobi(a + 2, b))
        v2 = DiffOp.scalar([Poly((b + 2,)), Poly((1, 1))])
        v1 = DiffOp.scalar([Poly((b + 1,)), Poly((1, 1))])
        assert t == compose(v2, v1)

    def test_equal_weights(self):
        assert module_generator(LAG, LAG) == DiffOp.identity(1)

    def test_generators_verify_as_intertwiners(self):
        a, b = F(1, 2), F(3, 4)
        cases = [
            (LAG, Laguerre(ALPHA + 2)),
            (Laguerre(ALPHA + 2), LAG),
            (Jacobi(a, b + 1), Jacobi(a + 1, b)),
            (Jacobi(a + 1, b), Jacobi(a, b + 1)),
        ]
        for w1, w2 in cases:
            t = module_generator(w1, w2)
            assert intertwiner_verify(t, w1, w2, 8).ok


class TestModuleDecompose:
    def test_round_trip_single(self):
        t = module_generator(LAG, Laguerre(ALPHA + 1))
        a = compose(t, Laguerre(ALPHA + 1).delta())
        p = module_decompose(a, LAG, Laguerre(ALPHA + 1))
        assert p == X

    def test_round_trip_quadratic(self):
        t = module_generator(LAG, Laguerre(ALPHA + 1))
        delta = Laguerre(ALPHA + 1).delta()
        a = compose(t, 2 * op_power(delta, 2) - 3 * DiffOp.identity(1))
        p = module_decompose(a, LAG, Laguerre(ALPHA + 1))
        assert p == 2 * X**2 - Poly.const(3)

    def test_bare_derivative_fails(self):
        with pytest.raises(DecompositionError):
            module_decompose(DDX, LAG, Laguerre(ALPHA + 1))

    def test_random_round_trips(self):
        rng = random.Random(7)
        a, b = F(1, 2), F(3, 4)
        pairs = [
            (LAG, Laguerre(ALPHA + 1)),
            (LAG, Laguerre(ALPHA + 2)),
            (Jacobi(a, b + 1), Jacobi(a + 1, b)),
            (Jacobi(a + 2, b), Jacobi(a, b + 2)),
        ]
        for w1, w2 in pairs:
            t = module_generator(w1, w2)
            delta = w2.delta()
            for _ in range(5):
                p = Poly([F(rng.randint(-5, 5)) for _ in range(rng.randint(1, 4))])
                got = module_decompose(compose(t, poly_of_op(p, delta)), w1, w2)
                assert got == p


class TestDarbouxVerify:
    def test_identity_certificate(self):
        w = LAG.scalar_weight()
        one = DiffOp.identity(1)
        cert = DarbouxCertificate(w, w, one, one, one, 6)
        assert darboux_verify(cert).ok

    def test_laguerre_step_certificate(self):
        v = DiffOp.scalar([Poly((-1,)), Poly((1,))])
        nn = DiffOp.scalar([Poly((ALPHA + 1,)), X])
        cert = DarbouxCertificate(
            LAG.scalar_weight(),
            Laguerre(ALPHA + 1).scalar_weight(),
            v,
            nn,
            compose(v, nn),
            8,
        )
        rep = darboux_verify(cert)
        assert rep.ok
        assert all(a.entry(0, 0) == -1 for a in cert.conjugators)

    def test_jacobi_transitivity_composite(self):
        # composing the one-step ladders (a, b+2) -> (a+1, b+1) -> (a+2, b)
        # yields a certificate for the two-step relation
        a, b = F(1, 2), F(3, 4)
        v1 = DiffOp.scalar([Poly((b + 2,)), Poly((1, 1))])
        n1 = DiffOp.scalar([Poly((a + 1,)), Poly((-1, 1))])
        v2 = DiffOp.scalar([Poly((b + 1,)), Poly((1, 1))])
        n2 = DiffOp.scalar([Poly((a + 2,)), Poly((-1, 1))])
        v = compose(v1, v2)
        nn = compose(n2, n1)
        cert = DarbouxCertificate(
            Jacobi(a, b + 2).scalar_weight(),
            Jacobi(a + 2, b).scalar_weight(),
            v,
            nn,
            compose(v, nn),
            8,
        )
        assert darboux_verify(cert).ok

    def test_perturbed_certificate_fails(self):
        v = DiffOp.scalar([Poly((-1,)), Poly((1,))])
        nn = DiffOp.scalar([Poly((ALPHA + 1,)), X])
        bad = compose(v, nn) + DiffOp.identity(1)
        cert = DarbouxCertificate(
            LAG.scalar_weight(), Laguerre(ALPHA + 1).scalar_weight(), v, nn, bad, 6
        )
        rep = darboux_verify(cert)
        assert not rep.ok
        assert any("factorization" in c.name for c in rep.failures())


class TestSandwichClosure:
    def test_catalog_certificates(self):
        # V A N stays in the algebra of the base for generators A of the
        # algebra of the transformed weight
        from mvop.catalog import entry

        cases = []
        jac2 = entry("JAC2")
        cases.append(
            (jac2.weight_W, jac2.ops["V"], jac2.ops["N"],
             [DiffOp.identity(2), jac2.ops["D1"], jac2.ops["D2"]])
        )
        lag3 = entry("LAG3")
        cases.append(
            (lag3.weight_W, lag3.ops["V"], lag3.ops["N"],
             [DiffOp.identity(3), lag3.ops["E"]])
        )
        her3 = entry("HER3")
        cases.append(
            (her3.weight_W, her3.ops["V"], her3.ops["N"],
             [DiffOp.identity(3), her3.ops["E"]])
        )
        geg2 = entry("GEG2")
        cases.append((geg2.weight_W, geg2.ops["V"], geg2.ops["N"], [DiffOp.identity(2)]))
        for w, v, nn, gens in cases:
            for a in gens:
                assert verify_in_DW(compose(v, compose(a, nn)), w, 8).ok


class TestReverseModuleAdjoint:
    def test_block_adjoint_is_reverse_intertwiner(self):
        a, b = F(1, 2), F(3, 4)
        pairs = [
            (LAG, Laguerre(ALPHA + 1)),
            (Jacobi(a, b + 1), Jacobi(a + 1, b)),
        ]
        for w1, w2 in pairs:
            t = module_generator(w1, w2)
            block = embed_scalar(t, 2, 0, 1)
            ws = Weight.of_scalars(w1, w2)
            dag = w_adjoint(block, ws)
            polys = dag.poly_coeffs()
            assert polys is not None
            from mvop.exactalg import MatRF

            rev = DiffOp(1, [MatRF([[c.entry(1, 0)]]) for c in polys])
            assert not rev.is_zero
            assert intertwiner_verify(rev, w2, w1, 8).ok


class TestScalarClassification:
    TABLE = [
        (Laguerre(F(1, 2)), Laguerre(F(7, 2)), True),
        (Laguerre(F(1, 2)), Laguerre(F(1, 2)), True),
        (Laguerre(F(1, 2)), Laguerre(F(1, 3)), False),
        (Laguerre(F(3)), Laguerre(F(0)), True),
        (Jacobi(F(1, 2), F(3, 2)), Jacobi(F(3, 2), F(1, 2)), True),
        (Jacobi(F(1, 2), F(3, 2)), Jacobi(F(3, 2), F(3, 2)), False),
        (Jacobi(F(0), F(0)), Jacobi(F(2), F(-1, 2)), False),
        (Jacobi(F(0), F(3)), Jacobi(F(2), F(1)), True),
        (Jacobi(F(1, 2), F(3, 2)), Jacobi(F(1), F(1)), False),
        (HermiteShifted(F(0)), HermiteShifted(F(0)), True),
        (HermiteShifted(F(1)), HermiteShifted(F(0)), False),
        (HermiteShifted(F(0)), Laguerre(F(1, 2)), False),
    ]

    @pytest.mark.parametrize("f1,f2,want", TABLE, ids=lambda v: str(v))
    def test_table(self, f1, f2, want):
        assert scalar_darboux_class(f1, f2) is want

    def test_symmetric_relation(self):
        for f1, f2, want in self.TABLE:
            assert scalar_darboux_class(f2, f1) is want


class TestDiagMatch:
    def test_jacobi_pairs_match(self):
        a, b = F(1, 2), F(3, 4)
        w = Weight.of_scalars(Jacobi(a + 1, b), Jacobi(a + 1, b + 1))
        wt = Weight.of_scalars(Jacobi(a, b + 1), Jacobi(a + 2, b))
        sigma = diag_darboux_match(w, wt)
        assert sigma is not None
        fams = [Jacobi(a + 1, b), Jacobi(a + 1, b + 1)]
        tfams = [Jacobi(a, b + 1), Jacobi(a + 2, b)]
        for j, i in enumerate(sigma):
            assert scalar_darboux_class(tfams[j], fams[i])

    def test_multiplicity_counterexample(self):
        w1, w2 = Laguerre(F(1, 2)), Laguerre(F(1, 4))
        w = Weight.of_scalars(w1, w1, w1, w2)
        wt = Weight.of_scalars(w1, w1, w2, w2)
        assert diag_darboux_match(w, wt) is None

    def test_identity_permutation(self):
        w = Weight.of_scalars(Laguerre(F(1, 2)), Laguerre(F(3, 2)))
        assert diag_darboux_match(w, w) == (0, 1)

    def test_length_mismatch(self):
        w = Weight.of_scalars(Laguerre(F(1, 2)), Laguerre(F(3, 2)))
        wt = Laguerre(F(1, 2)).scalar_weight()
        with pytest.raises(ShapeError):
            diag_darboux_match(w, wt)


class TestCommutativity:
    def test_jac2_diagonal_side(self):
        a, b = F(1, 2), F(3, 4)
        w = Weight.of_scalars(Jacobi(a + 1, b), Jacobi(a + 1, b + 1))
        assert commutativity_predicate(w)

    def test_laguerre_ladder_not_commutative(self):
        w = Weight.of_scalars(LAG, Laguerre(ALPHA + 1))
        assert not commutativity_predicate(w)

    def test_single_block(self):
        assert commutativity_predicate(LAG.scalar_weight())


class TestFullness:
    def test_trivial_idempotents_on_inequivalent_sum(self):
        w = Weight.of_scalars(Laguerre(F(1, 2)), Laguerre(F(1, 3)))
        d1 = DiffOp.const(FracMat([[1, 0], [0, 0]]))
        d2 = DiffOp.const(FracMat([[0, 0], [0, 1]]))
        gens = [d1, d2, DiffOp.identity(2)]
        assert fullness_check(w, [d1, d2], gens, 6).ok

    def test_identity_pair_fails_product(self):
        w = Weight.of_scalars(Laguerre(F(1, 2)), Laguerre(F(1, 3)))
        one = DiffOp.identity(2)
        rep = fullness_check(w, [one, one], [one], 4)
        assert not rep.ok

    def test_catalog_orthogonal_system(self):
        from mvop.catalog import entry

        e = entry("JAC2")
        gens = [DiffOp.identity(2), e.ops["D1"], e.ops["D2"]]
        assert fullness_check(e.weight_Wt, [e.ops["FD1"], e.ops["FD2"]], gens, 6).ok
