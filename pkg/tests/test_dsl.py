"""DSL parsing, printing, and round-trips."""

from fractions import Fraction as F

import pytest

from mvop.exactalg import MatRF, Poly, RatFunc, X
from mvop.diffop import DiffOp, MatPoly
from mvop.weights import Jacobi, Laguerre, Weight
from mvop.dsl import (
    ParseError,
    op_scalar_str,
    op_str,
    parse_spec,
    print_document,
)


class TestParsing:
    def test_scalar_weight(self):
        doc = parse_spec("weight w = laguerre(alpha=1/2)\n")
        assert doc.weights["w"] == Laguerre(F(1, 2)).scalar_weight()

    def test_zero_operator_normal_form(self):
        doc = parse_spec("op Z = d^0*[0]\n")
        assert doc.ops["Z"].is_zero

    def test_jac2_ladder_display(self):
        # the first-order factor of the 2x2 Jacobi-type example
        text = (
            "param kappa = 1/4\n"
            "param alpha = 1/2\n"
            "param beta = 3/4\n"
            "op V = d^1*[x-1, 2; 0, 1+x]"
            " + [kappa, 0; kappa-alpha-1, alpha+beta-kappa+2]\n"
        )
        doc = parse_spec(text)
        from mvop.catalog import entry

        assert doc.ops["V"] == entry("JAC2").ops["V"]

    def test_parameters_substituted_at_parse(self):
        doc = parse_spec("param c = 2/3\nop T = d^1*(c*x) + c^2\n")
        t = doc.ops["T"]
        assert t.coeff(1).entry(0, 0) == RatFunc(F(2, 3) * X)
        assert t.coeff(0).entry(0, 0) == RatFunc(Poly((F(4, 9),)))

    def test_param_override(self):
        doc = parse_spec("param c = 1\nop T = d^0*(c)\n", {"c": F(5)})
        assert doc.ops["T"].coeff(0).entry(0, 0) == RatFunc(Poly((5,)))

    def test_dsum(self):
        text = (
            "weight w1 = laguerre(alpha=1/2)\n"
            "weight w2 = laguerre(alpha=3/2)\n"
            "weight W = dsum(w1, w2)\n"
        )
        doc = parse_spec(text)
        assert doc.weights["W"].size == 2

    def test_weight_with_matrix_factor(self):
        doc = parse_spec("weight w = jacobi(alpha=1/2, beta=3/4) * [1, 0; 0, 1+x]\n")
        w = doc.weights["w"]
        assert w.M.entry(1, 1) == RatFunc(Poly((1, 1)))

    def test_constant_division(self):
        doc = parse_spec("param a = 2\nop T = d^0*(x/a + 1/a)\n")
        assert doc.ops["T"].coeff(0).entry(0, 0) == RatFunc(Poly((F(1, 2), F(1, 2))))

    def test_comments_and_blank_lines(self):
        doc = parse_spec("# leading comment\n\nparam a = 1  # trailing\n")
        assert doc.params["a"] == 1

    def test_multiline_matrix(self):
        doc = parse_spec("op T = d^1*[x, 0;\n 0, x]\n")
        assert doc.ops["T"].order == 1


class TestParseErrors:
    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_spec("op T = d^*2\n")
        assert exc.value.line == 1 and exc.value.col >= 9

    def test_unbound_name(self):
        with pytest.raises(ParseError) as exc:
            parse_spec("op T = d^1*(gamma)\n")
        assert "unbound" in str(exc.value)

    def test_parameter_out_of_range(self):
        with pytest.raises(ParseError) as exc:
            parse_spec("weight w = laguerre(alpha=-2)\n")
        assert "exceed -1" in str(exc.value)

    def test_reserved_word(self):
        with pytest.raises(ParseError):
            parse_spec("param d = 1\n")

    def test_duplicate_name(self):
        with pytest.raises(ParseError):
            parse_spec("param a = 1\nparam a = 2\n")

    def test_division_by_zero(self):
        with pytest.raises(ParseError) as exc:
            parse_spec("op T = d^0*(x/0)\n")
        assert "zero" in str(exc.value)

    def test_division_by_non_constant(self):
        with pytest.raises(ParseError) as exc:
            parse_spec("op T = d^0*(1/x)\n")
        assert "non-constant" in str(exc.value)

    def test_nonsquare_matrix(self):
        with pytest.raises(ParseError):
            parse_spec("op T = d^0*[1, 2]\n")

    def test_unknown_check_kind(self):
        with pytest.raises(ParseError):
            parse_spec("check frobnicate(x)\n")

    def test_check_arity(self):
        with pytest.raises(ParseError):
            parse_spec("weight w = laguerre(alpha=1/2)\ncheck classify(w)\n")

    def test_search_requires_order(self):
        with pytest.raises(ParseError):
            parse_spec(
                "check search(laguerre(alpha=1/2), laguerre(alpha=3/2))\n"
            )


class TestChecks:
    def test_search_check_with_options(self):
        doc = parse_spec(
            "check search(laguerre(alpha=1/2), laguerre(alpha=3/2), order=1, dim=1)\n"
        )
        cmd = doc.checks[0]
        assert cmd.kind == "search"
        assert cmd.options == {"order": 1, "dim": 1}
        assert cmd.args[0].value == Laguerre(F(1, 2))

    def test_classify_expect(self):
        doc = parse_spec(
            "check classify(jacobi(alpha=1/2, beta=3/2), jacobi(alpha=3/2, beta=1/2), expect=true)\n"
        )
        assert doc.checks[0].options == {"expect": True}

    def test_inline_weight_refused_for_op_position(self):
        with pytest.raises(ParseError):
            parse_spec("check in_algebra(laguerre(alpha=1/2), laguerre(alpha=1/2))\n")


class TestPrinting:
    def test_scalar_compact_form(self):
        t = DiffOp.scalar([Poly((-1,)), Poly((1,))])
        assert op_scalar_str(t) == "d^1 - 1"

    def test_round_trip_ad_hoc_document(self):
        text = (
            "param alpha = 1/2\n"
            "weight w1 = laguerre(alpha=alpha)\n"
            "weight w2 = laguerre(alpha=alpha+1)\n"
            "weight W = dsum(w1, w2)\n"
            "op T = d^2*[x, 0; 0, x] + d^1*[alpha+1-x, 1; 0, alpha+1-x]\n"
            "check in_algebra(T, W)\n"
        )
        doc = parse_spec(text)
        printed = print_document(doc)
        again = parse_spec(printed)
        assert again == doc
        assert parse_spec(print_document(again)) == again

    def test_round_trip_catalog_documents(self):
        from mvop.catalog import ENTRY_NAMES, entry_document_text

        for name in ENTRY_NAMES:
            doc = parse_spec(entry_document_text(name))
            assert parse_spec(print_document(doc)) == doc

    def test_printed_op_parses_back(self):
        from mvop.catalog import entry

        v = entry("HER3").ops["V"]
        doc = parse_spec(f"op V = {op_str(v)}\n")
        assert doc.ops["V"] == v

    def test_random_ops_round_trip(self):
        from hypothesis import given, settings, strategies as st

        @given(st.data())
        @settings(max_examples=30, deadline=None)
        def inner(data):
            size = data.draw(st.integers(1, 3))
            order = data.draw(st.integers(0, 3))
            coeffs = []
            for _ in range(order + 1):
                rows = [
                    [
                        Poly(data.draw(st.lists(
                            st.fractions(min_value=-3, max_value=3, max_denominator=4),
                            max_size=3,
                        )))
                        for _ in range(size)
                    ]
                    for _ in range(size)
                ]
                coeffs.append(MatPoly(rows).to_matrf())
            op = DiffOp(size, coeffs)
            doc = parse_spec(f"op T = {op_str(op)}\n")
            assert doc.ops["T"] == op

        inner()
