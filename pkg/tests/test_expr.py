from fractions import Fraction

import pytest
from hypothesis import given, settings

from expr import (
    Comm,
    ExpressionEvaluationError,
    ExpressionSyntaxError,
    Ident,
    Power,
    UnknownIdentifierError,
    evaluate,
    infer_alphabet,
    parse,
    parse_poly,
    print_expr,
)
from ncalg import (
    OSCILLATOR_ALPHABET,
    PLANE_ALPHABET,
    AlphabetError,
    NCPoly,
    commutator,
    plane_alphabet,
)
from qarith import QEtaCoeff, q_power
from tests.strategies import polys

b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")


class TestParse:
    def test_ast_shapes(self):
        assert parse("b") == Ident("b")
        assert parse("K^-2") == Power(Ident("K"), -2)
        assert parse("comm(b, bd)") == Comm(Ident("b"), Ident("bd"))

    def test_syntax_error_reports_column(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("b * * bd")
        assert "column" in str(info.value)

    def test_zero_denominator_is_a_syntax_error(self):
        with pytest.raises(ExpressionSyntaxError, match="zero denominator") as info:
            parse("1/0*b")
        assert "column 1" in str(info.value)
        with pytest.raises(ExpressionSyntaxError, match="column 5"):
            parse("b + 3/0")
        assert evaluate(parse("2/4")) == evaluate(parse("1/2"))

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as info:
            parse("b*x")
        assert "x" in str(info.value)

    def test_alphabet_inference(self):
        assert infer_alphabet(parse("K*b")) == OSCILLATOR_ALPHABET
        assert infer_alphabet(parse("z*zb")) == PLANE_ALPHABET
        assert infer_alphabet(parse("z_3*zb")) == plane_alphabet(3)
        with pytest.raises(AlphabetError):
            infer_alphabet(parse("b*z"))


class TestEvaluate:
    def test_normal_ordering(self):
        assert print_expr(parse_poly("b*bd")) == "q^2*bd*b + eta2"
        assert print_expr(parse_poly("comm(b, bd)")) == "(-1 + q^2)*bd*b + eta2"
        assert print_expr(parse_poly("qcomm(b, bd)")) == "eta2"

    def test_scalars_and_signs(self):
        assert parse_poly("-2*q^3*b + 1/2") == b.scale(-2 * q_power(3)) + NCPoly.constant(OSCILLATOR_ALPHABET, Fraction(1, 2))
        assert parse_poly("(1 + q^2)^-1*b") == b.scale(1 / (1 + q_power(2)))
        assert parse_poly("i*i") == NCPoly.constant(OSCILLATOR_ALPHABET, -1)

    def test_k_inverse(self):
        assert parse_poly("K^-1*K") == NCPoly.constant(OSCILLATOR_ALPHABET, 1)
        assert parse_poly("K^-1*b*K") == b.scale(q_power(-2))

    def test_plane(self):
        assert print_expr(parse_poly("z*zb")) == "q^2*zb*z"
        assert parse_poly("z_2*zb") == NCPoly.monomial(plane_alphabet(2), 0, (1, 0, 0, 1), q_power(2))
        assert parse_poly("z_1") == NCPoly.generator(PLANE_ALPHABET, "z")

    def test_explicit_alphabet(self):
        assert parse_poly("eta2", PLANE_ALPHABET) == NCPoly.constant(PLANE_ALPHABET, QEtaCoeff.eta2())
        assert parse_poly("z", plane_alphabet(2)).alphabet == plane_alphabet(2)
        with pytest.raises(AlphabetError):
            evaluate(parse("z"), OSCILLATOR_ALPHABET)

    def test_negative_power_of_sum(self):
        with pytest.raises(ExpressionEvaluationError):
            parse_poly("(b + bd)^-1")

    def test_zero_scalar_inverse(self):
        with pytest.raises(ExpressionEvaluationError):
            parse_poly("(eta2 - eta2)^-1")

    def test_qcomm_needs_monomials(self):
        with pytest.raises(ExpressionEvaluationError):
            parse_poly("qcomm(b + bd, b)")

    def test_nested_commutators(self):
        assert parse_poly("comm(K, comm(b, bd))").is_zero()
        assert parse_poly("comm(b*bd, b)") == commutator(b * bd, b)


@settings(max_examples=80, deadline=None)
@given(polys(OSCILLATOR_ALPHABET))
def test_print_parse_round_trip(x):
    assert parse_poly(print_expr(x), OSCILLATOR_ALPHABET) == x


@settings(max_examples=80, deadline=None)
@given(polys(plane_alphabet(2)))
def test_print_parse_round_trip_on_two_planes(x):
    assert parse_poly(print_expr(x), plane_alphabet(2)) == x
