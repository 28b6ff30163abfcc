from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from qarith import (
    BASE_INV_Q2,
    BASE_Q2,
    QArithError,
    QEtaCoeff,
    QSeries,
    basic_exp_numeric,
    evaluate_qrat,
    exp_inverse_residual,
    q,
    q_binomial,
    q_exp_series,
    q_factorial,
    q_number,
    q_power,
    render_qrat,
    summation_theorem_residual,
)


def test_small_q_numbers():
    assert q_number(0) == 0
    assert q_number(1) == 1
    assert q_number(2) == 1 + q**2
    assert q_number(3) == 1 + q**2 + q**4
    assert q_number(2, -2) == 1 + q_power(-2)


def test_q_factorial_and_binomial():
    assert q_factorial(0) == 1
    assert q_factorial(3) == (1 + q**2) * (1 + q**2 + q**4)
    assert q_binomial(4, 0) == 1
    assert q_binomial(4, 5) == 0
    assert q_binomial(2, 1) == 1 + q**2


def test_negative_factorial_is_rejected():
    with pytest.raises(QArithError):
        q_factorial(-1)


@given(st.integers(0, 50), st.integers(0, 50))
def test_shift_identity(i, j):
    assert q_number(i + j) == q_power(2 * j) * q_number(i) + q_number(j)


@given(st.integers(0, 50))
def test_reflection(j):
    assert q_number(-j) == -q_power(-2 * j) * q_number(j)


def test_classical_limit():
    for n in range(8):
        assert evaluate_qrat(q_number(n), 1) == n
    assert evaluate_qrat(q_factorial(5), 1) == 120


def test_evaluate_at_pole_raises():
    with pytest.raises(QArithError):
        evaluate_qrat(1 / (q**2 - 1), 1)


def test_render_qrat():
    assert render_qrat(q_number(2)) == "1 + q^2"
    assert render_qrat(q_power(-2)) == "q^-2"
    assert render_qrat(1 / (1 + q**2)) == "(1 + q^2)^-1"
    assert render_qrat(-q_power(3) * 2) == "-2*q^3"
    assert render_qrat(q**2 - 1) == "-1 + q^2"
    assert render_qrat(q**0 * 0) == "0"


class TestQEtaCoeff:
    def test_imaginary_unit_squares_to_minus_one(self):
        i = QEtaCoeff.symbol("i")
        assert i * i == -1
        assert i.inverse() * i == 1
        assert i.conjugate() == -i

    def test_grades_multiply(self):
        x = QEtaCoeff.eta2() * QEtaCoeff.symbol("gamma")
        assert (x * QEtaCoeff.eta2()).min_eta_degree() == 2
        assert x.render() == "eta2*gamma"

    def test_inverse_needs_single_term(self):
        with pytest.raises(QArithError):
            (QEtaCoeff.one() + QEtaCoeff.eta2()).inverse()

    def test_negative_power(self):
        x = QEtaCoeff.scalar(1 + q**2)
        assert x**-1 * x == 1

    def test_truncate_and_shift(self):
        x = QEtaCoeff.one() + QEtaCoeff.eta2() + QEtaCoeff.eta2(2)
        assert x.truncate_eta(1) == QEtaCoeff.one() + QEtaCoeff.eta2()
        assert x.eta_part(2).shift_eta(-2) == 1

    def test_rename_and_substitute(self):
        x = QEtaCoeff.eta2(2)
        assert x.rename("eta2", "hbar") == QEtaCoeff.symbol("hbar", 2)
        assert x.substitute("eta2", Fraction(1, 2)) == Fraction(1, 4)

    def test_substitute_zero_into_negative_power(self):
        with pytest.raises(QArithError):
            QEtaCoeff.eta2(-1).substitute("eta2", 0)

    def test_evaluate(self):
        x = QEtaCoeff.eta2() * q_power(2)
        assert x.evaluate(2.0, eta2=3) == pytest.approx(12.0)
        y = QEtaCoeff.symbol("i") * 2
        assert y.evaluate(1.5) == 2j

    def test_unknown_parameter(self):
        with pytest.raises(QArithError):
            QEtaCoeff.symbol("theta")

    def test_render_sum(self):
        x = QEtaCoeff.one() - QEtaCoeff.eta2() * q_power(2)
        assert x.render() == "1 - q^2*eta2"


def test_series_beyond_truncation_raises():
    series = QSeries([1, 1], 3)
    assert series.coefficient(3) == 0
    with pytest.raises(QArithError):
        series.coefficient(4)


def test_exp_series_coefficients():
    series = q_exp_series(BASE_INV_Q2, 3)
    assert series.coefficient(2) == QEtaCoeff.scalar(q**2 / (1 + q**2))


def test_summation_theorem():
    assert summation_theorem_residual(8) == {}


def test_basic_exponentials_are_mutual_inverses():
    assert exp_inverse_residual(10) == []


@pytest.mark.parametrize("x", [0.1, 0.5, 1.3])
def test_numeric_exp_matches_series(x):
    series = q_exp_series(BASE_Q2, 25).evaluate(x, q=1.2)
    assert basic_exp_numeric(x, 1.2, BASE_Q2) == pytest.approx(series, rel=1e-12)


def test_numeric_exp_inverse_pair():
    x = np.linspace(0.0, 3.0, 7)
    product = basic_exp_numeric(x, 1.3, BASE_Q2) * basic_exp_numeric(-x, 1.3, BASE_INV_Q2)
    assert np.allclose(product, 1.0, atol=1e-12)
