"""Hypothesis strategies for coefficients, monomials, polynomials and words."""

import hypothesis.strategies as st

from ncalg import NCMonomial, NCPoly, Word
from qarith import QEtaCoeff, q_power


def coefficients():
    return st.builds(
        lambda e, c, eta: QEtaCoeff.scalar(q_power(e) * c) * QEtaCoeff.eta2(eta),
        st.integers(-2, 2),
        st.integers(-3, 3).filter(bool),
        st.integers(0, 1),
    )


def monomials(alphabet, max_exp: int = 2):
    width = len(alphabet.generator_names())
    return st.builds(
        NCMonomial,
        st.integers(-2, 2),
        st.tuples(*[st.integers(0, max_exp)] * width),
    )


def polys(alphabet, max_terms: int = 4):
    return st.lists(st.tuples(monomials(alphabet), coefficients()), max_size=max_terms).map(
        lambda terms: NCPoly(alphabet, terms)
    )


def words(alphabet, max_length: int = 6):
    return st.lists(st.sampled_from(alphabet.letters()), max_size=max_length).map(
        lambda letters: Word(alphabet, tuple(letters))
    )
