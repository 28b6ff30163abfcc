import itertools

import pytest

from ncalg import OSCILLATOR_ALPHABET, PLANE_ALPHABET, NCMonomial, NCPoly
from qarith import QEtaCoeff, q_factorial, q_number, q_power
from symcalc import (
    COMMUTATIVE,
    WEYL,
    SymbolCalculusError,
    antiholomorphic,
    basis_overlap,
    bf_apply,
    classical_hamiltonian,
    commutative_bracket_oracle,
    commutative_route_symbol,
    integrate_symbol,
    left_derivative,
    moment_by_postulates,
    operator_of,
    poisson_commutative,
    q_integral_moment,
    q_normal_symbol,
    q_poisson,
    q_poisson_oracle,
    right_derivative,
    star_closed_form,
    star_derivative_form,
    star_expand,
    star_product,
    symbol_of,
)

z = NCPoly.generator(PLANE_ALPHABET, "z")
zb = NCPoly.generator(PLANE_ALPHABET, "zb")
b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")
eta2 = QEtaCoeff.eta2()
hbar = QEtaCoeff.symbol("hbar")
gamma = QEtaCoeff.symbol("gamma")
i = QEtaCoeff.symbol("i")
omega = QEtaCoeff.symbol("omega")

ONE = NCMonomial(0, (0, 0))
ZBZ = NCMonomial(0, (1, 1))

SMALL_GRID = list(itertools.product((-1, 0, 1), range(3), range(3), (-1, 0, 1), range(3), range(3)))


def test_symbol_round_trip():
    op = b * bd
    sym = symbol_of(op)
    assert sym == NCPoly(PLANE_ALPHABET, {ZBZ: q_power(2), ONE: eta2})
    assert operator_of(sym) == op


def test_symbol_needs_matching_alphabet():
    with pytest.raises(SymbolCalculusError):
        symbol_of(z)
    with pytest.raises(SymbolCalculusError):
        operator_of(b)


def test_derivatives():
    x = q_normal_symbol(1, 2, 1)
    # d(K zb^2 z) = q^{2-4} [1] K zb^2
    assert left_derivative("d", x) == q_normal_symbol(1, 2, 0, q_power(-2))
    assert left_derivative("dbar", x) == q_normal_symbol(1, 1, 1, q_power(-2) * q_number(2))
    assert right_derivative("dR", x) == q_normal_symbol(1, 2, 0)
    assert right_derivative("dbarR", x) == q_normal_symbol(1, 1, 1, q_power(-4) * q_number(2))
    with pytest.raises(SymbolCalculusError):
        left_derivative("dR", x)


class TestWeylStar:
    def test_basic_product(self):
        assert star_product(z, zb) == NCPoly(PLANE_ALPHABET, {ZBZ: q_power(2), ONE: eta2})

    def test_order_zero_is_the_plane_product(self):
        assert star_expand(z, zb, WEYL, 0) == NCPoly.monomial(PLANE_ALPHABET, 0, (1, 1), q_power(2))

    def test_derivative_form(self):
        assert star_derivative_form(z, zb) == star_product(z, zb)

    @pytest.mark.parametrize("p, a, b_, t, c, d", SMALL_GRID[::7])
    def test_expansion_forms_agree(self, p, a, b_, t, c, d):
        n1, n2 = q_normal_symbol(p, a, b_), q_normal_symbol(t, c, d)
        closed = star_closed_form(p, a, b_, t, c, d)
        assert star_expand(n1, n2, WEYL, 1) == closed
        assert star_derivative_form(n1, n2) == closed

    def test_closed_form_is_exact_for_single_contractions(self):
        assert star_closed_form(1, 2, 1, -1, 3, 0) == star_product(q_normal_symbol(1, 2, 1), q_normal_symbol(-1, 3, 0))

    def test_negative_order(self):
        with pytest.raises(SymbolCalculusError):
            star_expand(z, zb, WEYL, -1)

    def test_unknown_algebra(self):
        with pytest.raises(SymbolCalculusError):
            star_product(z, zb, "moyal")


class TestCommutativeStar:
    def test_first_order(self):
        expected = NCPoly(PLANE_ALPHABET, {ZBZ: hbar * gamma + 1, ONE: hbar})
        assert star_expand(z, zb, COMMUTATIVE, 1) == expected
        assert star_derivative_form(z, zb, COMMUTATIVE) == expected

    def test_exact_product_uses_hbar(self):
        expected = NCPoly(PLANE_ALPHABET, {ZBZ: q_power(2), ONE: hbar})
        assert star_product(z, zb, COMMUTATIVE) == expected

    def test_rational_gamma(self):
        expected = NCPoly(PLANE_ALPHABET, {ZBZ: hbar * 3 + 1, ONE: hbar})
        assert star_expand(z, zb, COMMUTATIVE, 1, 3) == expected

    def test_rejects_k(self):
        with pytest.raises(SymbolCalculusError):
            star_product(q_normal_symbol(1, 0, 0), z, COMMUTATIVE)

    @pytest.mark.parametrize("m, l", [(0, 0), (1, 1), (2, 1), (1, 3), (3, 3)])
    def test_moment_route(self, m, l):
        z_m = NCPoly.monomial(PLANE_ALPHABET, 0, (0, m))
        zb_l = NCPoly.monomial(PLANE_ALPHABET, 0, (l, 0))
        assert commutative_route_symbol(m, l) == star_product(z_m, zb_l, COMMUTATIVE)

    @pytest.mark.parametrize("x, y", [((0, 1), (1, 0)), ((1, 1), (1, 0)), ((0, 2), (2, 0))])
    def test_derivative_form_degree_two(self, x, y):
        n1 = NCPoly.monomial(PLANE_ALPHABET, 0, x)
        n2 = NCPoly.monomial(PLANE_ALPHABET, 0, y)
        assert star_expand(n1, n2, COMMUTATIVE, 1) == star_derivative_form(n1, n2, COMMUTATIVE)


class TestPoissonBrackets:
    def test_commutative_bracket(self):
        expected = NCPoly(PLANE_ALPHABET, {ONE: i, ZBZ: i * gamma})
        assert poisson_commutative(z, zb) == expected
        assert commutative_bracket_oracle(z, zb) == expected

    def test_commutative_bracket_is_antisymmetric(self):
        n1 = NCPoly.monomial(PLANE_ALPHABET, 0, (2, 1))
        n2 = NCPoly.monomial(PLANE_ALPHABET, 0, (0, 3))
        assert poisson_commutative(n1, n2) == -poisson_commutative(n2, n1)
        assert poisson_commutative(n1, n2, 2) == commutative_bracket_oracle(n1, n2, 2)

    def test_q_bracket_of_coordinates(self):
        assert q_poisson(z, zb) == NCPoly.constant(PLANE_ALPHABET, i)
        assert q_poisson_oracle(z, zb) == NCPoly.constant(PLANE_ALPHABET, i)

    @pytest.mark.parametrize("p, a, b_, t, c, d", SMALL_GRID[::11])
    def test_q_bracket_matches_q_commutator(self, p, a, b_, t, c, d):
        n1, n2 = q_normal_symbol(p, a, b_), q_normal_symbol(t, c, d)
        assert q_poisson(n1, n2) == q_poisson_oracle(n1, n2)

    def test_q_classical_equations(self):
        h = classical_hamiltonian()
        assert q_poisson(h, z) == q_normal_symbol(1, 0, 1, -(i * omega) * q_power(-2))
        assert q_poisson(h, zb) == q_normal_symbol(1, 1, 0, i * omega)
        assert q_poisson(h, q_normal_symbol(0, 1, 1)).is_zero()


class TestIntegral:
    def test_moments(self):
        assert q_integral_moment(0, 0) == 1
        assert q_integral_moment(2, 2) == QEtaCoeff.scalar(q_factorial(2))
        assert q_integral_moment(2, 1) == 0
        assert q_integral_moment(2, 2, scaled=True) == QEtaCoeff.scalar(q_factorial(2)) * QEtaCoeff.eta2(2)

    @pytest.mark.parametrize("n, m", [(0, 0), (1, 1), (3, 3), (5, 5), (2, 4), (4, 1)])
    def test_moments_follow_from_postulates(self, n, m):
        assert moment_by_postulates(n, m) == q_integral_moment(n, m)

    def test_unknown_variant(self):
        with pytest.raises(SymbolCalculusError):
            q_integral_moment(1, 1, "sphere")

    def test_integrate_symbol(self):
        f = NCPoly(PLANE_ALPHABET, {ZBZ: 1, ONE: 2, NCMonomial(0, (1, 0)): 5})
        assert integrate_symbol(f) == QEtaCoeff.scalar(q_power(-2) + 2)
        assert integrate_symbol(f, COMMUTATIVE) == 3
        assert integrate_symbol(zb * z, scaled=True) == eta2 * q_power(-2)

    def test_integrate_rejects_k(self):
        with pytest.raises(SymbolCalculusError):
            integrate_symbol(q_normal_symbol(1, 1, 1))


class TestBargmannFock:
    def test_generators(self):
        f = antiholomorphic(3)
        assert bf_apply(b, f) == antiholomorphic(2, eta2 * q_number(3))
        assert bf_apply(bd, f) == antiholomorphic(4)
        k = NCPoly.generator(OSCILLATOR_ALPHABET, "K")
        assert bf_apply(k, f) == antiholomorphic(3, q_power(-6))

    def test_action_is_a_representation(self):
        f = antiholomorphic(0) + antiholomorphic(1, 2) + antiholomorphic(2)
        assert bf_apply(bd * b, f) == bf_apply(bd, bf_apply(b, f))
        assert bf_apply(b * bd, f) == bf_apply(b, bf_apply(bd, f))

    def test_basis_is_orthonormal(self):
        for m in range(4):
            for n in range(4):
                assert basis_overlap(m, n) == (1 if m == n else 0)

    def test_rejects_z_dependence(self):
        with pytest.raises(SymbolCalculusError):
            bf_apply(b, z)
