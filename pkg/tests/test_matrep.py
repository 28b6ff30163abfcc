import numpy as np
import pytest

from matrep import (
    FockRep,
    RepresentationError,
    WeylRep,
    energy_closed_form,
    evaluate_poly,
    fock_corner_value,
    fock_number_identity,
    fock_relation_residual,
    hamiltonian_spectrum,
    heisenberg_evolution_check,
    interior_mask,
    q_factorial_numeric,
    q_number_numeric,
    trace_qintegral_report,
    trace_weight,
    weyl_diagonal_law,
    weyl_form_bch_check,
    weyl_relation_check,
    word_matrix,
)
from ncalg import OSCILLATOR_ALPHABET, PLANE_ALPHABET, NCPoly, hermitian_conjugate, normal_order, word_of
from qarith import BASE_Q2, QEtaCoeff, basic_exp_numeric


def test_numeric_q_numbers():
    assert q_number_numeric(3, 1.0) == 3.0
    assert q_number_numeric(3, 2.0) == pytest.approx(1 + 4 + 16)
    assert q_factorial_numeric(3, 2.0) == pytest.approx(1 * 5 * 21)


class TestFock:
    def test_relation_holds_off_the_corner(self):
        rep = FockRep.build(8, 1.3)
        residual = fock_relation_residual(rep)
        corner = residual[-1, -1]
        residual[-1, -1] = 0.0
        assert np.max(np.abs(residual)) < 1e-12
        assert corner == pytest.approx(fock_corner_value(rep))

    def test_number_identity(self):
        assert fock_number_identity(FockRep.build(32, 1.2)) < 1e-12

    def test_spectrum(self):
        spectrum = hamiltonian_spectrum(FockRep.build(32, 1.2, 0.5), omega=2.0)
        assert spectrum.indices == list(range(32))
        assert spectrum.max_deviation() < 1e-9
        assert spectrum.rows()[1]["closed_form"] == pytest.approx(2.0 * 0.5 / 1.2**2)

    def test_energy_at_q_one(self):
        assert np.allclose(energy_closed_form(np.arange(5), 1.0, 1.0, 1.0), np.arange(5))

    @pytest.mark.parametrize("operator", ["b", "bd"])
    @pytest.mark.parametrize("t", [0.3, 1.7, 10.0])
    def test_heisenberg_evolution(self, operator, t):
        rep = FockRep.build(32, 1.2)
        residual = heisenberg_evolution_check(rep, 1.0, 1.0, t, operator)
        assert residual.relative < 1e-12
        assert residual.absolute < 1e-9
        assert residual.absolute >= residual.relative

    def test_bad_parameters(self):
        with pytest.raises(RepresentationError):
            FockRep.build(1, 1.2)
        with pytest.raises(RepresentationError):
            FockRep.build(4, -1.0)
        with pytest.raises(RepresentationError):
            heisenberg_evolution_check(FockRep.build(4, 1.2), operator="K")


class TestPolynomialMatrices:
    def test_normal_order_matches_direct_product(self):
        rep = FockRep.build(20, 1.2, 0.7)
        word = word_of(["b", "b", "bd", "K", "bd"])
        mask = interior_mask(rep.dim, len(word.letters))
        direct = word_matrix(rep, word)
        ordered = evaluate_poly(rep, normal_order(word))
        assert np.allclose(direct[mask], ordered[mask], rtol=1e-10, atol=1e-10)

    def test_adjoint(self):
        rep = FockRep.build(12, 1.3, 0.8)
        b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
        bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")
        K = NCPoly.generator(OSCILLATOR_ALPHABET, "K")
        x = (K * b * b).scale(QEtaCoeff.symbol("i")) + bd * b * b
        assert np.allclose(evaluate_poly(rep, hermitian_conjugate(x)), evaluate_poly(rep, x).conj().T)

    def test_plane_polynomials_are_rejected(self):
        with pytest.raises(RepresentationError):
            evaluate_poly(FockRep.build(4, 1.2), NCPoly.generator(PLANE_ALPHABET, "z"))


class TestWeylWindow:
    def test_relation_and_diagonal(self):
        rep = WeylRep.build(20, 1.1)
        assert weyl_relation_check(rep) < 1e-12
        assert weyl_diagonal_law(rep) < 1e-12

    def test_q_must_exceed_one(self):
        with pytest.raises(RepresentationError):
            WeylRep.build(10, 0.9)

    def test_trace_weight_inverts_the_exponential(self):
        lam = np.array([0.0, 0.2, 1.0])
        product = trace_weight(lam, 1.5) * basic_exp_numeric(lam, 1.5, BASE_Q2)
        assert np.allclose(product, 1.0)

    def test_trace_report(self):
        rows = trace_qintegral_report(1.5, 3, (20, 25, 30))
        assert len(rows) == 9
        final = [row for row in rows if row.window == 30]
        assert max(row.stabilization for row in final) < 1e-8
        assert all(row.ladder_deviation < 1e-10 for row in rows)
        assert final[0].ratio == pytest.approx(1.0)
        assert final[1].moment_ratio == pytest.approx(1 + 1.5**2)

    def test_trace_report_rejects_n_zero(self):
        with pytest.raises(RepresentationError):
            trace_qintegral_report(1.5, 0, (20,))


def test_bch_weyl_form():
    assert weyl_form_bch_check(60, 0.04, 1.0, 20) < 1e-6
    with pytest.raises(RepresentationError):
        weyl_form_bch_check(10, 0.04, block=11)
