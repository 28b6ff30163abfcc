"""
Named invariant suites behind `verify`.

Every check returns (passed, detail); run_suite times them and collects
CheckResult rows. Randomized checks draw from a numpy generator seeded with
QOSC_RANDOM_SEED and scale their sample counts by QOSC_VERIFY_SAMPLES.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from config import (
    QOSC_ACTION_TOL,
    QOSC_BCH_TOL,
    QOSC_EVOLUTION_TOL,
    QOSC_RANDOM_SEED,
    QOSC_RELATION_TOL,
    QOSC_SPECTRUM_TOL,
    QOSC_TRACE_TOL,
    QOSC_VERIFY_SAMPLES,
)
from expr import parse_poly, print_expr
from kernels import (
    convolve_kernels,
    kernel_from_matrix_elements,
    kernel_of_monomial,
    kernel_of_operator,
    star_via_kernels,
)
from matrep import (
    FockRep,
    WeylRep,
    evaluate_poly,
    fock_corner_value,
    fock_number_identity,
    fock_relation_residual,
    hamiltonian_spectrum,
    heisenberg_evolution_check,
    interior_mask,
    trace_qintegral_report,
    weyl_diagonal_law,
    weyl_form_bch_check,
    weyl_relation_check,
    word_matrix,
)
from ncalg import (
    GAMMA_LIMIT,
    LEFTMOST,
    OSCILLATOR_ALPHABET,
    PLANE_ALPHABET,
    RIGHTMOST,
    NCMonomial,
    NCPoly,
    RewriteSystem,
    Word,
    commutator,
    hermitian_conjugate,
    multiply,
    normal_order,
    plane_alphabet,
    q_commutator,
    specialize_harmonic,
    substitute_contraction,
)
from qarith import (
    QEtaCoeff,
    evaluate_qrat,
    exp_inverse_residual,
    q_factorial,
    q_number,
    q_power,
    summation_theorem_residual,
)
from reduced_action import PathConfig, phi_eval, reduced_action_residual
from symcalc import (
    COMMUTATIVE,
    WEYL,
    antiholomorphic,
    basis_overlap,
    bf_apply,
    classical_hamiltonian,
    commutative_bracket_oracle,
    commutative_route_symbol,
    moment_by_postulates,
    operator_of,
    poisson_commutative,
    q_integral_moment,
    q_normal_symbol,
    q_poisson,
    q_poisson_oracle,
    star_closed_form,
    star_derivative_form,
    star_expand,
    star_product,
    symbol_of,
)

logger = logging.getLogger(__name__)

SUITE_NAMES = ("qarith", "ncalg", "symcalc", "matrep")

Check = Callable[[], Tuple[bool, str]]
SUITES: Dict[str, List[Tuple[str, Check]]] = {name: [] for name in SUITE_NAMES}


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float


def check(suite: str, name: str):
    def register(fn: Check) -> Check:
        SUITES[suite].append((name, fn))
        return fn
    return register


def samples(count: int) -> int:
    return max(1, int(round(count * QOSC_VERIFY_SAMPLES)))


def rng() -> np.random.Generator:
    return np.random.default_rng(QOSC_RANDOM_SEED)


# =====================
# Random generators
# =====================


def random_word(gen: np.random.Generator, alphabet, max_length: int = 8) -> Word:
    letters = alphabet.letters()
    length = int(gen.integers(0, max_length + 1))
    chosen = tuple(letters[int(i)] for i in gen.integers(0, len(letters), size=length))
    return Word(alphabet, chosen, QEtaCoeff.one())


def random_poly(gen: np.random.Generator, alphabet, max_terms: int = 5, max_exp: int = 2) -> NCPoly:
    width = len(alphabet.generator_names())
    terms = []
    for _ in range(int(gen.integers(1, max_terms + 1))):
        exps = tuple(int(e) for e in gen.integers(0, max_exp + 1, size=width))
        k_power = int(gen.integers(-2, 3))
        value = q_power(int(gen.integers(-2, 3))) * int(gen.integers(1, 4))
        coeff = QEtaCoeff.scalar(value) * QEtaCoeff.eta2(int(gen.integers(0, 2)))
        terms.append((NCMonomial(k_power, exps), coeff))
    return NCPoly(alphabet, terms)


def _grid():
    for p in range(-2, 3):
        for t in range(-2, 3):
            for a in range(4):
                for b in range(4):
                    for c in range(4):
                        for d in range(4):
                            yield p, a, b, t, c, d


def _first_failure(failures: List[str], total: int) -> Tuple[bool, str]:
    if failures:
        return False, f"{len(failures)} of {total} cases fail; first: {failures[0]}"
    return True, f"{total} cases"


# =====================
# qarith
# =====================


@check("qarith", "q-number shift identity [i+j] = q^{2j}[i] + [j]")
def _shift_identity():
    failures = [
        f"i={i} j={j}"
        for i in range(51)
        for j in range(51)
        if q_number(i + j) != q_power(2 * j) * q_number(i) + q_number(j)
    ]
    return _first_failure(failures, 51 * 51)


@check("qarith", "reflection [-j] = -q^{-2j}[j]")
def _reflection():
    failures = [f"j={j}" for j in range(51) if q_number(-j) != -q_power(-2 * j) * q_number(j)]
    return _first_failure(failures, 51)


@check("qarith", "summation theorem for commuting arguments, order 12")
def _summation_theorem():
    residual = summation_theorem_residual(12)
    return not residual, f"{len(residual)} mismatched coefficients"


@check("qarith", "e_{q^2}(x) e_{1/q^2}(-x) = 1, order 12")
def _exp_inverse():
    bad = exp_inverse_residual(12)
    return not bad, f"mismatched orders: {bad}" if bad else "orders 0..12"


@check("qarith", "q = 1 specialization of [n] and [n]!")
def _classical_specialization():
    failures = [
        f"n={n}"
        for n in range(11)
        if evaluate_qrat(q_number(n), 1) != n or evaluate_qrat(q_factorial(n), 1) != math.factorial(n)
    ]
    return _first_failure(failures, 11)


# =====================
# ncalg
# =====================


@check("ncalg", "critical pairs of the relation tables")
def _critical_pairs():
    failures = []
    for alphabet in (OSCILLATOR_ALPHABET, PLANE_ALPHABET, plane_alphabet(2)):
        failures.extend(f"{alphabet.describe()}: {' '.join(w)}" for w in RewriteSystem(alphabet).critical_pairs())
    return _first_failure(failures, 3)


@check("ncalg", "strategy independence of normal_order on random words")
def _confluence():
    gen = rng()
    count = samples(1000)
    failures = []
    for index in range(count):
        alphabet = (OSCILLATOR_ALPHABET, PLANE_ALPHABET, plane_alphabet(2))[index % 3]
        word = random_word(gen, alphabet)
        left = normal_order(word, LEFTMOST)
        right = normal_order(word, RIGHTMOST)
        product = NCPoly.constant(alphabet, 1)
        for letter in word.letters:
            product = multiply(product, NCPoly.generator(alphabet, letter))
        if not (left == right == product):
            failures.append(" ".join(word.letters))
    return _first_failure(failures, count)


@check("ncalg", "associativity of multiply")
def _associativity():
    gen = rng()
    count = samples(100)
    failures = []
    for index in range(count):
        alphabet = OSCILLATOR_ALPHABET if index % 2 == 0 else PLANE_ALPHABET
        x, y, z = (random_poly(gen, alphabet) for _ in range(3))
        if multiply(multiply(x, y), z) != multiply(x, multiply(y, z)):
            failures.append(f"x={x} y={y} z={z}")
    return _first_failure(failures, count)


@check("ncalg", "Leibniz rule for commutators with N^a_aa")
def _leibniz():
    gen = rng()
    count = samples(40)
    failures = []
    for a in (1, 2):
        n = NCPoly.q_normal(OSCILLATOR_ALPHABET, a, a, a)
        for _ in range(count):
            x = random_poly(gen, OSCILLATOR_ALPHABET, 3)
            y = random_poly(gen, OSCILLATOR_ALPHABET, 3)
            lhs = commutator(n, multiply(x, y))
            rhs = multiply(commutator(n, x), y) + multiply(x, commutator(n, y))
            if lhs != rhs:
                failures.append(f"a={a} X={x} Y={y}")
    return _first_failure(failures, 2 * count)


@check("ncalg", "q-commutator with N^a_aa is the plain commutator")
def _qcomm_plain():
    failures = []
    total = 0
    for a in range(1, 4):
        n = NCPoly.q_normal(OSCILLATOR_ALPHABET, a, a, a)
        for t in range(-2, 3):
            for c in range(4):
                for d in range(4):
                    m = NCPoly.q_normal(OSCILLATOR_ALPHABET, t, c, d)
                    total += 1
                    if q_commutator(n, m) != commutator(n, m):
                        failures.append(f"a={a} N^{t}_{c}{d}")
    return _first_failure(failures, total)


@check("ncalg", "[b, b+] under q^2 = 1 + gamma eta^2 is eta^2 (1 + gamma b+b)")
def _gamma_contraction():
    b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
    bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")
    result = substitute_contraction(commutator(b, bd), GAMMA_LIMIT, 1)
    expected = parse_poly("eta2 + gamma*eta2*bd*b")
    return result == expected, print_expr(result)


@check("ncalg", "q = 1, eta^2 = hbar gives [a, a+] = hbar")
def _harmonic():
    b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
    bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")
    result = specialize_harmonic(commutator(b, bd))
    expected = NCPoly.constant(OSCILLATOR_ALPHABET, QEtaCoeff.symbol("hbar"))
    return result == expected, print_expr(result)


@check("ncalg", "parse/print round trip")
def _round_trip():
    gen = rng()
    count = samples(1000)
    failures = []
    for index in range(count):
        alphabet = (OSCILLATOR_ALPHABET, PLANE_ALPHABET, plane_alphabet(2))[index % 3]
        x = random_poly(gen, alphabet)
        if parse_poly(print_expr(x), alphabet) != x:
            failures.append(print_expr(x))
    return _first_failure(failures, count)


# =====================
# symcalc (and kernels, reduced action)
# =====================


@check("symcalc", "operator/symbol round trip")
def _symbol_round_trip():
    gen = rng()
    count = samples(500)
    failures = []
    for _ in range(count):
        x = random_poly(gen, OSCILLATOR_ALPHABET)
        if operator_of(symbol_of(x)) != x:
            failures.append(print_expr(x))
    return _first_failure(failures, count)


@check("symcalc", "Weyl star product: truncation = closed form = derivative form")
def _weyl_grid():
    failures = []
    total = 0
    for p, a, b, t, c, d in _grid():
        total += 1
        n1, n2 = q_normal_symbol(p, a, b), q_normal_symbol(t, c, d)
        expanded = star_expand(n1, n2, WEYL, 1)
        if expanded != star_closed_form(p, a, b, t, c, d) or expanded != star_derivative_form(n1, n2, WEYL):
            failures.append(f"N^{p}_{a}{b} * N^{t}_{c}{d}")
    return _first_failure(failures, total)


@check("symcalc", "Weyl star product through kernel convolution")
def _kernel_grid():
    failures = []
    total = 0
    for p, a, b, t, c, d in _grid():
        total += 1
        n1, n2 = q_normal_symbol(p, a, b), q_normal_symbol(t, c, d)
        if star_via_kernels(n1, n2) != star_product(n1, n2, WEYL):
            failures.append(f"N^{p}_{a}{b} * N^{t}_{c}{d}")
    return _first_failure(failures, total)


@check("symcalc", "q-Poisson bracket = lim i/eta^2 of the q-commutator")
def _q_poisson_grid():
    failures = []
    total = 0
    for p, a, b, t, c, d in _grid():
        total += 1
        n1, n2 = q_normal_symbol(p, a, b), q_normal_symbol(t, c, d)
        if q_poisson(n1, n2) != q_poisson_oracle(n1, n2):
            failures.append(f"N^{p}_{a}{b}, N^{t}_{c}{d}")
    return _first_failure(failures, total)


@check("symcalc", "q-classical equations of motion from H = omega K zb z")
def _q_classical():
    h = classical_hamiltonian()
    z = q_normal_symbol(0, 0, 1)
    zb = q_normal_symbol(0, 1, 0)
    i_omega = QEtaCoeff.symbol("i") * QEtaCoeff.symbol("omega")
    checks = [
        q_poisson(h, z) == q_normal_symbol(1, 0, 1, -i_omega * QEtaCoeff.scalar(q_power(-2))),
        q_poisson(h, zb) == q_normal_symbol(1, 1, 0, i_omega),
        not q_poisson(h, q_normal_symbol(0, 1, 1)),
        q_poisson(z, zb) == NCPoly.constant(PLANE_ALPHABET, QEtaCoeff.symbol("i")),
    ]
    return all(checks), f"{sum(checks)} of {len(checks)} brackets match"


def _commutative_monomials(max_degree: int):
    return [
        NCPoly.monomial(PLANE_ALPHABET, 0, (a, total - a))
        for total in range(max_degree + 1)
        for a in range(total + 1)
    ]


@check("symcalc", "commutative star product and Poisson bracket, degree <= 4")
def _commutative_grid():
    monomials = _commutative_monomials(4)
    failures = []
    for f in monomials:
        for g in monomials:
            if star_expand(f, g, COMMUTATIVE, 1) != star_derivative_form(f, g, COMMUTATIVE):
                failures.append(f"star {f} * {g}")
            if poisson_commutative(f, g) != commutative_bracket_oracle(f, g):
                failures.append(f"bracket {{{f}, {g}}}")
    return _first_failure(failures, 2 * len(monomials) ** 2)


@check("symcalc", "commutative moment route matches the operator product, m, l <= 4")
def _commutative_route():
    failures = []
    for m in range(5):
        for l in range(5):
            z_m = NCPoly.monomial(PLANE_ALPHABET, 0, (0, m))
            zb_l = NCPoly.monomial(PLANE_ALPHABET, 0, (l, 0))
            if commutative_route_symbol(m, l) != star_product(z_m, zb_l, COMMUTATIVE):
                failures.append(f"m={m} l={l}")
    return _first_failure(failures, 25)


@check("symcalc", "closed-form kernels match matrix-element kernels, p, r, s <= 3")
def _kernel_consistency():
    failures = []
    total = 0
    for p in range(-1, 4):
        for r in range(4):
            for s in range(4):
                total += 1
                op = NCPoly.q_normal(OSCILLATOR_ALPHABET, p, r, s)
                closed = kernel_of_monomial(p, r, s, 8).coefficients()
                raw = kernel_from_matrix_elements(op, 8).coefficients()
                if closed != raw:
                    failures.append(f"p={p} r={r} s={s}")
    return _first_failure(failures, total)


@check("symcalc", "kernel convolution reproduces the product kernel")
def _kernel_convolution():
    b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
    bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")
    product = convolve_kernels(kernel_of_operator(b), kernel_of_operator(bd))
    expected = kernel_of_operator(multiply(b, bd))
    identity = convolve_kernels(kernel_of_monomial(0, 0, 0), kernel_of_monomial(1, 2, 1))
    checks = [
        product.coefficients() == expected.coefficients(),
        identity.coefficients() == kernel_of_monomial(1, 2, 1).coefficients(),
    ]
    return all(checks), f"{sum(checks)} of {len(checks)} convolutions match"


@check("symcalc", "q-integral moments from the postulates, n, m <= 10")
def _moments():
    failures = [
        f"n={n} m={m}"
        for n in range(11)
        for m in range(11)
        if q_integral_moment(n, m) != moment_by_postulates(n, m)
        or q_integral_moment(n, m, COMMUTATIVE) != moment_by_postulates(n, m)
    ]
    return _first_failure(failures, 121)


@check("symcalc", "Bargmann-Fock representation and orthonormal basis")
def _bargmann_fock():
    b = NCPoly.generator(OSCILLATOR_ALPHABET, "b")
    bd = NCPoly.generator(OSCILLATOR_ALPHABET, "bd")
    relation = multiply(b, bd) - multiply(bd, b).scale(q_power(2))
    failures = []
    for n in range(8):
        image = bf_apply(relation, antiholomorphic(n))
        if image != antiholomorphic(n, QEtaCoeff.eta2()):
            failures.append(f"relation on zb^{n}")
        for m in range(8):
            expected = QEtaCoeff.one() if m == n else QEtaCoeff.zero()
            if basis_overlap(m, n) != expected:
                failures.append(f"<psi_{m}, psi_{n}>")
    return _first_failure(failures, 72)


@check("symcalc", "reduced action: constant rho is stationary, perturbed rho is not")
def _reduced_action():
    grid = np.linspace(0.0, 10.0, 100).tolist()
    constant = PathConfig(q=0.5, k0=1.0, grid=grid, rho=1.3)
    perturbed = PathConfig(q=0.5, k0=1.0, grid=grid, rho=(1 + 0.1 * np.sin(grid)).tolist())
    flat = float(np.max(np.abs(reduced_action_residual(constant))))
    moving = float(np.max(np.abs(reduced_action_residual(perturbed))))
    phi0 = abs(phi_eval(0.0, 0.5) - 0.25)
    passed = flat <= QOSC_ACTION_TOL and moving >= 1e-3 and phi0 <= 1e-12
    return passed, f"constant {flat:.2e}, perturbed {moving:.2e}, |phi(0) - q^2| {phi0:.2e}"


# =====================
# matrep
# =====================


@check("matrep", "Fock relation residual vanishes off the corner")
def _fock_relation():
    rep = FockRep.build(8, 1.3, 1.0)
    residual = fock_relation_residual(rep)
    corner = residual[-1, -1]
    residual[-1, -1] = 0.0
    off = float(np.max(np.abs(residual)))
    corner_error = abs(corner - fock_corner_value(rep))
    return off <= QOSC_RELATION_TOL and corner_error <= 1e-9, f"off-corner {off:.2e}, corner error {corner_error:.2e}"


@check("matrep", "q^{2N} = 1 + (q^2 - 1) b+b / eta^2")
def _number_identity():
    value = fock_number_identity(FockRep.build(32, 1.2, 1.0))
    return value <= QOSC_RELATION_TOL, f"{value:.2e}"


@check("matrep", "spectrum of omega K b+b")
def _spectrum():
    deviation = hamiltonian_spectrum(FockRep.build(32, 1.2, 1.0), 1.0).max_deviation()
    return deviation <= QOSC_SPECTRUM_TOL, f"{deviation:.2e}"


@check("matrep", "Heisenberg evolution of b and b+")
def _evolution():
    rep = FockRep.build(32, 1.2, 1.0)
    worst = max(
        heisenberg_evolution_check(rep, 1.0, 1.0, t, operator).relative
        for t in (0.3, 1.7, 10.0)
        for operator in ("b", "bd")
    )
    return worst <= QOSC_EVOLUTION_TOL, f"{worst:.2e}"


@check("matrep", "q-plane relation in the l2 window")
def _weyl_relation():
    rep = WeylRep.build(20, 1.1)
    residual = weyl_relation_check(rep)
    law = weyl_diagonal_law(rep)
    return residual <= QOSC_RELATION_TOL and law <= 1e-12, f"relation {residual:.2e}, diagonal law {law:.2e}"


@check("matrep", "trace of the q-integral stabilizes in the window")
def _trace():
    rows = trace_qintegral_report(1.5, 3, (20, 25, 30))
    final = [row for row in rows if row.window == 30]
    worst = max(row.stabilization for row in final)
    table = ", ".join(f"n={r.n}: T/T1={r.ratio:.6g} vs {r.moment_ratio:.6g}" for r in final)
    return worst <= QOSC_TRACE_TOL, f"stabilization {worst:.2e}; {table}"


@check("matrep", "Weyl form of the commutation relation")
def _bch():
    value = weyl_form_bch_check(60, 0.04, 1.0, 20)
    return value <= QOSC_BCH_TOL, f"{value:.2e}"


@check("matrep", "normal-ordered polynomials match direct matrix products")
def _symbolic_numeric():
    gen = rng()
    rep = FockRep.build(24, 1.2, 0.7)
    count = samples(50)
    failures = []
    for _ in range(count):
        word = random_word(gen, OSCILLATOR_ALPHABET, 6)
        direct = word_matrix(rep, word)
        ordered = evaluate_poly(rep, normal_order(word))
        mask = interior_mask(rep.dim, len(word.letters))
        scale = max(1.0, float(np.max(np.abs(direct[mask]))) if mask.any() else 1.0)
        if mask.any() and float(np.max(np.abs(direct - ordered)[mask])) / scale > 1e-10:
            failures.append(" ".join(word.letters))
    return _first_failure(failures, count)


@check("matrep", "hermitian_conjugate is the matrix adjoint")
def _adjoint():
    gen = rng()
    rep = FockRep.build(16, 1.3, 0.8)
    count = samples(30)
    failures = []
    for _ in range(count):
        x = random_poly(gen, OSCILLATOR_ALPHABET, 4, 3).scale(QEtaCoeff.symbol("i") + 1)
        adjoint = evaluate_poly(rep, hermitian_conjugate(x))
        direct = evaluate_poly(rep, x).conj().T
        scale = max(1.0, float(np.max(np.abs(direct))))
        if float(np.max(np.abs(adjoint - direct))) / scale > 1e-10:
            failures.append(print_expr(x))
    return _first_failure(failures, count)


# =====================
# Runner
# =====================


def run_suite(name: str) -> List[CheckResult]:
    names = SUITE_NAMES if name == "all" else (name,)
    results = []
    for suite in names:
        if suite not in SUITES:
            raise KeyError(suite)
        for label, fn in SUITES[suite]:
            start = time.perf_counter()
            passed, detail = fn()
            elapsed = time.perf_counter() - start
            logger.info("%s / %s: %s (%.2fs)", suite, label, "ok" if passed else "FAIL", elapsed)
            results.append(CheckResult(suite, label, bool(passed), detail, elapsed))
    return results
