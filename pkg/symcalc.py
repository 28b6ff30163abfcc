"""
Bargmann-Fock symbol calculus.

Normal symbols live on the single-copy plane alphabet: the symbol of
K^p b+^r b^s is K^p zb^r z^s. Star products are computed exactly through the
operator product and the expansion formulas (derivative form, closed form,
the commutative moment route) are kept alongside as identities to check
against it. Commutative symbols are plane polynomials without K whose
generators are read as commuting variables.
"""

import logging
from typing import List, Optional, Tuple, Union

from fractions import Fraction

from ncalg import (
    GAMMA_LIMIT,
    OSCILLATOR_ALPHABET,
    PLANE_ALPHABET,
    NCMonomial,
    NCPoly,
    commutator,
    divide_by_eta2_and_limit,
    multiply,
    q_commutator,
    substitute_contraction,
)
from qarith import (
    BASE_INV_Q2,
    QAlgebraError,
    QEtaCoeff,
    QFIELD,
    QRat,
    exp_coefficient,
    q_factorial,
    q_number,
    q_power,
)

logger = logging.getLogger(__name__)

WEYL = "weyl"
COMMUTATIVE = "commutative"

NONCOMMUTATIVE = "noncommutative"
MOMENT_VARIANTS = (NONCOMMUTATIVE, COMMUTATIVE)

LEFT_DERIVATIVES = ("d", "dbar")
RIGHT_DERIVATIVES = ("dR", "dbarR")

# A normal symbol is a plane polynomial in K, zb, z.
QNormalSymbol = NCPoly

Gamma = Optional[Union[int, Fraction]]


class SymbolCalculusError(QAlgebraError):
    """Exception raised for inputs outside the domain of a symbol operation."""
    pass


def _require_oscillator(op: NCPoly) -> None:
    if op.alphabet != OSCILLATOR_ALPHABET:
        raise SymbolCalculusError(
            f"Expected an oscillator polynomial, got the {op.alphabet.describe()} alphabet"
        )


def _require_symbol(sym: NCPoly) -> None:
    if sym.alphabet != PLANE_ALPHABET:
        raise SymbolCalculusError(
            f"Expected a single-copy plane symbol, got the {sym.alphabet.describe()} alphabet"
        )


def _require_commutative(sym: NCPoly) -> None:
    _require_symbol(sym)
    if sym.has_k():
        raise SymbolCalculusError(f"Commutative symbols cannot depend on K: {sym.render()}")


def q_normal_symbol(p: int, r: int, s: int, coeff=1) -> QNormalSymbol:
    """K^p zb^r z^s."""
    return NCPoly.q_normal(PLANE_ALPHABET, p, r, s, coeff)


# =====================
# Operator <-> symbol
# =====================


def symbol_of(op: NCPoly) -> QNormalSymbol:
    _require_oscillator(op)
    return op.relabel(PLANE_ALPHABET)


def operator_of(sym: QNormalSymbol) -> NCPoly:
    _require_symbol(sym)
    return sym.relabel(OSCILLATOR_ALPHABET)


# =====================
# Derivative maps
# =====================


def _derivative_term(kind: str, monomial: NCMonomial) -> Optional[Tuple[QRat, NCMonomial]]:
    p, (a, b) = monomial.k_power, monomial.exps
    if kind == "dbar":
        if a == 0:
            return None
        return q_power(-2 * p) * q_number(a), NCMonomial(p, (a - 1, b))
    if kind == "d":
        if b == 0:
            return None
        return q_power(2 * p - 2 * a - 2 * (b - 1)) * q_number(b), NCMonomial(p, (a, b - 1))
    if kind == "dR":
        if b == 0:
            return None
        return q_number(b), NCMonomial(p, (a, b - 1))
    if kind == "dbarR":
        if a == 0:
            return None
        return q_power(-2 * (a - 1) - 2 * b) * q_number(a), NCMonomial(p, (a - 1, b))
    raise SymbolCalculusError(f"Unknown derivative '{kind}'")


def _apply_derivative(kind: str, sym: QNormalSymbol) -> QNormalSymbol:
    _require_symbol(sym)
    terms = []
    for monomial, coeff in sym.terms():
        result = _derivative_term(kind, monomial)
        if result is not None:
            factor, reduced = result
            terms.append((reduced, coeff * factor))
    return NCPoly(PLANE_ALPHABET, terms)


def left_derivative(kind: str, sym: QNormalSymbol) -> QNormalSymbol:
    """
    Left q-derivatives on normal symbols.

    d(K^p zb^a z^b) = q^{2p-2a-2(b-1)} [b] K^p zb^a z^{b-1}
    dbar(K^p zb^a z^b) = q^{-2p} [a] K^p zb^{a-1} z^b
    """
    if kind not in LEFT_DERIVATIVES:
        raise SymbolCalculusError(f"Unknown left derivative '{kind}', expected one of {LEFT_DERIVATIVES}")
    return _apply_derivative(kind, sym)


def right_derivative(kind: str, sym: QNormalSymbol) -> QNormalSymbol:
    """
    Right q-derivatives, acting from the right.

    (K^p zb^a z^b) dR = [b] K^p zb^a z^{b-1}
    (K^p zb^a z^b) dbarR = q^{-2(a-1)-2b} [a] K^p zb^{a-1} z^b
    """
    if kind not in RIGHT_DERIVATIVES:
        raise SymbolCalculusError(f"Unknown right derivative '{kind}', expected one of {RIGHT_DERIVATIVES}")
    return _apply_derivative(kind, sym)


def ordinary_derivative(kind: str, sym: QNormalSymbol) -> QNormalSymbol:
    """d/dz ("d") or d/dzb ("dbar") of a commutative symbol."""
    _require_commutative(sym)
    index = {"dbar": 0, "d": 1}.get(kind)
    if index is None:
        raise SymbolCalculusError(f"Unknown derivative '{kind}'")
    terms = []
    for monomial, coeff in sym.terms():
        e = monomial.exps[index]
        if e:
            exps = list(monomial.exps)
            exps[index] -= 1
            terms.append((NCMonomial(0, tuple(exps)), coeff * e))
    return NCPoly(PLANE_ALPHABET, terms)


def commutative_product(x: QNormalSymbol, y: QNormalSymbol) -> QNormalSymbol:
    _require_commutative(x)
    _require_commutative(y)
    terms = []
    for m1, c1 in x.terms():
        for m2, c2 in y.terms():
            exps = tuple(e1 + e2 for e1, e2 in zip(m1.exps, m2.exps))
            terms.append((NCMonomial(0, exps), c1 * c2))
    return NCPoly(PLANE_ALPHABET, terms)


# =====================
# Star products
# =====================


def _check_algebra(algebra: str) -> None:
    if algebra not in (WEYL, COMMUTATIVE):
        raise SymbolCalculusError(f"Unknown algebra '{algebra}', expected '{WEYL}' or '{COMMUTATIVE}'")


def _gamma_coeff(gamma: Gamma) -> QEtaCoeff:
    if gamma is None:
        return QEtaCoeff.symbol("gamma")
    return QEtaCoeff.scalar(Fraction(gamma))


def star_product(s1: QNormalSymbol, s2: QNormalSymbol, algebra: str = WEYL) -> QNormalSymbol:
    """
    Exact star product: the normal symbol of Op(s1)Op(s2).

    In the commutative algebra the symbols carry no K and the deformation
    parameter is written hbar instead of eta^2.
    """
    _check_algebra(algebra)
    if algebra == COMMUTATIVE:
        _require_commutative(s1)
        _require_commutative(s2)
        product = symbol_of(multiply(operator_of(s1), operator_of(s2)))
        return product.map_coefficients(lambda c: c.rename("eta2", "hbar"))
    return symbol_of(multiply(operator_of(s1), operator_of(s2)))


def star_expand(
    s1: QNormalSymbol, s2: QNormalSymbol, algebra: str = WEYL, order: int = 1, gamma: Gamma = None
) -> QNormalSymbol:
    """
    Star product truncated at eta^2 (hbar) degree order.

    The Weyl algebra keeps q fixed; the commutative one sets
    q^2 = 1 + gamma*hbar before truncating.
    """
    _check_algebra(algebra)
    if order < 0:
        raise SymbolCalculusError("expansion order must be nonnegative")
    if algebra == WEYL:
        exact = star_product(s1, s2, WEYL)
        return exact.map_coefficients(lambda c: c.truncate_eta(order))
    _require_commutative(s1)
    _require_commutative(s2)
    product = symbol_of(multiply(operator_of(s1), operator_of(s2)))
    contracted = substitute_contraction(product, GAMMA_LIMIT, order, gamma)
    return contracted.map_coefficients(lambda c: c.rename("eta2", "hbar"))


def star_derivative_form(
    s1: QNormalSymbol, s2: QNormalSymbol, algebra: str = WEYL, gamma: Gamma = None
) -> QNormalSymbol:
    """
    First-order star product written with derivatives.

    weyl:         N1 N2 + eta^2 (N1 dR)(dbar N2)
    commutative:  N1 N2 + hbar (1 + gamma zb z) dN1 dbarN2
    """
    _check_algebra(algebra)
    if algebra == WEYL:
        correction = multiply(right_derivative("dR", s1), left_derivative("dbar", s2))
        return multiply(s1, s2) + correction.scale(QEtaCoeff.eta2())
    metric = _contraction_metric(gamma)
    correction = commutative_product(
        metric, commutative_product(ordinary_derivative("d", s1), ordinary_derivative("dbar", s2))
    )
    return commutative_product(s1, s2) + correction.scale(QEtaCoeff.symbol("hbar"))


def _contraction_metric(gamma: Gamma) -> QNormalSymbol:
    """1 + gamma zb z."""
    return NCPoly(
        PLANE_ALPHABET,
        [(NCMonomial(0, (0, 0)), QEtaCoeff.one()), (NCMonomial(0, (1, 1)), _gamma_coeff(gamma))],
    )


def star_closed_form(p: int, a: int, b: int, t: int, c: int, d: int) -> QNormalSymbol:
    """Two-term expansion of N^p_ab * N^t_cd through eta^2."""
    crossing = q_power(2 * t * (a - b))
    leading = NCPoly(
        PLANE_ALPHABET, {NCMonomial(p + t, (a + c, b + d)): q_power(2 * b * c) * crossing}
    )
    if b == 0 or c == 0:
        return leading
    value = q_power(2 * (b - 1) * (c - 1)) * crossing * q_number(b) * q_number(c)
    correction = NCPoly(
        PLANE_ALPHABET,
        {NCMonomial(p + t, (a + c - 1, b + d - 1)): QEtaCoeff.eta2() * QEtaCoeff.scalar(value)},
    )
    return leading + correction


# =====================
# Poisson brackets
# =====================


def poisson_commutative(n1: QNormalSymbol, n2: QNormalSymbol, gamma: Gamma = None) -> QNormalSymbol:
    """i (1 + gamma zb z)(dN1 dbarN2 - dN2 dbarN1) with ordinary derivatives."""
    _require_commutative(n1)
    _require_commutative(n2)
    cross = commutative_product(ordinary_derivative("d", n1), ordinary_derivative("dbar", n2)) - commutative_product(
        ordinary_derivative("d", n2), ordinary_derivative("dbar", n1)
    )
    return commutative_product(_contraction_metric(gamma), cross).scale(QEtaCoeff.symbol("i"))


def commutative_bracket_oracle(n1: QNormalSymbol, n2: QNormalSymbol, gamma: Gamma = None) -> QNormalSymbol:
    """i/hbar times the star commutator, at hbar -> 0 with q^2 = 1 + gamma*hbar."""
    _require_commutative(n1)
    _require_commutative(n2)
    bracket = symbol_of(commutator(operator_of(n1), operator_of(n2)))
    contracted = substitute_contraction(bracket, GAMMA_LIMIT, 1, gamma)
    return divide_by_eta2_and_limit(contracted).scale(QEtaCoeff.symbol("i"))


def q_poisson(n1: QNormalSymbol, n2: QNormalSymbol) -> QNormalSymbol:
    """
    q-deformed Poisson bracket, bilinear with the q-power taken per monomial pair:

        {N^p_ab, N^t_cd}_q = i [(N1 dR)(dbar N2) - q^{2(b+c-1)} (N1 dbarR)(d N2)]
    """
    _require_symbol(n1)
    _require_symbol(n2)
    total = NCPoly.zero(PLANE_ALPHABET)
    for m1, c1 in n1.terms():
        for m2, c2 in n2.terms():
            x = NCPoly(PLANE_ALPHABET, {m1: c1})
            y = NCPoly(PLANE_ALPHABET, {m2: c2})
            b, c = m1.exps[1], m2.exps[0]
            first = multiply(right_derivative("dR", x), left_derivative("dbar", y))
            second = multiply(right_derivative("dbarR", x), left_derivative("d", y))
            total = total + first - second.scale(q_power(2 * (b + c - 1)))
    return total.scale(QEtaCoeff.symbol("i"))


def q_poisson_oracle(n1: QNormalSymbol, n2: QNormalSymbol) -> QNormalSymbol:
    """lim i/eta^2 of the symbol of the q-commutator."""
    bracket = q_commutator(operator_of(n1), operator_of(n2))
    return divide_by_eta2_and_limit(symbol_of(bracket)).scale(QEtaCoeff.symbol("i"))


def classical_hamiltonian() -> QNormalSymbol:
    """H_cl = omega K zb z."""
    return q_normal_symbol(1, 1, 1, QEtaCoeff.symbol("omega"))


# =====================
# q-integral, scalar product, BF representation
# =====================


def q_integral_moment(n: int, m: int, variant: str = NONCOMMUTATIVE, scaled: bool = False) -> QEtaCoeff:
    """
    Integral of z^n zb^m against the variant's measure: delta_mn [n]!.

    With scaled=True the eta-scaled measure is used and the moment carries eta^{2n}.
    """
    if variant not in MOMENT_VARIANTS:
        raise SymbolCalculusError(f"Unknown measure variant '{variant}'")
    if n < 0 or m < 0:
        raise SymbolCalculusError("moment indices must be nonnegative")
    if n != m:
        return QEtaCoeff.zero()
    value = QEtaCoeff.scalar(q_factorial(n))
    if scaled:
        value = value * QEtaCoeff.eta2(n)
    return value


def moment_by_postulates(n: int, m: int) -> QEtaCoeff:
    """
    Moment table rebuilt from the integral's postulates alone.

    Normalisation gives I_00 = 1. Integrating dbar(z^{n+1} zb^{n+1}) by parts gives
    I_{n+1,n+1} = [n+1] I_nn. For n != m the two Stokes relations force
    I_mn (q^{n-m}[m+1] - q^{m-n}[n+1]) = 0 with a nonzero bracket, so I_mn = 0.
    """
    if n < 0 or m < 0:
        raise SymbolCalculusError("moment indices must be nonnegative")
    if n != m:
        bracket = q_power(n - m) * q_number(m + 1) - q_power(m - n) * q_number(n + 1)
        if not bracket:
            raise SymbolCalculusError(f"Stokes relations do not separate I_{m}{n}")
        return QEtaCoeff.zero()
    value = QFIELD.one
    for k in range(n):
        value = value * q_number(k + 1)
    return QEtaCoeff.scalar(value)


def integrate_symbol(f: QNormalSymbol, variant: str = NONCOMMUTATIVE, scaled: bool = False) -> QEtaCoeff:
    """
    Term-by-term q-integral of a K-free symbol.

    zb^a z^b is first reordered to z^b zb^a; on the quantum plane this costs
    q^{-2ab}, on the commutative plane nothing.
    """
    _require_symbol(f)
    if variant not in MOMENT_VARIANTS:
        raise SymbolCalculusError(f"Unknown measure variant '{variant}'")
    total = QEtaCoeff.zero()
    for monomial, coeff in f.terms():
        if monomial.k_power:
            raise SymbolCalculusError(f"The q-integral is taken over K-free symbols, got {f.render()}")
        a, b = monomial.exps
        moment = q_integral_moment(b, a, variant, scaled)
        if not moment:
            continue
        if variant == NONCOMMUTATIVE:
            moment = moment * QEtaCoeff.scalar(q_power(-2 * a * b))
        total = total + coeff * moment
    return total


def _antiholomorphic_coefficients(f: QNormalSymbol) -> List[Tuple[int, QEtaCoeff]]:
    _require_symbol(f)
    out = []
    for monomial, coeff in f.terms():
        if monomial.k_power or monomial.exps[1]:
            raise SymbolCalculusError(f"Expected a polynomial in zb only, got {f.render()}")
        out.append((monomial.exps[0], coeff))
    return out


def scalar_product(
    f: QNormalSymbol, g: QNormalSymbol, variant: str = NONCOMMUTATIVE, scaled: bool = False
) -> QEtaCoeff:
    """<f, g> = sum conj(g_k) f_k I_kk for polynomials in zb."""
    total = QEtaCoeff.zero()
    g_terms = dict(_antiholomorphic_coefficients(g))
    for k, f_k in _antiholomorphic_coefficients(f):
        g_k = g_terms.get(k)
        if g_k is not None:
            total = total + g_k.conjugate() * f_k * q_integral_moment(k, k, variant, scaled)
    return total


def antiholomorphic(n: int, coeff=1) -> QNormalSymbol:
    return NCPoly.monomial(PLANE_ALPHABET, 0, (n, 0), coeff)


def basis_overlap(m: int, n: int, variant: str = NONCOMMUTATIVE) -> QEtaCoeff:
    """<psi_m, psi_n> for psi_n = zb^n / sqrt(eta^{2n} [n]!)."""
    product = scalar_product(antiholomorphic(m), antiholomorphic(n), variant, scaled=True)
    if m != n:
        return product
    norm = QEtaCoeff.eta2(n) * QEtaCoeff.scalar(q_factorial(n))
    return product * norm.inverse()


def bf_apply(op: NCPoly, f: QNormalSymbol) -> QNormalSymbol:
    """Bargmann-Fock action: b+ = zb*, b = eta^2 dbar, K = q^{-2N}."""
    _require_oscillator(op)
    terms = []
    for monomial, coeff in op.terms():
        p, (r, s) = monomial.k_power, monomial.exps
        for n, f_n in _antiholomorphic_coefficients(f):
            if s > n:
                continue
            degree = n - s + r
            value = q_factorial(n) / q_factorial(n - s) * q_power(-2 * p * degree)
            terms.append((
                NCMonomial(0, (degree, 0)),
                coeff * f_n * QEtaCoeff.eta2(s) * QEtaCoeff.scalar(value),
            ))
    return NCPoly(PLANE_ALPHABET, terms)


# =====================
# Commutative moment route
# =====================


def commutative_route_symbol(m: int, l: int) -> QNormalSymbol:
    """
    Symbol of z^m * zb^l through the double-sum/moment route.

    The coefficient series a_j = [m+s]!/([s]![s+m-l]!), s = j + max(l-m, 0), in
    w = zb z / hbar is multiplied by e_{1/q^2}(-w); the product is a
    polynomial of degree min(m, l) in w.
    """
    if m < 0 or l < 0:
        raise SymbolCalculusError("exponents must be nonnegative")
    shift = max(l - m, 0)
    low = min(m, l)
    series = []
    for j in range(low + 1):
        s = j + shift
        series.append(q_factorial(m + s) / (q_factorial(s) * q_factorial(s + m - l)))
    terms = []
    for j in range(low + 1):
        c_j = QFIELD.zero
        for i in range(j + 1):
            sign = -1 if (j - i) % 2 else 1
            c_j += series[i] * exp_coefficient(BASE_INV_Q2, j - i) * sign
        exps = (shift + j, max(m - l, 0) + j)
        terms.append((NCMonomial(0, exps), QEtaCoeff.symbol("hbar", low - j) * QEtaCoeff.scalar(c_j)))
    logger.debug("commutative route for m=%d l=%d produced %d terms", m, l, len(terms))
    return NCPoly(PLANE_ALPHABET, terms)
