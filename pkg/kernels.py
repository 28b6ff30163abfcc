"""
Integral kernels of oscillator operators.

The kernel of A is a double series sum_mn a_mn zb^m z^n. For a q-normal
monomial K^p b+^r b^s it has the closed form

    q^{2(s(s+1)-r(p+1))} zb^r z^s e_{1/q^2}(q^{2(s-p+1)} zb z / eta^2)

which is kept symbolically as a KernelComponent and expanded on demand. A
KernelSeries holds either components (re-expandable to any order) or a raw
coefficient table that is exact only up to its truncation order.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from config import QOSC_KERNEL_ORDER, QOSC_STABILITY_STEP
from ncalg import OSCILLATOR_ALPHABET, PLANE_ALPHABET, NCMonomial, NCPoly, multiply
from qarith import BASE_INV_Q2, QAlgebraError, QEtaCoeff, QRat, q_factorial, q_power, render_qrat
from symcalc import (
    SymbolCalculusError,
    antiholomorphic,
    bf_apply,
    operator_of,
    q_integral_moment,
    scalar_product,
)

logger = logging.getLogger(__name__)

Table = Dict[Tuple[int, int], QEtaCoeff]


class KernelTruncationError(QAlgebraError):
    """Exception raised when a kernel is used beyond the order it is exact to."""
    pass


def _require_order(order: int, degree: int, what: str) -> None:
    if order < degree:
        raise KernelTruncationError(
            f"Truncation order {order} is below the degree {degree} of {what}; "
            f"use an order of at least {degree}"
        )


def _kernel_entry(p: int, r: int, s: int, j: int) -> QEtaCoeff:
    """Coefficient of zb^{r+j} z^{s+j} in the kernel of K^p b+^r b^s."""
    exponent = 2 * (s * (s + 1) - r * (p + 1)) + 2 * j * (j - 1) + 2 * j * (s - p + 1) + 2 * s * j
    return QEtaCoeff.eta2(-j) * QEtaCoeff.scalar(q_power(exponent) / q_factorial(j))


def matrix_element_factor(m: int, n: int) -> QRat:
    """q^{2n(n+1)-2m}, relating kernel coefficients to BF matrix elements."""
    return q_power(2 * n * (n + 1) - 2 * m)


@dataclass(frozen=True)
class KernelComponent:
    """coeff times the closed-form kernel of K^p b+^r b^s."""

    coeff: QEtaCoeff
    p: int
    r: int
    s: int

    @property
    def prefactor(self) -> NCPoly:
        lead = q_power(2 * (self.s * (self.s + 1) - self.r * (self.p + 1)))
        return NCPoly.monomial(PLANE_ALPHABET, 0, (self.r, self.s), self.coeff * QEtaCoeff.scalar(lead))

    @property
    def exp_kind(self) -> str:
        return BASE_INV_Q2

    @property
    def exp_argument(self) -> QRat:
        """Scale of zb z / eta^2 inside the exponential."""
        return q_power(2 * (self.s - self.p + 1))

    def expand(self, order: int) -> Table:
        table: Table = {}
        for j in range(order + 1 - max(self.r, self.s)):
            table[(self.r + j, self.s + j)] = self.coeff * _kernel_entry(self.p, self.r, self.s, j)
        return table

    def render(self) -> str:
        return (
            f"({self.prefactor.render()})*exp_inv_q2({render_qrat(self.exp_argument)}*zb*z/eta2)"
        )


class KernelSeries:
    """
    Truncated kernel.

    components: closed-form pieces, or None for a raw table.
    table: explicit coefficients (always exact for m, n <= truncation_order).
    """

    def __init__(
        self,
        truncation_order: int,
        components: Optional[List[KernelComponent]] = None,
        table: Optional[Table] = None,
    ):
        if truncation_order < 0:
            raise KernelTruncationError("truncation order must be nonnegative")
        if components is None and table is None:
            raise KernelTruncationError("a kernel needs components or a coefficient table")
        self.truncation_order = truncation_order
        self.components = None if components is None else [c for c in components if c.coeff]
        self._table = table

    @property
    def has_components(self) -> bool:
        return self.components is not None

    def coefficients(self, order: Optional[int] = None) -> Table:
        """Coefficients a_mn with m, n <= order (default: the truncation order)."""
        order = self.truncation_order if order is None else order
        if not self.has_components:
            if order > self.truncation_order:
                raise KernelTruncationError(
                    f"Raw kernel table is exact to order {self.truncation_order}; "
                    f"order {order} requested. Rebuild it at a higher order."
                )
            return {k: v for k, v in self._table.items() if k[0] <= order and k[1] <= order and v}
        table: Table = {}
        for component in self.components:
            for key, value in component.expand(order).items():
                total = table.get(key, QEtaCoeff.zero()) + value
                if total:
                    table[key] = total
                else:
                    table.pop(key, None)
        return table

    def coefficient(self, m: int, n: int) -> QEtaCoeff:
        return self.coefficients(max(m, n)).get((m, n), QEtaCoeff.zero())

    def degree(self) -> int:
        """Largest generator exponent among the components."""
        if not self.has_components:
            return 0
        return max((max(c.r, c.s) for c in self.components), default=0)

    def width(self) -> int:
        if not self.has_components:
            return 0
        return max((c.r + c.s for c in self.components), default=0)

    def at_order(self, order: int) -> "KernelSeries":
        if self.has_components:
            _require_order(order, self.degree(), "the kernel")
            return KernelSeries(order, self.components)
        return KernelSeries(order, table=self.coefficients(order))

    def render(self) -> str:
        if self.has_components:
            if not self.components:
                return "0"
            return " + ".join(c.render() for c in self.components)
        rows = sorted(self.coefficients().items())
        return " + ".join(f"({v.render()})*zb^{m}*z^{n}" for (m, n), v in rows) or "0"

    def __repr__(self) -> str:
        kind = "components" if self.has_components else "table"
        return f"KernelSeries({kind}, order={self.truncation_order})"


def kernel_of_monomial(p: int, r: int, s: int, order: int = QOSC_KERNEL_ORDER) -> KernelSeries:
    if r < 0 or s < 0:
        raise KernelTruncationError("generator exponents must be nonnegative")
    _require_order(order, max(r, s), f"K^{p} b+^{r} b^{s}")
    return KernelSeries(order, [KernelComponent(QEtaCoeff.one(), p, r, s)])


def kernel_of_operator(x: NCPoly, order: int = QOSC_KERNEL_ORDER) -> KernelSeries:
    if x.alphabet != OSCILLATOR_ALPHABET:
        raise SymbolCalculusError("kernels are defined for oscillator polynomials")
    components = [
        KernelComponent(coeff, monomial.k_power, monomial.exps[0], monomial.exps[1])
        for monomial, coeff in x.terms()
    ]
    kernel = KernelSeries(order, components)
    _require_order(order, kernel.degree(), "the operator")
    return kernel


def kernel_from_matrix_elements(x: NCPoly, order: int = QOSC_KERNEL_ORDER) -> KernelSeries:
    """
    Raw kernel table from BF matrix elements:

        a_mn = q^{2n(n+1)-2m} <A zb^n, zb^m> / (eta^{2m}[m]! eta^{2n}[n]!)
    """
    table: Table = {}
    for n in range(order + 1):
        image = bf_apply(x, antiholomorphic(n))
        for m in range(order + 1):
            element = scalar_product(image, antiholomorphic(m), scaled=True)
            if not element:
                continue
            norm = q_integral_moment(m, m, scaled=True) * q_integral_moment(n, n, scaled=True)
            table[(m, n)] = element * norm.inverse() * QEtaCoeff.scalar(matrix_element_factor(m, n))
    return KernelSeries(order, table=table)


def convolve_tables(t1: Table, t2: Table, order: int) -> Table:
    """
    Kernel of A1 A2 from the kernels of A1 and A2:

        a_mn = sum_k q^{-2k^2} a1_mk a2_kn eta^{2k}[k]!

    The eta^{2k}[k]! is the scaled moment of the intermediate integration.
    """
    rows: Dict[int, List[Tuple[int, QEtaCoeff]]] = {}
    for (k, n), value in t2.items():
        if n <= order:
            rows.setdefault(k, []).append((n, value))
    out: Table = {}
    for (m, k), a1 in t1.items():
        if m > order or k not in rows:
            continue
        weight = a1 * q_integral_moment(k, k, scaled=True) * QEtaCoeff.scalar(q_power(-2 * k * k))
        for n, a2 in rows[k]:
            total = out.get((m, n), QEtaCoeff.zero()) + weight * a2
            if total:
                out[(m, n)] = total
            else:
                out.pop((m, n), None)
    return out


def peel_components(table: Table, p: int, order: int) -> List[KernelComponent]:
    """
    Split an exact table of a K^p-homogeneous operator into closed-form components.

    The lowest entry of every diagonal fixes the next component's (r, s) and coefficient.
    """
    remaining = dict(table)
    components = []
    while remaining:
        m, n = min(remaining, key=lambda key: (min(key), key))
        value = remaining[(m, n)]
        component = KernelComponent(value * _kernel_entry(p, m, n, 0).inverse(), p, m, n)
        components.append(component)
        for key, entry in component.expand(order).items():
            total = remaining.get(key, QEtaCoeff.zero()) - entry
            if total:
                remaining[key] = total
            else:
                remaining.pop(key, None)
    return components


def _convolve_components(k1: KernelSeries, k2: KernelSeries, order: int) -> List[KernelComponent]:
    reach = order + k1.width() + k2.width()
    by_power: Dict[int, List[KernelComponent]] = {}
    for c1 in k1.components:
        for c2 in k2.components:
            table = convolve_tables(c1.expand(reach), c2.expand(reach), order)
            by_power.setdefault(c1.p + c2.p, []).append(table)
    out = []
    for p, tables in sorted(by_power.items()):
        merged: Table = {}
        for table in tables:
            for key, value in table.items():
                total = merged.get(key, QEtaCoeff.zero()) + value
                if total:
                    merged[key] = total
                else:
                    merged.pop(key, None)
        out.extend(peel_components(merged, p, order))
    return out


def _components_key(components: List[KernelComponent]):
    merged: Dict[Tuple[int, int, int], QEtaCoeff] = {}
    for c in components:
        key = (c.p, c.r, c.s)
        merged[key] = merged.get(key, QEtaCoeff.zero()) + c.coeff
    return {k: v for k, v in merged.items() if v}


def convolve_kernels(k1: KernelSeries, k2: KernelSeries, stability_step: int = QOSC_STABILITY_STEP) -> KernelSeries:
    """
    Kernel of A1 A2.

    Intermediate sums use the moments of the integration measure; the result is
    split back into closed-form components, once at the common truncation order
    and once stability_step orders higher. Differing splits mean the order was
    too low for the operators involved.
    """
    if not (k1.has_components and k2.has_components):
        raise KernelTruncationError(
            "Convolution needs closed-form kernels; build them with kernel_of_operator"
        )
    order = min(k1.truncation_order, k2.truncation_order)
    product_degree = max(
        (max(c1.r + c2.r, c1.s + c2.s) for c1 in k1.components for c2 in k2.components),
        default=0,
    )
    _require_order(order, product_degree, "the product operator")
    components = _convolve_components(k1, k2, order)
    check = _convolve_components(k1, k2, order + stability_step)
    if _components_key(components) != _components_key(check):
        raise KernelTruncationError(
            f"Kernel convolution is not stable at truncation order {order}; "
            f"increase the order (at least {order + stability_step})"
        )
    logger.debug("convolved kernels at order %d into %d components", order, len(components))
    return KernelSeries(order, components)


def symbol_of_kernel(kernel: KernelSeries) -> NCPoly:
    """Normal symbol sum coeff K^p zb^r z^s read off the closed-form components."""
    if not kernel.has_components:
        raise KernelTruncationError("Only closed-form kernels can be read back as symbols")
    terms = [(NCMonomial(c.p, (c.r, c.s)), c.coeff) for c in kernel.components]
    return NCPoly(PLANE_ALPHABET, terms)


def star_via_kernels(s1: NCPoly, s2: NCPoly, order: int = QOSC_KERNEL_ORDER) -> NCPoly:
    """Star product computed through kernel convolution."""
    k1 = kernel_of_operator(operator_of(s1), order)
    k2 = kernel_of_operator(operator_of(s2), order)
    return symbol_of_kernel(convolve_kernels(k1, k2))


def operator_kernel_oracle(x: NCPoly, y: NCPoly, order: int = QOSC_KERNEL_ORDER) -> KernelSeries:
    """Kernel of the normal-ordered product, for comparison with convolve_kernels."""
    return kernel_of_operator(multiply(x, y), order)