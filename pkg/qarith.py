"""
Exact coefficient ring for the q-oscillator engine.

Scalars are rational functions in a formal q over the integers (sympy's
sparse fraction field, which keeps numerator and denominator gcd-reduced with
a positive leading denominator coefficient, so structural equality is
mathematical equality). QEtaCoeff grades them by powers of eta^2 and of the
commuting formal parameters hbar, omega, gamma, kappa and the imaginary unit.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
from sympy import ZZ
from sympy.polys.fields import FracElement, field

logger = logging.getLogger(__name__)

QFIELD, q = field("q", ZZ)
QRat = FracElement

# Order of the exponents in a Grade tuple.
PARAMETERS = ("eta2", "hbar", "omega", "gamma", "kappa", "i")
Grade = Tuple[int, int, int, int, int, int]
ZERO_GRADE: Grade = (0, 0, 0, 0, 0, 0)

ETA, HBAR, OMEGA, GAMMA, KAPPA, IMAG = range(len(PARAMETERS))

Number = Union[int, Fraction]
Scalar = Union[int, Fraction, QRat, "QEtaCoeff"]

BASE_Q2 = "base_q2"
BASE_INV_Q2 = "base_inv_q2"


class QAlgebraError(Exception):
    """Base class for every domain error raised by the engine."""
    pass


class QArithError(QAlgebraError):
    """Exception raised for invalid coefficient-ring operations."""
    pass


# =====================
# QRat helpers
# =====================


def as_qrat(value: Union[Number, QRat]) -> QRat:
    """Convert an int, Fraction or QRat into a canonical QRat."""
    if isinstance(value, FracElement):
        return value
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return QFIELD(value)
    if isinstance(value, Fraction):
        return QFIELD(value.numerator) / QFIELD(value.denominator)
    raise QArithError(f"Cannot use {value!r} as an exact coefficient")


def q_power(k: int) -> QRat:
    """q^k for any integer k."""
    if k >= 0:
        return q**k
    return QFIELD.one / q**(-k)


def q_number(n: int, base_exponent: int = 2) -> QRat:
    """[n; q^b] = (q^{bn} - 1)/(q^b - 1), extended to negative n."""
    if base_exponent == 0:
        raise QArithError("q-number base exponent must be nonzero")
    if n < 0:
        return -q_power(base_exponent * n) * q_number(-n, base_exponent)
    return _q_number(n, base_exponent)


@lru_cache(maxsize=None)
def _q_number(n: int, base_exponent: int) -> QRat:
    total = QFIELD.zero
    for k in range(n):
        total += q_power(base_exponent * k)
    return total


@lru_cache(maxsize=None)
def q_factorial(n: int) -> QRat:
    """[n; q^2]! with [0]! = 1."""
    if n < 0:
        raise QArithError(f"q-factorial of negative integer {n} is undefined")
    result = QFIELD.one
    for k in range(1, n + 1):
        result *= q_number(k)
    return result


def q_binomial(n: int, k: int) -> QRat:
    """Gaussian binomial in base q^2; zero outside 0 <= k <= n."""
    if k < 0 or k > n:
        return QFIELD.zero
    return q_factorial(n) / (q_factorial(k) * q_factorial(n - k))


def numerator_terms(x: QRat) -> Dict[int, int]:
    return {monom[0]: int(coeff) for monom, coeff in x.numer.terms()}


def denominator_terms(x: QRat) -> Dict[int, int]:
    return {monom[0]: int(coeff) for monom, coeff in x.denom.terms()}


def evaluate_qrat(x: QRat, q_value: Union[float, Number]) -> Fraction:
    """Exact rational value of x at q = q_value (floats are taken exactly)."""
    qv = Fraction(q_value)
    numer = sum((c * qv**e for e, c in numerator_terms(x).items()), Fraction(0))
    denom = sum((c * qv**e for e, c in denominator_terms(x).items()), Fraction(0))
    if denom == 0:
        raise QArithError(f"Coefficient {render_qrat(x)} has a pole at q = {q_value}")
    return numer / denom


# =====================
# Canonical text form
# =====================


def _fraction_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _q_text(e: int) -> str:
    if e == 1:
        return "q"
    return f"q^{e}"


def _term_text(e: int, c: Fraction) -> str:
    magnitude = abs(c)
    if e == 0:
        return _fraction_text(magnitude)
    if magnitude == 1:
        return _q_text(e)
    return f"{_fraction_text(magnitude)}*{_q_text(e)}"


def _laurent_text(terms: List[Tuple[int, Fraction]]) -> str:
    """Ascending-power text of a Laurent polynomial with signs between terms."""
    parts = []
    for index, (e, c) in enumerate(terms):
        body = _term_text(e, c)
        if index == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(parts)


def _split_qrat(x: QRat) -> Tuple[List[Tuple[int, Fraction]], Optional[List[Tuple[int, Fraction]]]]:
    """Laurent numerator and the residual primitive denominator (None if trivial)."""
    numer = numerator_terms(x)
    denom = denominator_terms(x)
    shift = min(denom)
    content = math.gcd(*denom.values())
    laurent = sorted((e - shift, Fraction(c, content)) for e, c in numer.items())
    residual = sorted((e - shift, Fraction(c // content)) for e, c in denom.items())
    if residual == [(0, Fraction(1))]:
        return laurent, None
    return laurent, residual


def qrat_factors(x: QRat) -> Tuple[int, List[str]]:
    """Sign and multiplicative text factors of a nonzero QRat (a bare 1 is omitted)."""
    laurent, residual = _split_qrat(x)
    sign = 1
    factors: List[str] = []
    if len(laurent) == 1:
        e, c = laurent[0]
        if c < 0:
            sign = -1
        if abs(c) != 1:
            factors.append(_fraction_text(abs(c)))
        if e != 0:
            factors.append(_q_text(e))
    else:
        factors.append(f"({_laurent_text(laurent)})")
    if residual is not None:
        factors.append(f"({_laurent_text(residual)})^-1")
    return sign, factors


def _join(sign: int, factors: List[str]) -> str:
    if len(factors) == 1 and factors[0].startswith("(") and factors[0].endswith(")"):
        body = factors[0][1:-1]
        if sign < 0:
            return f"-({body})"
        return body
    body = "*".join(factors) if factors else "1"
    return f"-{body}" if sign < 0 else body


def render_qrat(x: QRat) -> str:
    """Canonical text of a QRat; re-parses with the expression grammar."""
    if not x:
        return "0"
    return _join(*qrat_factors(x))


def _grade_factors(grade: Grade) -> List[str]:
    factors = []
    for name, exponent in zip(PARAMETERS, grade):
        if exponent == 1:
            factors.append(name)
        elif exponent != 0:
            factors.append(f"{name}^{exponent}")
    return factors


# =====================
# QEtaCoeff
# =====================


def _grade_product(a: Grade, b: Grade) -> Tuple[Grade, int]:
    """Grade of a product and the sign picked up from i^2 = -1."""
    combined = [x + y for x, y in zip(a, b)]
    sign = 1
    if combined[IMAG] >= 2:
        combined[IMAG] -= 2
        sign = -1
    return tuple(combined), sign


class QEtaCoeff:
    """
    Exact commutative scalar: a finite sum of QRat values attached to grades.

    A grade holds the exponents of eta^2, hbar, omega, gamma, kappa and i.
    Exponents may be negative (division pending); the exponent of i is 0 or 1.
    Values are immutable and hashable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[Grade, QRat], Iterable[Tuple[Grade, QRat]]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        cleaned: Dict[Grade, QRat] = {}
        for grade, value in items:
            grade = tuple(int(e) for e in grade)
            if len(grade) != len(PARAMETERS):
                raise QArithError(f"Grade {grade} must have {len(PARAMETERS)} exponents")
            if grade[IMAG] not in (0, 1):
                raise QArithError("The exponent of i must be 0 or 1")
            total = cleaned.get(grade, QFIELD.zero) + as_qrat(value)
            if total:
                cleaned[grade] = total
            else:
                cleaned.pop(grade, None)
        self._terms = cleaned
        self._hash = None

    # ---- constructors ----

    @classmethod
    def zero(cls) -> "QEtaCoeff":
        return cls()

    @classmethod
    def one(cls) -> "QEtaCoeff":
        return cls({ZERO_GRADE: QFIELD.one})

    @classmethod
    def scalar(cls, value: Union[Number, QRat]) -> "QEtaCoeff":
        return cls({ZERO_GRADE: as_qrat(value)})

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "QEtaCoeff":
        """A formal parameter raised to an integer power (q is handled by scalar)."""
        if name not in PARAMETERS:
            raise QArithError(f"Unknown formal parameter '{name}'")
        grade = [0] * len(PARAMETERS)
        if name == "i":
            value = QFIELD.one
            if power % 4 in (2, 3):
                value = -value
            grade[IMAG] = power % 2
            return cls({tuple(grade): value})
        grade[PARAMETERS.index(name)] = power
        return cls({tuple(grade): QFIELD.one})

    @classmethod
    def eta2(cls, power: int = 1) -> "QEtaCoeff":
        return cls.symbol("eta2", power)

    @classmethod
    def coerce(cls, value: Scalar) -> "QEtaCoeff":
        if isinstance(value, QEtaCoeff):
            return value
        return cls.scalar(value)

    # ---- inspection ----

    def items(self) -> List[Tuple[Grade, QRat]]:
        return sorted(self._terms.items(), key=lambda item: item[0])

    def grades(self) -> List[Grade]:
        return sorted(self._terms)

    def eta_degrees(self) -> List[int]:
        return sorted({grade[ETA] for grade in self._terms})

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(grade == ZERO_GRADE for grade in self._terms)

    def as_qrat(self) -> QRat:
        if not self.is_scalar():
            raise QArithError(f"{self} is not a pure q-coefficient")
        return self._terms.get(ZERO_GRADE, QFIELD.zero)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # ---- arithmetic ----

    def __add__(self, other: Scalar) -> "QEtaCoeff":
        other = QEtaCoeff.coerce(other)
        return QEtaCoeff(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "QEtaCoeff":
        return QEtaCoeff({grade: -value for grade, value in self._terms.items()})

    def __sub__(self, other: Scalar) -> "QEtaCoeff":
        return self + (-QEtaCoeff.coerce(other))

    def __rsub__(self, other: Scalar) -> "QEtaCoeff":
        return QEtaCoeff.coerce(other) - self

    def __mul__(self, other: Scalar) -> "QEtaCoeff":
        other = QEtaCoeff.coerce(other)
        products = []
        for ga, va in self._terms.items():
            for gb, vb in other._terms.items():
                grade, sign = _grade_product(ga, gb)
                products.append((grade, va * vb if sign > 0 else -(va * vb)))
        return QEtaCoeff(products)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QEtaCoeff":
        if n < 0:
            return self.inverse() ** (-n)
        result = QEtaCoeff.one()
        for _ in range(n):
            result = result * self
        return result

    def inverse(self) -> "QEtaCoeff":
        """Inverse of a single-term coefficient."""
        if len(self._terms) != 1:
            raise QArithError(f"Only single-term coefficients are invertible, got {self}")
        (grade, value), = self._terms.items()
        inverted = [-e for e in grade]
        inverted[IMAG] = 0
        result = QEtaCoeff({tuple(inverted): QFIELD.one / value})
        if grade[IMAG]:
            # 1/i = -i
            result = result * QEtaCoeff.symbol("i") * -1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, FracElement)):
            other = QEtaCoeff.scalar(other)
        if not isinstance(other, QEtaCoeff):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ---- grading ----

    def min_eta_degree(self) -> Optional[int]:
        degrees = self.eta_degrees()
        return degrees[0] if degrees else None

    def eta_part(self, degree: int) -> "QEtaCoeff":
        return QEtaCoeff({g: v for g, v in self._terms.items() if g[ETA] == degree})

    def truncate_eta(self, order: int) -> "QEtaCoeff":
        return QEtaCoeff({g: v for g, v in self._terms.items() if g[ETA] <= order})

    def shift_eta(self, amount: int) -> "QEtaCoeff":
        shifted = {}
        for grade, value in self._terms.items():
            g = list(grade)
            g[ETA] += amount
            shifted[tuple(g)] = value
        return QEtaCoeff(shifted)

    def rename(self, source: str, target: str) -> "QEtaCoeff":
        """Move the exponent of one formal parameter onto another."""
        src, dst = PARAMETERS.index(source), PARAMETERS.index(target)
        moved = []
        for grade, value in self._terms.items():
            g = list(grade)
            g[dst] += g[src]
            g[src] = 0
            moved.append((tuple(g), value))
        return QEtaCoeff(moved)

    def map_values(self, fn) -> "QEtaCoeff":
        return QEtaCoeff([(g, fn(v)) for g, v in self._terms.items()])

    def conjugate(self) -> "QEtaCoeff":
        """Complex conjugate; q and the formal parameters are real."""
        return QEtaCoeff({g: (-v if g[IMAG] else v) for g, v in self._terms.items()})

    def substitute(self, name: str, value: Number) -> "QEtaCoeff":
        """Replace a formal parameter (not i) by a rational number."""
        index = PARAMETERS.index(name)
        value = Fraction(value)
        result = []
        for grade, coeff in self._terms.items():
            exponent = grade[index]
            if exponent < 0 and value == 0:
                raise QArithError(f"{name} = 0 hits a negative power in {self}")
            g = list(grade)
            g[index] = 0
            result.append((tuple(g), coeff * as_qrat(value**exponent)))
        return QEtaCoeff(result)

    # ---- numerics ----

    def evaluate(self, q: float = 1.0, **params: float) -> Union[float, complex]:
        """
        Numeric value at the given parameters.

        Missing formal parameters default to 1. Each term is evaluated in exact
        rational arithmetic and converted to float at the end.
        """
        unknown = set(params) - set(PARAMETERS[:-1])
        if unknown:
            raise QArithError(f"Unknown parameters: {sorted(unknown)}")
        real = Fraction(0)
        imag = Fraction(0)
        for grade, value in self._terms.items():
            term = evaluate_qrat(value, q)
            for name, exponent in zip(PARAMETERS[:-1], grade[:-1]):
                if exponent:
                    term *= Fraction(params.get(name, 1)) ** exponent
            if grade[IMAG]:
                imag += term
            else:
                real += term
        if imag:
            return complex(float(real), float(imag))
        return float(real)

    # ---- rendering ----

    def summands(self) -> List[Tuple[int, List[str]]]:
        """Signed factor lists of the terms, in canonical grade order."""
        rows = []
        for grade, value in self.items():
            sign, factors = qrat_factors(value)
            rows.append((sign, factors + _grade_factors(grade)))
        return rows

    def render(self) -> str:
        rows = self.summands()
        if not rows:
            return "0"
        if len(rows) == 1:
            return _join(*rows[0])
        return join_summands(rows)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"QEtaCoeff({self.render()!r})"


def join_summands(rows: List[Tuple[int, List[str]]]) -> str:
    """Join signed factor lists into a sum; an empty factor list stands for 1."""
    if not rows:
        return "0"
    parts = []
    for index, (sign, factors) in enumerate(rows):
        body = "*".join(factors) if factors else "1"
        if index == 0:
            parts.append(f"-{body}" if sign < 0 else body)
        else:
            parts.append(f" - {body}" if sign < 0 else f" + {body}")
    return "".join(parts)


# =====================
# QSeries and basic exponentials
# =====================


class QSeries:
    """Truncated power series in one formal argument with QEtaCoeff coefficients."""

    __slots__ = ("coefficients", "truncation_order")

    def __init__(self, coefficients: Iterable[Scalar], truncation_order: int):
        coefficients = tuple(QEtaCoeff.coerce(c) for c in coefficients)
        if truncation_order < 0:
            raise QArithError("truncation order must be nonnegative")
        if len(coefficients) > truncation_order + 1:
            raise QArithError(
                f"{len(coefficients)} coefficients exceed truncation order {truncation_order}"
            )
        self.coefficients = coefficients
        self.truncation_order = truncation_order

    def coefficient(self, n: int) -> QEtaCoeff:
        if n > self.truncation_order:
            raise QArithError(
                f"Coefficient {n} requested from a series truncated at order "
                f"{self.truncation_order}; rebuild it at a higher order"
            )
        if n < len(self.coefficients):
            return self.coefficients[n]
        return QEtaCoeff.zero()

    def __mul__(self, other: "QSeries") -> "QSeries":
        order = min(self.truncation_order, other.truncation_order)
        product = []
        for n in range(order + 1):
            total = QEtaCoeff.zero()
            for k in range(n + 1):
                total = total + self.coefficient(k) * other.coefficient(n - k)
            product.append(total)
        return QSeries(product, order)

    def scale_argument(self, factor: Scalar) -> "QSeries":
        """Series of f(factor * x)."""
        factor = QEtaCoeff.coerce(factor)
        return QSeries(
            [c * factor**n for n, c in enumerate(self.coefficients)], self.truncation_order
        )

    def evaluate(self, x: float, q: float = 1.0, **params: float) -> Union[float, complex]:
        return sum(c.evaluate(q, **params) * x**n for n, c in enumerate(self.coefficients))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.truncation_order == other.truncation_order
            and all(
                self.coefficient(n) == other.coefficient(n)
                for n in range(self.truncation_order + 1)
            )
        )

    def __repr__(self) -> str:
        body = ", ".join(c.render() for c in self.coefficients)
        return f"QSeries([{body}], order={self.truncation_order})"


def exp_coefficient(kind: str, n: int) -> QRat:
    if kind == BASE_Q2:
        return QFIELD.one / q_factorial(n)
    if kind == BASE_INV_Q2:
        return q_power(n * (n - 1)) / q_factorial(n)
    raise QArithError(f"Unknown basic exponential kind '{kind}'")


def q_exp_series(kind: str, order: int) -> QSeries:
    """Truncated e_{q^2} (base_q2) or e_{1/q^2} (base_inv_q2)."""
    if order < 0:
        raise QArithError("series order must be nonnegative")
    return QSeries([exp_coefficient(kind, n) for n in range(order + 1)], order)


# Bivariate polynomials in commuting A, B: {(i, j): QRat}.
Bivariate = Dict[Tuple[int, int], QRat]


def _bivariate_mul(x: Bivariate, y: Bivariate) -> Bivariate:
    out: Bivariate = {}
    for (i1, j1), c1 in x.items():
        for (i2, j2), c2 in y.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, QFIELD.zero) + c1 * c2
    return {k: v for k, v in out.items() if v}


def summation_theorem_residual(order: int) -> Bivariate:
    """
    e_{q^2}(A) e_{1/q^2}(B) minus sum_n (A+B)^{(n)}/[n]! for commuting A, B.

    (A+B)^{(n)} = (A+B)(A+q^2 B)...(A+q^{2(n-1)} B). Only total degrees up to
    the order are compared; an empty result means the theorem holds there.
    """
    lhs: Bivariate = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            lhs[(i, j)] = exp_coefficient(BASE_Q2, i) * exp_coefficient(BASE_INV_Q2, j)
    rhs: Bivariate = {}
    power: Bivariate = {(0, 0): QFIELD.one}
    for n in range(order + 1):
        scale = QFIELD.one / q_factorial(n)
        for key, value in power.items():
            rhs[key] = rhs.get(key, QFIELD.zero) + value * scale
        power = _bivariate_mul(power, {(1, 0): QFIELD.one, (0, 1): q_power(2 * n)})
    residual = {}
    for key in set(lhs) | set(rhs):
        diff = lhs.get(key, QFIELD.zero) - rhs.get(key, QFIELD.zero)
        if diff:
            residual[key] = diff
    logger.debug("summation theorem at order %d: %d mismatches", order, len(residual))
    return residual


def exp_inverse_residual(order: int) -> List[int]:
    """Orders n <= order at which e_{q^2}(x) e_{1/q^2}(-x) differs from 1."""
    left = q_exp_series(BASE_Q2, order)
    right = q_exp_series(BASE_INV_Q2, order).scale_argument(-1)
    product = left * right
    return [
        n
        for n in range(order + 1)
        if product.coefficient(n) != (QEtaCoeff.one() if n == 0 else QEtaCoeff.zero())
    ]


def basic_exp_numeric(x, q: float, kind: str = BASE_Q2, tol: float = 1e-17):
    """
    Numeric e_{q^2}(x) or e_{1/q^2}(x) for real x (scalar or array).

    e_Q(x) with Q > 1 is the entire Euler product prod_k (1 + (1-p) p^k x),
    p = 1/Q; for Q < 1 it is the reciprocal of that product at -x with p = Q.
    """
    if q <= 0:
        raise QArithError("q must be positive")
    base = q**2 if kind == BASE_Q2 else q**-2
    x = np.asarray(x, dtype=float)
    if base == 1.0:
        return np.exp(x)
    p = 1.0 / base if base > 1 else base
    sign = 1.0 if base > 1 else -1.0
    scale = max(float(np.max(np.abs(x))) * (1 - p), tol)
    count = max(1, int(math.ceil(math.log(tol / scale) / math.log(p))) + 1)
    powers = p ** np.arange(count)
    factors = 1.0 + sign * (1 - p) * np.multiply.outer(x, powers)
    product = np.prod(factors, axis=-1)
    if base > 1:
        return product
    return 1.0 / product
