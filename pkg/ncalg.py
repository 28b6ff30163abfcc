"""
Noncommutative polynomial algebra for the q-oscillator and the q-plane.

Two alphabets are supported:

    oscillator  K, b+ (written bd), b      bb+ = q^2 b+b + eta^2,  bK = q^-2 Kb,  b+K = q^2 Kb+
    plane       K, zb_i, z_i (i = 1..n)    z_i zb_j = q^2 zb_j z_i, zK = q^-2 Kz,  zbK = q^2 Kzb

Normal order puts the K block first, then each copy's zb/b+ before its z/b,
copies ascending. NCPoly arithmetic multiplies normal monomials in closed form;
the RewriteSystem reduces arbitrary words with the relation table and is the
reference the closed forms are tested against.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from qarith import (
    ETA,
    GAMMA,
    QAlgebraError,
    QEtaCoeff,
    QFIELD,
    QRat,
    Scalar,
    as_qrat,
    denominator_terms,
    evaluate_qrat,
    join_summands,
    numerator_terms,
    q_binomial,
    q_factorial,
    q_power,
    qrat_factors,
    render_qrat,
)

logger = logging.getLogger(__name__)

OSCILLATOR = "oscillator"
PLANE = "plane"

GAMMA_LIMIT = "gamma_limit"
FIXED_Q = "fixed_q"

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"

K_LETTER = "K"
K_INVERSE_LETTER = "Ki"


class AlphabetError(QAlgebraError):
    """Exception raised for mixed, mismatched or unknown generators."""
    pass


class ContractionError(QAlgebraError):
    """Exception raised when a coefficient cannot be re-expanded in eta^2."""
    pass


class EtaDivisionError(QAlgebraError):
    """Exception raised when dividing by eta^2 leaves a nonzero degree-0 part."""
    pass


# =====================
# Alphabets and monomials
# =====================


@dataclass(frozen=True)
class GeneratorAlphabet:
    kind: str
    copy_count: int = 1

    def __post_init__(self):
        if self.kind not in (OSCILLATOR, PLANE):
            raise AlphabetError(f"Unknown alphabet kind '{self.kind}'")
        if self.copy_count < 1:
            raise AlphabetError("copy_count must be positive")
        if self.kind == OSCILLATOR and self.copy_count != 1:
            raise AlphabetError("The oscillator alphabet has a single copy")

    def generator_names(self) -> Tuple[str, ...]:
        """Non-K generators in normal order; the monomial exponent tuple follows it."""
        if self.kind == OSCILLATOR:
            return ("bd", "b")
        names = []
        for i in range(1, self.copy_count + 1):
            suffix = "" if i == 1 else f"_{i}"
            names.extend((f"zb{suffix}", f"z{suffix}"))
        return tuple(names)

    def letters(self) -> Tuple[str, ...]:
        return (K_LETTER, K_INVERSE_LETTER) + self.generator_names()

    def rank(self, letter: str) -> int:
        if letter in (K_LETTER, K_INVERSE_LETTER):
            return 0
        try:
            return self.generator_names().index(letter) + 1
        except ValueError:
            raise AlphabetError(
                f"Generator '{letter}' does not belong to the {self.describe()} alphabet "
                f"{{{', '.join(self.letters())}}}"
            )

    def is_creation(self, letter: str) -> bool:
        """True for b+ and the zb_i (the even positions of the normal order)."""
        return self.rank(letter) % 2 == 1

    def describe(self) -> str:
        if self.kind == OSCILLATOR:
            return OSCILLATOR
        return f"plane[{self.copy_count}]"


OSCILLATOR_ALPHABET = GeneratorAlphabet(OSCILLATOR)
PLANE_ALPHABET = GeneratorAlphabet(PLANE, 1)


def plane_alphabet(copy_count: int = 1) -> GeneratorAlphabet:
    return GeneratorAlphabet(PLANE, copy_count)


@dataclass(frozen=True, order=True)
class NCMonomial:
    """K^k_power times the non-K generators raised to exps, in normal order."""

    k_power: int
    exps: Tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exps):
            raise AlphabetError(f"Negative generator exponent in {self.exps}")

    @property
    def degree(self) -> int:
        return sum(self.exps)

    def factors(self, alphabet: GeneratorAlphabet) -> List[str]:
        out = []
        if self.k_power == 1:
            out.append("K")
        elif self.k_power != 0:
            out.append(f"K^{self.k_power}")
        for name, e in zip(alphabet.generator_names(), self.exps):
            if e == 1:
                out.append(name)
            elif e > 1:
                out.append(f"{name}^{e}")
        return out

    def letters(self, alphabet: GeneratorAlphabet) -> Tuple[str, ...]:
        k = K_LETTER if self.k_power >= 0 else K_INVERSE_LETTER
        out = [k] * abs(self.k_power)
        for name, e in zip(alphabet.generator_names(), self.exps):
            out.extend([name] * e)
        return tuple(out)


def _sort_key(monomial: NCMonomial):
    return (-monomial.degree, tuple(-e for e in monomial.exps), -monomial.k_power)


def unit_monomial(alphabet: GeneratorAlphabet) -> NCMonomial:
    return NCMonomial(0, (0,) * len(alphabet.generator_names()))


# =====================
# Closed-form monomial products
# =====================


@lru_cache(maxsize=None)
def _oscillator_product(m1: NCMonomial, m2: NCMonomial) -> Tuple[Tuple[QEtaCoeff, NCMonomial], ...]:
    """
    (K^p b+^r b^s)(K^t b+^u b^v).

    K^t moves left for q^{2t(r-s)}; b^s b+^u is reordered with
    sum_k [s,k][u,k][k]! q^{2(s-k)(u-k)} eta^{2k} b+^{u-k} b^{s-k}.
    """
    p, (r, s) = m1.k_power, m1.exps
    t, (u, v) = m2.k_power, m2.exps
    crossing = q_power(2 * t * (r - s))
    terms = []
    for k in range(min(s, u) + 1):
        value = (
            q_binomial(s, k) * q_binomial(u, k) * q_factorial(k)
            * q_power(2 * (s - k) * (u - k)) * crossing
        )
        terms.append((
            QEtaCoeff({(k, 0, 0, 0, 0, 0): value}),
            NCMonomial(p + t, (r + u - k, s - k + v)),
        ))
    return tuple(terms)


@lru_cache(maxsize=None)
def _plane_product(m1: NCMonomial, m2: NCMonomial) -> Tuple[Tuple[QEtaCoeff, NCMonomial], ...]:
    """The q-plane is homogeneous: a product of monomials is a q-power times a monomial."""
    bars1, zs1 = m1.exps[0::2], m1.exps[1::2]
    bars2, zs2 = m2.exps[0::2], m2.exps[1::2]
    exponent = 2 * m2.k_power * (sum(bars1) - sum(zs1))
    for i in range(len(bars1)):
        for j in range(len(bars2)):
            if j <= i:
                exponent += 2 * zs1[i] * bars2[j]
            if j < i:
                exponent -= 2 * bars1[i] * zs2[j]
    exps = tuple(a + b for a, b in zip(m1.exps, m2.exps))
    return ((QEtaCoeff.scalar(q_power(exponent)), NCMonomial(m1.k_power + m2.k_power, exps)),)


def monomial_product(alphabet: GeneratorAlphabet, m1: NCMonomial, m2: NCMonomial):
    if alphabet.kind == OSCILLATOR:
        return _oscillator_product(m1, m2)
    return _plane_product(m1, m2)


# =====================
# NCPoly
# =====================


class NCPoly:
    """Normal-ordered noncommutative polynomial with QEtaCoeff coefficients."""

    __slots__ = ("alphabet", "_terms", "_hash")

    def __init__(
        self,
        alphabet: GeneratorAlphabet,
        terms: Union[Mapping[NCMonomial, Scalar], Iterable[Tuple[NCMonomial, Scalar]]] = (),
    ):
        width = len(alphabet.generator_names())
        items = terms.items() if isinstance(terms, Mapping) else terms
        cleaned: Dict[NCMonomial, QEtaCoeff] = {}
        for monomial, coeff in items:
            if len(monomial.exps) != width:
                raise AlphabetError(
                    f"Monomial {monomial} does not fit the {alphabet.describe()} alphabet"
                )
            total = cleaned.get(monomial, QEtaCoeff.zero()) + QEtaCoeff.coerce(coeff)
            if total:
                cleaned[monomial] = total
            else:
                cleaned.pop(monomial, None)
        self.alphabet = alphabet
        self._terms = cleaned
        self._hash = None

    # ---- constructors ----

    @classmethod
    def zero(cls, alphabet: GeneratorAlphabet) -> "NCPoly":
        return cls(alphabet)

    @classmethod
    def constant(cls, alphabet: GeneratorAlphabet, value: Scalar) -> "NCPoly":
        return cls(alphabet, {unit_monomial(alphabet): value})

    @classmethod
    def monomial(
        cls, alphabet: GeneratorAlphabet, k_power: int, exps: Sequence[int], coeff: Scalar = 1
    ) -> "NCPoly":
        return cls(alphabet, {NCMonomial(k_power, tuple(exps)): coeff})

    @classmethod
    def generator(cls, alphabet: GeneratorAlphabet, name: str) -> "NCPoly":
        if name == K_LETTER:
            return cls.monomial(alphabet, 1, unit_monomial(alphabet).exps)
        if name == K_INVERSE_LETTER:
            return cls.monomial(alphabet, -1, unit_monomial(alphabet).exps)
        names = alphabet.generator_names()
        if name not in names:
            alphabet.rank(name)
        exps = [0] * len(names)
        exps[names.index(name)] = 1
        return cls.monomial(alphabet, 0, exps)

    @classmethod
    def q_normal(cls, alphabet: GeneratorAlphabet, p: int, r: int, s: int, coeff: Scalar = 1) -> "NCPoly":
        """N^p_rs = K^p b+^r b^s (or K^p zb^r z^s on the plane)."""
        if alphabet.copy_count != 1:
            raise AlphabetError("q-normal monomials live on a single copy")
        return cls.monomial(alphabet, p, (r, s), coeff)

    # ---- inspection ----

    def terms(self) -> List[Tuple[NCMonomial, QEtaCoeff]]:
        return sorted(self._terms.items(), key=lambda item: _sort_key(item[0]))

    def monomials(self) -> List[NCMonomial]:
        return [m for m, _ in self.terms()]

    def coefficient(self, monomial: NCMonomial) -> QEtaCoeff:
        return self._terms.get(monomial, QEtaCoeff.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def single_term(self) -> Tuple[QEtaCoeff, NCMonomial]:
        if len(self._terms) != 1:
            raise AlphabetError(f"Expected a single monomial, got {self.render()}")
        (monomial, coeff), = self._terms.items()
        return coeff, monomial

    def has_k(self) -> bool:
        return any(m.k_power for m in self._terms)

    # ---- arithmetic ----

    def _check(self, other: "NCPoly") -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetError(
                f"Alphabet mismatch: {self.alphabet.describe()} vs {other.alphabet.describe()}"
            )

    def __add__(self, other: Union["NCPoly", Scalar]) -> "NCPoly":
        if not isinstance(other, NCPoly):
            other = NCPoly.constant(self.alphabet, other)
        self._check(other)
        return NCPoly(self.alphabet, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.alphabet, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Union["NCPoly", Scalar]) -> "NCPoly":
        if not isinstance(other, NCPoly):
            other = NCPoly.constant(self.alphabet, other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "NCPoly":
        return NCPoly.constant(self.alphabet, other) - self

    def scale(self, factor: Scalar) -> "NCPoly":
        factor = QEtaCoeff.coerce(factor)
        return NCPoly(self.alphabet, {m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other: Union["NCPoly", Scalar]) -> "NCPoly":
        if isinstance(other, NCPoly):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other: Scalar) -> "NCPoly":
        return self.scale(other)

    def __pow__(self, n: int) -> "NCPoly":
        if n < 0:
            raise AlphabetError("Negative powers of polynomials are not defined")
        result = NCPoly.constant(self.alphabet, 1)
        for _ in range(n):
            result = multiply(result, self)
        return result

    def map_coefficients(self, fn) -> "NCPoly":
        return NCPoly(self.alphabet, [(m, fn(c)) for m, c in self._terms.items()])

    def relabel(self, alphabet: GeneratorAlphabet) -> "NCPoly":
        """Same monomials read in another alphabet of equal width."""
        return NCPoly(alphabet, self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.alphabet == other.alphabet and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alphabet, frozenset(self._terms.items())))
        return self._hash

    # ---- rendering ----

    def render(self) -> str:
        rows = []
        for monomial, coeff in self.terms():
            generators = monomial.factors(self.alphabet)
            for sign, factors in coeff.summands():
                rows.append((sign, factors + generators))
        return join_summands(rows)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"NCPoly[{self.alphabet.describe()}]({self.render()!r})"


def multiply(x: NCPoly, y: NCPoly) -> NCPoly:
    """Normal-ordered product x*y."""
    x._check(y)
    out: List[Tuple[NCMonomial, QEtaCoeff]] = []
    for m1, c1 in x._terms.items():
        for m2, c2 in y._terms.items():
            scale = c1 * c2
            for factor, monomial in monomial_product(x.alphabet, m1, m2):
                out.append((monomial, factor * scale))
    return NCPoly(x.alphabet, out)


def commutator(x: NCPoly, y: NCPoly) -> NCPoly:
    return multiply(x, y) - multiply(y, x)


def q_commutator_factor(m1: NCMonomial, m2: NCMonomial) -> QRat:
    """q^{2(bc - ad + p(d - c) + t(a - b))} for N^p_ab and N^t_cd."""
    p, (a, b) = m1.k_power, m1.exps
    t, (c, d) = m2.k_power, m2.exps
    return q_power(2 * (b * c - a * d + p * (d - c) + t * (a - b)))


def q_commutator(x: NCPoly, y: NCPoly) -> NCPoly:
    """xy - q^{...} yx, with the q-power taken per pair of monomials."""
    x._check(y)
    if x.alphabet.copy_count != 1:
        raise AlphabetError("q-commutators are defined for single-copy alphabets")
    total = NCPoly.zero(x.alphabet)
    for m1, c1 in x._terms.items():
        for m2, c2 in y._terms.items():
            a = NCPoly(x.alphabet, {m1: c1})
            b = NCPoly(x.alphabet, {m2: c2})
            total = total + multiply(a, b) - multiply(b, a).scale(q_commutator_factor(m1, m2))
    return total


def hermitian_conjugate(x: NCPoly) -> NCPoly:
    """Adjoint: reverse the word, swap b <-> b+ (z <-> zb), K self-adjoint."""
    alphabet = x.alphabet
    names = alphabet.generator_names()
    total = NCPoly.zero(alphabet)
    for monomial, coeff in x._terms.items():
        product = NCPoly.constant(alphabet, coeff.conjugate())
        # reversed word: the z/b block (conjugated to zb/b+) comes first
        for index in reversed(range(len(names))):
            partner = names[index ^ 1]
            product = product * NCPoly.generator(alphabet, partner) ** monomial.exps[index]
        product = product * NCPoly.monomial(alphabet, monomial.k_power, unit_monomial(alphabet).exps)
        total = total + product
    return total


# =====================
# Rewriting system
# =====================


@dataclass(frozen=True)
class Word:
    """A coefficient times a product of generator letters, in any order."""

    alphabet: GeneratorAlphabet
    letters: Tuple[str, ...]
    coefficient: QEtaCoeff = field(default_factory=QEtaCoeff.one)

    def __post_init__(self):
        for letter in self.letters:
            self.alphabet.rank(letter)


def infer_alphabet(letters: Sequence[str]) -> GeneratorAlphabet:
    """Alphabet of a word; rejects words mixing oscillator and plane generators."""
    oscillator = any(l in ("b", "bd") for l in letters)
    plane = [l for l in letters if l.startswith("z")]
    if oscillator and plane:
        raise AlphabetError(f"Word mixes oscillator and plane generators: {' '.join(letters)}")
    if plane:
        copies = 1
        for letter in plane:
            if "_" in letter:
                copies = max(copies, int(letter.split("_", 1)[1]))
        return plane_alphabet(copies)
    return OSCILLATOR_ALPHABET


class RewriteSystem:
    """
    Relation table of an alphabet as oriented rewrite rules g h -> lambda h g + remainder.

    A pair is reducible when it is out of normal order or is K Ki / Ki K.
    Reduction terminates: every rule either cancels letters or removes an
    inversion while adding only shorter words.
    """

    def __init__(self, alphabet: GeneratorAlphabet):
        self.alphabet = alphabet

    def _k_crossing(self, letter: str) -> QRat:
        """lambda in letter K = lambda K letter."""
        return q_power(2 if self.alphabet.is_creation(letter) else -2)

    def is_reducible(self, g: str, h: str) -> bool:
        if {g, h} == {K_LETTER, K_INVERSE_LETTER}:
            return True
        return self.alphabet.rank(g) > self.alphabet.rank(h)

    def rule(self, g: str, h: str) -> List[Tuple[QEtaCoeff, Tuple[str, ...]]]:
        """Right-hand side of g h as (coefficient, letters) pairs."""
        if {g, h} == {K_LETTER, K_INVERSE_LETTER}:
            return [(QEtaCoeff.one(), ())]
        if h == K_LETTER:
            return [(QEtaCoeff.scalar(self._k_crossing(g)), (h, g))]
        if h == K_INVERSE_LETTER:
            return [(QEtaCoeff.scalar(QFIELD.one / self._k_crossing(g)), (h, g))]
        if self.alphabet.kind == OSCILLATOR:
            # g = b, h = bd
            return [(QEtaCoeff.scalar(q_power(2)), (h, g)), (QEtaCoeff.eta2(), ())]
        g_creation = self.alphabet.is_creation(g)
        h_creation = self.alphabet.is_creation(h)
        if not g_creation and h_creation:
            factor = q_power(2)
        elif g_creation and not h_creation:
            factor = q_power(-2)
        else:
            factor = QFIELD.one
        return [(QEtaCoeff.scalar(factor), (h, g))]

    def find_redex(self, letters: Tuple[str, ...], strategy: str = LEFTMOST) -> Optional[int]:
        positions = range(len(letters) - 1)
        if strategy == RIGHTMOST:
            positions = reversed(positions)
        elif strategy != LEFTMOST:
            raise AlphabetError(f"Unknown rewrite strategy '{strategy}'")
        for i in positions:
            if self.is_reducible(letters[i], letters[i + 1]):
                return i
        return None

    def rewrite_at(self, letters: Tuple[str, ...], position: int):
        head, tail = letters[:position], letters[position + 2:]
        return [
            (coeff, head + replacement + tail)
            for coeff, replacement in self.rule(letters[position], letters[position + 1])
        ]

    def normalize(
        self, combination: Mapping[Tuple[str, ...], QEtaCoeff], strategy: str = LEFTMOST
    ) -> Dict[Tuple[str, ...], QEtaCoeff]:
        result: Dict[Tuple[str, ...], QEtaCoeff] = {}
        pending = dict(combination)
        steps = 0
        while pending:
            letters, coeff = pending.popitem()
            position = self.find_redex(letters, strategy)
            if position is None:
                _accumulate(result, letters, coeff)
                continue
            for factor, rewritten in self.rewrite_at(letters, position):
                _accumulate(pending, rewritten, coeff * factor)
            steps += 1
        logger.debug("normalized %d words in %d rewrite steps", len(combination), steps)
        return result

    def to_poly(self, normal_words: Mapping[Tuple[str, ...], QEtaCoeff]) -> NCPoly:
        names = self.alphabet.generator_names()
        terms = []
        for letters, coeff in normal_words.items():
            k_power = letters.count(K_LETTER) - letters.count(K_INVERSE_LETTER)
            exps = tuple(letters.count(name) for name in names)
            terms.append((NCMonomial(k_power, exps), coeff))
        return NCPoly(self.alphabet, terms)

    def critical_pairs(self) -> List[Tuple[str, str, str]]:
        """Overlaps g h k whose two one-step reductions do not rejoin."""
        failures = []
        letters = self.alphabet.letters()
        for g in letters:
            for h in letters:
                if not self.is_reducible(g, h):
                    continue
                for k in letters:
                    if not self.is_reducible(h, k):
                        continue
                    word = (g, h, k)
                    left = self.normalize(_combine(self.rewrite_at(word, 0)))
                    right = self.normalize(_combine(self.rewrite_at(word, 1)))
                    if self.to_poly(left) != self.to_poly(right):
                        failures.append(word)
        return failures


def _accumulate(target: Dict[Tuple[str, ...], QEtaCoeff], letters, coeff: QEtaCoeff) -> None:
    total = target.get(letters, QEtaCoeff.zero()) + coeff
    if total:
        target[letters] = total
    else:
        target.pop(letters, None)


def _combine(pairs) -> Dict[Tuple[str, ...], QEtaCoeff]:
    out: Dict[Tuple[str, ...], QEtaCoeff] = {}
    for coeff, letters in pairs:
        _accumulate(out, letters, coeff)
    return out


def normal_order(word: Word, strategy: str = LEFTMOST) -> NCPoly:
    """Rewrite a word to its normal form; the result does not depend on strategy."""
    system = RewriteSystem(word.alphabet)
    normal = system.normalize({word.letters: word.coefficient}, strategy)
    return system.to_poly(normal)


def word_of(letters: Sequence[str], coefficient: Scalar = 1) -> Word:
    letters = tuple(letters)
    return Word(infer_alphabet(letters), letters, QEtaCoeff.coerce(coefficient))


# =====================
# Contractions
# =====================


def _binomial_shift(poly_in_u: Mapping[int, int]) -> Dict[int, Fraction]:
    """Coefficients in x of sum_k c_k (1 + x)^k."""
    out: Dict[int, Fraction] = {}
    for k, c in poly_in_u.items():
        for j in range(k + 1):
            out[j] = out.get(j, Fraction(0)) + c * comb(k, j)
    return {j: v for j, v in out.items() if v}


def _series_quotient(numer: Mapping[int, Fraction], denom: Mapping[int, Fraction], count: int) -> List[Fraction]:
    """First count coefficients of numer/denom as a power series (denom[0] != 0)."""
    inverse = [Fraction(0)] * count
    if count:
        inverse[0] = 1 / denom[0]
    for n in range(1, count):
        acc = Fraction(0)
        for k in range(1, n + 1):
            acc += denom.get(k, 0) * inverse[n - k]
        inverse[n] = -acc / denom[0]
    out = []
    for n in range(count):
        out.append(sum((numer.get(k, 0) * inverse[n - k] for k in range(n + 1)), Fraction(0)))
    return out


def _in_q_squared(terms: Mapping[int, int], value: QRat) -> Dict[int, int]:
    if any(e % 2 for e in terms):
        raise ContractionError(
            f"Coefficient {render_qrat(value)} contains odd powers of q; "
            "it cannot be written through q^2"
        )
    return {e // 2: c for e, c in terms.items()}


def _expand_coefficient(
    value: QRat, grade, order: int, gamma: Optional[Fraction], context: str
) -> List[Tuple[tuple, QRat]]:
    """Re-expand one graded QRat under q^2 = 1 + gamma*eta^2 up to eta-degree order."""
    numer = _binomial_shift(_in_q_squared(numerator_terms(value), value))
    denom = _binomial_shift(_in_q_squared(denominator_terms(value), value))
    pole = min(denom) if denom else 0
    denom = {k - pole: c for k, c in denom.items()}
    base_degree = grade[ETA]
    count = order - base_degree + pole + 1
    if count <= 0:
        return []
    series = _series_quotient(numer, denom, count)
    out = []
    for k, c in enumerate(series):
        if not c:
            continue
        shift = k - pole
        if base_degree + shift < 0:
            raise ContractionError(
                f"Pole at q^2 = 1 in {context}: coefficient {render_qrat(value)} leaves "
                f"eta^2 degree {base_degree + shift} after the substitution"
            )
        g = list(grade)
        g[ETA] += shift
        if gamma is None:
            g[GAMMA] += shift
            out.append((tuple(g), as_qrat(c)))
        else:
            if gamma == 0 and shift < 0:
                raise ContractionError(f"Pole at q^2 = 1 in {context} with gamma = 0")
            if gamma == 0 and shift > 0:
                continue
            out.append((tuple(g), as_qrat(c * gamma**shift)))
    return out


def substitute_contraction(
    x: NCPoly, mode: str, order: int, gamma: Optional[Union[int, Fraction]] = None
) -> NCPoly:
    """
    Re-grade x for a classical contraction.

    gamma_limit substitutes q^2 = 1 + gamma*eta^2 (gamma formal unless a
    rational value is given) and re-expands to eta^2 degree order; fixed_q keeps
    q and drops everything above that degree.
    """
    if order < 0:
        raise ContractionError("contraction order must be nonnegative")
    if mode == FIXED_Q:
        return x.map_coefficients(lambda c: c.truncate_eta(order))
    if mode != GAMMA_LIMIT:
        raise ContractionError(f"Unknown contraction mode '{mode}'")
    gamma = None if gamma is None else Fraction(gamma)
    terms = []
    for monomial, coeff in x.terms():
        context = f"term {NCPoly(x.alphabet, {monomial: coeff}).render()}"
        expanded = []
        for grade, value in coeff.items():
            expanded.extend(_expand_coefficient(value, grade, order, gamma, context))
        terms.append((monomial, QEtaCoeff(expanded)))
    return NCPoly(x.alphabet, terms)


def divide_by_eta2_and_limit(x: NCPoly) -> NCPoly:
    """Coefficient of eta^2, after checking that nothing of lower degree survives."""
    residual = x.map_coefficients(
        lambda c: QEtaCoeff([(g, v) for g, v in c.items() if g[ETA] <= 0])
    )
    if residual:
        raise EtaDivisionError(
            f"Cannot divide by eta^2: degree <= 0 part {residual.render()} is nonzero"
        )
    return x.map_coefficients(lambda c: c.eta_part(1).shift_eta(-1))


def rename_eta2(x: NCPoly, target: str = "hbar") -> NCPoly:
    return x.map_coefficients(lambda c: c.rename("eta2", target))


def specialize_harmonic(x: NCPoly) -> NCPoly:
    """q -> 1 (so K -> 1) and eta^2 -> hbar: the undeformed oscillator."""
    terms = []
    for monomial, coeff in x.terms():
        value = QEtaCoeff(
            [(g, as_qrat(evaluate_qrat(v, 1))) for g, v in coeff.items()]
        ).rename("eta2", "hbar")
        terms.append((NCMonomial(0, monomial.exps), value))
    return NCPoly(x.alphabet, terms)
