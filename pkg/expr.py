"""
Expression language for oscillator and q-plane polynomials.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' integer)?
    atom   := 'comm(' expr ',' expr ')' | 'qcomm(' expr ',' expr ')'
            | rational | ident | '(' expr ')'

Generators: K, bd, b (oscillator) or K, zb, z, zb_i, z_i (plane).
Parameters: q, eta2, hbar, omega, gamma, kappa, i.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Set, Tuple, Union

from pyparsing import (
    Forward,
    Keyword,
    Literal,
    Opt,
    ParseBaseException,
    ParseFatalException,
    ParserElement,
    Regex,
    Suppress,
    ZeroOrMore,
    one_of,
)

from ncalg import (
    OSCILLATOR_ALPHABET,
    AlphabetError,
    GeneratorAlphabet,
    NCPoly,
    commutator,
    multiply,
    plane_alphabet,
    q_commutator,
    unit_monomial,
)
from qarith import PARAMETERS, QAlgebraError, QEtaCoeff, q

logger = logging.getLogger(__name__)

ParserElement.enable_packrat()

OSCILLATOR_GENERATORS = ("K", "bd", "b")
PLANE_PATTERN = re.compile(r"^(zb|z)(?:_([1-9]\d*))?$")
SCALAR_NAMES = ("q",) + PARAMETERS


class ExpressionSyntaxError(QAlgebraError):
    """Exception raised for text that does not match the grammar."""
    pass


class UnknownIdentifierError(QAlgebraError):
    """Exception raised for identifiers outside the alphabet."""
    pass


class ExpressionEvaluationError(QAlgebraError):
    """Exception raised for well-formed expressions without a value."""
    pass


# =====================
# AST
# =====================


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Rational:
    value: Fraction


@dataclass(frozen=True)
class Power:
    base: "Ast"
    exponent: int


@dataclass(frozen=True)
class Product:
    factors: Tuple["Ast", ...]


@dataclass(frozen=True)
class Sum:
    terms: Tuple[Tuple[int, "Ast"], ...]


@dataclass(frozen=True)
class Comm:
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class QComm:
    left: "Ast"
    right: "Ast"


Ast = Union[Ident, Rational, Power, Product, Sum, Comm, QComm]


def _to_sum(tokens) -> Ast:
    items = list(tokens)
    sign = 1
    if items and items[0] in ("+", "-"):
        sign = -1 if items.pop(0) == "-" else 1
    terms = [(sign, items[0])]
    for i in range(1, len(items), 2):
        terms.append((-1 if items[i] == "-" else 1, items[i + 1]))
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return Sum(tuple(terms))


def _to_product(tokens) -> Ast:
    items = list(tokens)
    if len(items) == 1:
        return items[0]
    return Product(tuple(items))


def _to_rational(text, loc, tokens) -> Ast:
    _, _, denominator = tokens[0].partition("/")
    if denominator and int(denominator) == 0:
        raise ParseFatalException(text, loc, f"zero denominator in {tokens[0]}")
    return Rational(Fraction(tokens[0]))


def _to_power(tokens) -> Ast:
    if len(tokens) == 1:
        return tokens[0]
    return Power(tokens[0], int(tokens[1]))


def _build_grammar() -> ParserElement:
    lpar, rpar, comma = map(Suppress, "(),")
    expr = Forward()
    integer = Regex(r"[+-]?\d+")
    rational = Regex(r"\d+(/\d+)?").set_parse_action(_to_rational)
    ident = Regex(r"[A-Za-z][A-Za-z0-9_]*").set_parse_action(lambda t: Ident(t[0]))
    comm = (Suppress(Keyword("comm")) + lpar + expr + comma + expr + rpar).set_parse_action(
        lambda t: Comm(t[0], t[1])
    )
    qcomm = (Suppress(Keyword("qcomm")) + lpar + expr + comma + expr + rpar).set_parse_action(
        lambda t: QComm(t[0], t[1])
    )
    atom = comm | qcomm | rational | ident | (lpar + expr + rpar)
    factor = (atom + Opt(Suppress(Literal("^")) + integer)).set_parse_action(_to_power)
    term = (factor + ZeroOrMore(Suppress(Literal("*")) + factor)).set_parse_action(_to_product)
    expr <<= (Opt(one_of("+ -")) + term + ZeroOrMore(one_of("+ -") + term)).set_parse_action(_to_sum)
    return expr


GRAMMAR = _build_grammar()


# =====================
# Parsing
# =====================


def _identifiers(node: Ast) -> Set[str]:
    if isinstance(node, Ident):
        return {node.name}
    if isinstance(node, Rational):
        return set()
    if isinstance(node, Power):
        return _identifiers(node.base)
    if isinstance(node, Product):
        return set().union(*(_identifiers(f) for f in node.factors))
    if isinstance(node, Sum):
        return set().union(*(_identifiers(t) for _, t in node.terms))
    return _identifiers(node.left) | _identifiers(node.right)


def _is_generator(name: str) -> bool:
    return name in OSCILLATOR_GENERATORS or bool(PLANE_PATTERN.match(name))


def parse(text: str) -> Ast:
    """Parse text into an AST; identifiers are checked against the alphabets."""
    try:
        ast = GRAMMAR.parse_string(text, parse_all=True)[0]
    except ParseBaseException as exc:
        raise ExpressionSyntaxError(
            f"Syntax error at column {exc.col}: {exc.msg}\n  {text}\n  {' ' * (exc.col - 1)}^"
        )
    unknown = sorted(n for n in _identifiers(ast) if not _is_generator(n) and n not in SCALAR_NAMES)
    if unknown:
        raise UnknownIdentifierError(
            f"Unknown identifier(s) {', '.join(unknown)}. Generators: K, bd, b, zb, z, zb_i, z_i; "
            f"parameters: {', '.join(SCALAR_NAMES)}"
        )
    return ast


def infer_alphabet(ast: Ast) -> GeneratorAlphabet:
    names = [n for n in _identifiers(ast) if _is_generator(n)]
    oscillator = [n for n in names if n in ("bd", "b")]
    plane = [PLANE_PATTERN.match(n) for n in names if PLANE_PATTERN.match(n)]
    if oscillator and plane:
        raise AlphabetError("Expression mixes oscillator (b, bd) and plane (z, zb) generators")
    if plane:
        return plane_alphabet(max(int(m.group(2) or 1) for m in plane))
    return OSCILLATOR_ALPHABET


# =====================
# Evaluation
# =====================


Value = Union[QEtaCoeff, NCPoly]


def _generator_name(name: str) -> str:
    match = PLANE_PATTERN.match(name)
    if match and match.group(2) == "1":
        return match.group(1)
    return name


def _promote(value: Value, alphabet: GeneratorAlphabet) -> NCPoly:
    if isinstance(value, NCPoly):
        return value
    return NCPoly.constant(alphabet, value)


def _add(x: Value, y: Value, alphabet: GeneratorAlphabet) -> Value:
    if isinstance(x, QEtaCoeff) and isinstance(y, QEtaCoeff):
        return x + y
    return _promote(x, alphabet) + _promote(y, alphabet)


def _mul(x: Value, y: Value) -> Value:
    if isinstance(x, QEtaCoeff) and isinstance(y, QEtaCoeff):
        return x * y
    if isinstance(x, QEtaCoeff):
        return y.scale(x)
    if isinstance(y, QEtaCoeff):
        return x.scale(y)
    return multiply(x, y)


def _power(base: Value, exponent: int, alphabet: GeneratorAlphabet) -> Value:
    if isinstance(base, QEtaCoeff):
        try:
            return base**exponent
        except QAlgebraError as exc:
            raise ExpressionEvaluationError(f"Cannot raise {base.render()} to {exponent}: {exc}")
    if exponent >= 0:
        return base**exponent
    if len(base) == 1:
        coeff, monomial = base.single_term()
        if monomial.exps == unit_monomial(alphabet).exps and coeff == 1:
            return NCPoly.monomial(alphabet, monomial.k_power * exponent, monomial.exps)
    raise ExpressionEvaluationError(
        f"Negative powers are defined for K and invertible scalars only, not {base.render()}"
    )


def _evaluate(node: Ast, alphabet: GeneratorAlphabet) -> Value:
    if isinstance(node, Rational):
        return QEtaCoeff.scalar(node.value)
    if isinstance(node, Ident):
        if node.name == "q":
            return QEtaCoeff.scalar(q)
        if node.name in PARAMETERS:
            return QEtaCoeff.symbol(node.name)
        return NCPoly.generator(alphabet, _generator_name(node.name))
    if isinstance(node, Power):
        return _power(_evaluate(node.base, alphabet), node.exponent, alphabet)
    if isinstance(node, Product):
        value = _evaluate(node.factors[0], alphabet)
        for factor in node.factors[1:]:
            value = _mul(value, _evaluate(factor, alphabet))
        return value
    if isinstance(node, Sum):
        total: Value = QEtaCoeff.zero()
        for sign, term in node.terms:
            value = _evaluate(term, alphabet)
            total = _add(total, value if sign > 0 else -value, alphabet)
        return total
    left = _promote(_evaluate(node.left, alphabet), alphabet)
    right = _promote(_evaluate(node.right, alphabet), alphabet)
    if isinstance(node, Comm):
        return commutator(left, right)
    for operand in (left, right):
        if len(operand) != 1:
            raise ExpressionEvaluationError(
                f"qcomm needs a scalar times a single q-normal monomial, got {operand.render()}"
            )
    return q_commutator(left, right)


def evaluate(ast: Ast, alphabet: Optional[GeneratorAlphabet] = None) -> NCPoly:
    """Value of an AST as a normal-ordered polynomial over the (inferred) alphabet."""
    inferred = infer_alphabet(ast)
    if alphabet is None:
        alphabet = inferred
    elif inferred != OSCILLATOR_ALPHABET and inferred.kind != alphabet.kind:
        raise AlphabetError(
            f"Expression uses the {inferred.describe()} alphabet, expected {alphabet.describe()}"
        )
    return _promote(_evaluate(ast, alphabet), alphabet)


def parse_poly(text: str, alphabet: Optional[GeneratorAlphabet] = None) -> NCPoly:
    return evaluate(parse(text), alphabet)


def print_expr(x: Union[NCPoly, QEtaCoeff]) -> str:
    """Canonical text; parse_poly(print_expr(x), x.alphabet) == x."""
    return x.render()
