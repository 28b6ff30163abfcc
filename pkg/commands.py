"""
Command implementations shared by the CLI and the HTTP routes.

Each function takes plain parameters, calls into the library modules and
returns a CommandResult. Domain errors propagate as QAlgebraError subclasses.
"""

import logging
from dataclasses import asdict
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from expr import evaluate, infer_alphabet, parse, parse_poly, print_expr
from kernels import kernel_of_operator
from matrep import (
    FockRep,
    hamiltonian_spectrum,
    heisenberg_evolution_check,
    trace_qintegral_report,
    weyl_form_bch_check,
)
from ncalg import (
    OSCILLATOR_ALPHABET,
    PLANE,
    PLANE_ALPHABET,
    GeneratorAlphabet,
    NCPoly,
    commutator,
    plane_alphabet,
    q_commutator,
)
from qarith import QAlgebraError
from reduced_action import (
    PathConfig,
    phi_eval,
    reduced_action_residual,
    reduced_action_value,
)
from schemas import (
    CheckRow,
    CommandResult,
    KernelComponentItem,
    SpectrumRow,
    TraceReportRow,
)
from symcalc import (
    WEYL,
    integrate_symbol,
    operator_of,
    poisson_commutative,
    q_poisson,
    star_expand,
    star_product,
    symbol_of,
)
from verification import SUITE_NAMES, run_suite

logger = logging.getLogger(__name__)


class CommandError(QAlgebraError):
    """Exception raised for invalid command parameters."""
    pass


# =====================
# Input helpers
# =====================


def alphabet_from_name(name: Optional[str]) -> Optional[GeneratorAlphabet]:
    """'oscillator', 'plane' or 'plane:N' (N copies); None means infer."""
    if name is None:
        return None
    if name == "oscillator":
        return OSCILLATOR_ALPHABET
    if name == PLANE:
        return PLANE_ALPHABET
    if name.startswith(PLANE + ":"):
        try:
            return plane_alphabet(int(name.split(":", 1)[1]))
        except ValueError:
            pass
    raise CommandError(f"Unknown alphabet '{name}' (use oscillator, plane or plane:N)")


def parse_gamma(text: Optional[str]) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CommandError(f"gamma must be a rational number, got '{text}'")


def parse_pair(left: str, right: str):
    """Both operands evaluated over one alphabet (plane wins over the default)."""
    asts = (parse(left), parse(right))
    planes = [a for a in map(infer_alphabet, asts) if a.kind == PLANE]
    alphabet = max(planes, key=lambda a: a.copy_count) if planes else OSCILLATOR_ALPHABET
    return evaluate(asts[0], alphabet), evaluate(asts[1], alphabet)


def as_symbol(poly: NCPoly) -> NCPoly:
    if poly.alphabet == OSCILLATOR_ALPHABET:
        return symbol_of(poly)
    if poly.alphabet == PLANE_ALPHABET:
        return poly
    raise CommandError(f"Symbols live on one plane copy, got {poly.alphabet.describe()}")


def as_operator(poly: NCPoly) -> NCPoly:
    if poly.alphabet == PLANE_ALPHABET:
        return operator_of(poly)
    if poly.alphabet == OSCILLATOR_ALPHABET:
        return poly
    raise CommandError(f"Operators live on the oscillator alphabet, got {poly.alphabet.describe()}")


def symbol_pair(left: str, right: str):
    x, y = parse_pair(left, right)
    return as_symbol(x), as_symbol(y)


# =====================
# Algebra commands
# =====================


def normal_order_command(expr: str, alphabet: Optional[str] = None) -> CommandResult:
    poly = parse_poly(expr, alphabet_from_name(alphabet))
    return CommandResult(
        command="normal-order",
        params={"expr": expr, "alphabet": poly.alphabet.describe()},
        result=print_expr(poly),
    )


def print_command(expr: str, alphabet: Optional[str] = None) -> CommandResult:
    result = normal_order_command(expr, alphabet)
    result.command = "print"
    return result


def comm_command(left: str, right: str) -> CommandResult:
    x, y = parse_pair(left, right)
    return CommandResult(command="comm", params={"left": left, "right": right}, result=print_expr(commutator(x, y)))


def qcomm_command(left: str, right: str) -> CommandResult:
    x, y = parse_pair(left, right)
    for operand in (x, y):
        if len(operand) != 1:
            raise CommandError(f"qcomm needs single q-normal monomials, got {print_expr(operand)}")
    return CommandResult(
        command="qcomm", params={"left": left, "right": right}, result=print_expr(q_commutator(x, y))
    )


def symbol_command(expr: str) -> CommandResult:
    poly = parse_poly(expr)
    return CommandResult(command="symbol", params={"expr": expr}, result=print_expr(as_symbol(poly)))


def kernel_command(expr: str, order: int) -> CommandResult:
    op = as_operator(parse_poly(expr))
    kernel = kernel_of_operator(op, order)
    components = [
        KernelComponentItem(coefficient=c.coeff.render(), p=c.p, r=c.r, s=c.s, text=c.render()).model_dump()
        for c in kernel.components
    ]
    return CommandResult(
        command="kernel",
        params={"expr": expr, "order": order},
        result={"text": kernel.render(), "components": components},
    )


def integrate_command(expr: str, variant: str = "noncommutative", scaled: bool = False) -> CommandResult:
    sym = as_symbol(parse_poly(expr))
    value = integrate_symbol(sym, variant, scaled)
    return CommandResult(
        command="integrate",
        params={"expr": expr, "variant": variant, "scaled": scaled},
        result=value.render(),
    )


def star_command(
    left: str, right: str, algebra: str = WEYL, order: Optional[int] = None, gamma: Optional[str] = None
) -> CommandResult:
    s1, s2 = symbol_pair(left, right)
    if order is None:
        value = star_product(s1, s2, algebra)
    else:
        value = star_expand(s1, s2, algebra, order, parse_gamma(gamma))
    return CommandResult(
        command="star",
        params={"left": left, "right": right, "algebra": algebra, "order": order, "gamma": gamma},
        result=print_expr(value),
    )


def poisson_command(left: str, right: str, gamma: Optional[str] = None) -> CommandResult:
    s1, s2 = symbol_pair(left, right)
    value = poisson_commutative(s1, s2, parse_gamma(gamma))
    return CommandResult(
        command="poisson", params={"left": left, "right": right, "gamma": gamma}, result=print_expr(value)
    )


def qpoisson_command(left: str, right: str) -> CommandResult:
    s1, s2 = symbol_pair(left, right)
    return CommandResult(
        command="qpoisson", params={"left": left, "right": right}, result=print_expr(q_poisson(s1, s2))
    )


# =====================
# Numeric commands
# =====================


def spectrum_command(dim: int, q: float, eta2: float, omega: float, tol: float) -> CommandResult:
    spectrum = hamiltonian_spectrum(FockRep.build(dim, q, eta2), omega)
    deviation = spectrum.max_deviation()
    return CommandResult(
        command="spectrum",
        params={"dim": dim, "q": q, "eta2": eta2, "omega": omega, "tol": tol},
        result=[SpectrumRow(**row).model_dump() for row in spectrum.rows()],
        residuals={"max_deviation": deviation},
        passed=deviation <= tol,
    )


def evolve_command(
    dim: int,
    q: float,
    eta2: float,
    omega: float,
    times: Sequence[float],
    hbar: float,
    operators: Sequence[str],
    tol: float,
) -> CommandResult:
    rep = FockRep.build(dim, q, eta2)
    rows = []
    for op in operators:
        for t in times:
            residual = heisenberg_evolution_check(rep, omega, hbar, t, op)
            rows.append(
                {"operator": op, "t": t, "residual": residual.relative, "absolute_residual": residual.absolute}
            )
    # tol applies to the relative residual
    worst = max((row["residual"] for row in rows), default=0.0)
    return CommandResult(
        command="evolve",
        params={"dim": dim, "q": q, "eta2": eta2, "omega": omega, "t": list(times), "hbar": hbar, "tol": tol},
        result=rows,
        residuals={"max_residual": worst},
        passed=worst <= tol,
    )


def trace_check_command(q: float, nmax: int, windows: Sequence[int], step: int, tol: float) -> CommandResult:
    rows = trace_qintegral_report(q, nmax, windows, step)
    last = max(windows)
    stabilization = max(row.stabilization for row in rows if row.window == last)
    return CommandResult(
        command="trace-check",
        params={"q": q, "nmax": nmax, "windows": list(windows), "step": step, "tol": tol},
        result=[TraceReportRow(**asdict(row)).model_dump() for row in rows],
        residuals={"stabilization": stabilization},
        passed=stabilization <= tol,
    )


def bch_check_command(dim: int, kappa: float, hbar: float, block: Optional[int], tol: float) -> CommandResult:
    residual = weyl_form_bch_check(dim, kappa, hbar, block)
    return CommandResult(
        command="bch-check",
        params={"dim": dim, "kappa": kappa, "hbar": hbar, "block": block, "tol": tol},
        result=residual,
        residuals={"max_residual": residual},
        passed=residual <= tol,
    )


def phi_command(q: float, xs: Sequence[float], tol: float) -> CommandResult:
    values = np.atleast_1d(phi_eval(np.asarray(xs, dtype=float), q, tol))
    return CommandResult(
        command="phi",
        params={"q": q, "x": list(xs), "tol": tol},
        result=[{"x": float(x), "phi": float(v)} for x, v in zip(xs, values)],
    )


def action_residual_command(cfg: PathConfig, tol: float) -> CommandResult:
    residual = reduced_action_residual(cfg)
    worst = float(np.max(np.abs(residual)))
    action = reduced_action_value(cfg)
    return CommandResult(
        command="action-residual",
        params={"q": cfg.q, "k0": cfg.k0, "omega": cfg.omega, "points": len(cfg.grid), "tol": tol},
        result={"action_real": action.real, "action_imag": action.imag},
        residuals={"max_residual": worst},
        passed=worst <= tol,
    )


def verify_command(suite: str) -> CommandResult:
    if suite != "all" and suite not in SUITE_NAMES:
        raise CommandError(f"Unknown suite '{suite}' (use {', '.join(SUITE_NAMES)} or all)")
    rows: List[CheckRow] = [CheckRow(**asdict(r)) for r in run_suite(suite)]
    failed = [row for row in rows if not row.passed]
    logger.info("verify %s: %d checks, %d failed", suite, len(rows), len(failed))
    return CommandResult(
        command="verify",
        params={"suite": suite},
        result=[row.model_dump() for row in rows],
        passed=not failed,
    )
