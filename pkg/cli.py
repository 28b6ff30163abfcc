"""Command-line front end: qosc <subcommand> [options]."""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

import config
from commands import (
    action_residual_command,
    bch_check_command,
    comm_command,
    evolve_command,
    integrate_command,
    kernel_command,
    normal_order_command,
    phi_command,
    poisson_command,
    print_command,
    qcomm_command,
    qpoisson_command,
    spectrum_command,
    star_command,
    symbol_command,
    trace_check_command,
    verify_command,
)
from qarith import QAlgebraError
from reduced_action import load_path_config
from schemas import CommandResult
from verification import SUITE_NAMES

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qosc", description="q-deformed oscillator algebra engine")
    parser.add_argument("--output", choices=("text", "json"), default=config.QOSC_OUTPUT)
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        default=config.QOSC_LOG_LEVEL.upper(),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normal-order", help="normal-order an expression")
    p.add_argument("expr")
    p.add_argument("--alphabet", help="oscillator, plane or plane:N (default: inferred)")

    p = sub.add_parser("print", help="print an expression in canonical form")
    p.add_argument("expr")
    p.add_argument("--alphabet")

    for name in ("comm", "qcomm", "qpoisson"):
        p = sub.add_parser(name)
        p.add_argument("left")
        p.add_argument("right")

    p = sub.add_parser("symbol", help="normal symbol of an oscillator expression")
    p.add_argument("expr")

    p = sub.add_parser("kernel", help="closed-form kernel of an operator")
    p.add_argument("expr")
    p.add_argument("--order", type=int, default=config.QOSC_KERNEL_ORDER)

    p = sub.add_parser("integrate", help="q-integral of a K-free symbol")
    p.add_argument("expr")
    p.add_argument("--variant", choices=("noncommutative", "commutative"), default="noncommutative")
    p.add_argument("--scaled", action="store_true", help="use the eta-scaled measure")

    p = sub.add_parser("star", help="star product of two symbols")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--algebra", choices=("weyl", "commutative"), default="weyl")
    p.add_argument("--order", type=int, help="truncate at this eta^2 (hbar) degree")
    p.add_argument("--gamma", help="rational gamma for the commutative contraction")

    p = sub.add_parser("poisson", help="commutative Poisson bracket")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--gamma")

    p = sub.add_parser("spectrum", help="spectrum of omega K b+b in the truncated Fock space")
    _fock_arguments(p)
    p.add_argument("--tol", type=float, default=config.QOSC_SPECTRUM_TOL)

    p = sub.add_parser("evolve", help="Heisenberg evolution of b and b+")
    _fock_arguments(p)
    p.add_argument("--t", type=float, nargs="+", default=[0.3, 1.7, 10.0])
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--operator", choices=("b", "bd"), action="append")
    p.add_argument("--tol", type=float, default=config.QOSC_EVOLUTION_TOL, help="bound on the relative residual")

    p = sub.add_parser("trace-check", help="windowed trace against the q-integral")
    p.add_argument("--q", type=float, default=1.5)
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--windows", type=int, nargs="+", default=[20, 25, 30])
    p.add_argument("--step", type=int, default=5)
    p.add_argument("--tol", type=float, default=config.QOSC_TRACE_TOL)

    p = sub.add_parser("bch-check", help="Weyl form of the commutation relation")
    p.add_argument("--dim", type=int, default=60)
    p.add_argument("--kappa", type=float, default=0.04)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--block", type=int, default=20)
    p.add_argument("--tol", type=float, default=config.QOSC_BCH_TOL)

    p = sub.add_parser("phi", help="the phi series of the reduced action")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--tol", type=float, default=config.QOSC_PHI_TOL)

    p = sub.add_parser("action-residual", help="Euler-Lagrange residual of the reduced action")
    p.add_argument("--config", required=True, help="key=value path file")
    p.add_argument("--tol", type=float, default=config.QOSC_ACTION_TOL)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    return parser


def _fock_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--q", type=float, default=1.2)
    p.add_argument("--eta2", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)


def dispatch(args: argparse.Namespace) -> CommandResult:
    c = args.command
    if c == "normal-order":
        return normal_order_command(args.expr, args.alphabet)
    if c == "print":
        return print_command(args.expr, args.alphabet)
    if c == "comm":
        return comm_command(args.left, args.right)
    if c == "qcomm":
        return qcomm_command(args.left, args.right)
    if c == "qpoisson":
        return qpoisson_command(args.left, args.right)
    if c == "symbol":
        return symbol_command(args.expr)
    if c == "kernel":
        return kernel_command(args.expr, args.order)
    if c == "integrate":
        return integrate_command(args.expr, args.variant, args.scaled)
    if c == "star":
        return star_command(args.left, args.right, args.algebra, args.order, args.gamma)
    if c == "poisson":
        return poisson_command(args.left, args.right, args.gamma)
    if c == "spectrum":
        return spectrum_command(args.dim, args.q, args.eta2, args.omega, args.tol)
    if c == "evolve":
        operators = args.operator or ["b", "bd"]
        return evolve_command(args.dim, args.q, args.eta2, args.omega, args.t, args.hbar, operators, args.tol)
    if c == "trace-check":
        return trace_check_command(args.q, args.nmax, args.windows, args.step, args.tol)
    if c == "bch-check":
        return bch_check_command(args.dim, args.kappa, args.hbar, args.block, args.tol)
    if c == "phi":
        return phi_command(args.q, args.x, args.tol)
    if c == "action-residual":
        return action_residual_command(load_path_config(args.config), args.tol)
    return verify_command(args.suite)


# =====================
# Text output
# =====================


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def render_text(result: CommandResult) -> str:
    if result.command == "verify":
        lines = [
            f"[{'ok' if row['passed'] else 'FAIL'}] {row['suite']} / {row['name']}: {row['detail']} ({row['seconds']:.2f}s)"
            for row in result.result
        ]
        failed = sum(not row["passed"] for row in result.result)
        lines.append(f"{len(result.result) - failed} passed, {failed} failed")
        return "\n".join(lines)
    lines = []
    body = result.result
    if isinstance(body, list) and body and isinstance(body[0], dict):
        columns = list(body[0].keys())
        lines.append("\t".join(columns))
        lines.extend("\t".join(_format_value(row[col]) for col in columns) for row in body)
    elif isinstance(body, dict) and "text" in body:
        lines.append(body["text"])
    elif isinstance(body, dict):
        lines.extend(f"{key}: {_format_value(value)}" for key, value in body.items())
    else:
        lines.append(_format_value(body))
    for key, value in (result.residuals or {}).items():
        lines.append(f"{key}: {value:.3e}")
    if result.passed is not None:
        lines.append("ok" if result.passed else "FAIL")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")

    try:
        result = dispatch(args)
    except (QAlgebraError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    if args.output == "json":
        print(result.model_dump_json(indent=2))
    else:
        print(render_text(result))
    return 0 if result.passed is not False else 1


if __name__ == "__main__":
    sys.exit(main())
