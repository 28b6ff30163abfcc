"""Symbolic algebra routes: normal ordering, brackets, symbols, kernels."""

from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool

from commands import (
    comm_command,
    integrate_command,
    kernel_command,
    normal_order_command,
    poisson_command,
    qcomm_command,
    qpoisson_command,
    star_command,
    symbol_command,
)
from qarith import QAlgebraError
from schemas import (
    CommandResult,
    ExpressionInput,
    ExpressionPairInput,
    IntegrateInput,
    KernelInput,
    PoissonInput,
    StarInput,
)

router = APIRouter(prefix="/algebra", tags=["algebra"])


async def run_command(fn, *args) -> CommandResult:
    """Run a command off the event loop; domain errors become 422."""
    try:
        return await run_in_threadpool(fn, *args)
    except QAlgebraError as e:
        raise HTTPException(status_code=422, detail=str(e))


# =====================
# Expression Routes
# =====================


@router.post("/normal-order", response_model=CommandResult)
async def normal_order(data: ExpressionInput):
    """Normal-ordered canonical form of an expression."""
    return await run_command(normal_order_command, data.expr, data.alphabet)


@router.post("/commutator", response_model=CommandResult)
async def commutator(data: ExpressionPairInput):
    return await run_command(comm_command, data.left, data.right)


@router.post("/q-commutator", response_model=CommandResult)
async def q_commutator(data: ExpressionPairInput):
    """q-commutator of two single q-normal monomials."""
    return await run_command(qcomm_command, data.left, data.right)


@router.post("/symbol", response_model=CommandResult)
async def symbol(data: ExpressionInput):
    return await run_command(symbol_command, data.expr)


# =====================
# Symbol Calculus Routes
# =====================


@router.post("/star", response_model=CommandResult)
async def star(data: StarInput):
    """Exact star product, or its expansion when an order is given."""
    return await run_command(star_command, data.left, data.right, data.algebra, data.order, data.gamma)


@router.post("/poisson", response_model=CommandResult)
async def poisson(data: PoissonInput):
    return await run_command(poisson_command, data.left, data.right, data.gamma)


@router.post("/q-poisson", response_model=CommandResult)
async def q_poisson(data: ExpressionPairInput):
    return await run_command(qpoisson_command, data.left, data.right)


@router.post("/kernel", response_model=CommandResult)
async def kernel(data: KernelInput):
    return await run_command(kernel_command, data.expr, data.order)


@router.post("/integrate", response_model=CommandResult)
async def integrate(data: IntegrateInput):
    """q-integral of a K-free symbol."""
    return await run_command(integrate_command, data.expr, data.variant, data.scaled)
