"""Numeric representation routes and the verification suites."""

from fastapi import APIRouter

from commands import (
    action_residual_command,
    bch_check_command,
    evolve_command,
    phi_command,
    spectrum_command,
    trace_check_command,
    verify_command,
)
from reduced_action import PathConfig
from .algebra import run_command
from schemas import (
    ActionResidualInput,
    BchCheckInput,
    CommandResult,
    EvolveInput,
    PhiInput,
    SpectrumInput,
    TraceCheckInput,
)

router = APIRouter(prefix="/numerics", tags=["numerics"])


# =====================
# Fock Space Routes
# =====================


@router.post("/spectrum", response_model=CommandResult)
async def spectrum(data: SpectrumInput):
    """Spectrum of omega K b+b against the closed form."""
    return await run_command(spectrum_command, data.dim, data.q, data.eta2, data.omega, data.tol)


@router.post("/evolve", response_model=CommandResult)
async def evolve(data: EvolveInput):
    return await run_command(
        evolve_command, data.dim, data.q, data.eta2, data.omega, data.t, data.hbar, data.operators, data.tol
    )


@router.post("/bch-check", response_model=CommandResult)
async def bch_check(data: BchCheckInput):
    return await run_command(bch_check_command, data.dim, data.kappa, data.hbar, data.block, data.tol)


# =====================
# q-Plane Routes
# =====================


@router.post("/trace-check", response_model=CommandResult)
async def trace_check(data: TraceCheckInput):
    return await run_command(trace_check_command, data.q, data.nmax, data.windows, data.step, data.tol)


@router.post("/phi", response_model=CommandResult)
async def phi(data: PhiInput):
    return await run_command(phi_command, data.q, data.x, data.tol)


@router.post("/action-residual", response_model=CommandResult)
async def action_residual(data: ActionResidualInput):
    """Euler-Lagrange residual and value of the reduced action along a path."""
    cfg = PathConfig(**data.model_dump(exclude={"tol"}))
    return await run_command(action_residual_command, cfg, data.tol)


@router.get("/verify/{suite}", response_model=CommandResult)
async def verify(suite: str):
    return await run_command(verify_command, suite)
