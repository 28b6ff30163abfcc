"""Pydantic schemas for command results and API request models."""

from pydantic import BaseModel, Field
from typing import Any, Dict, List, Optional

import config
from reduced_action import PathConfig


# =====================
# Command Output
# =====================


class CommandResult(BaseModel):
    """One command's output; the JSON form of every CLI subcommand and HTTP route."""
    command: str
    params: Dict[str, Any] = {}
    result: Any = None
    residuals: Optional[Dict[str, float]] = None
    passed: Optional[bool] = None


class CheckRow(BaseModel):
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float


class SpectrumRow(BaseModel):
    n: int
    eigenvalue: float
    closed_form: float


class TraceReportRow(BaseModel):
    n: int
    window: int
    trace: float
    stabilization: float
    ratio: float
    moment_ratio: float
    ladder_deviation: float


class KernelComponentItem(BaseModel):
    coefficient: str
    p: int
    r: int
    s: int
    text: str


# =====================
# Algebra Inputs
# =====================


class ExpressionInput(BaseModel):
    expr: str
    alphabet: Optional[str] = None


class ExpressionPairInput(BaseModel):
    left: str
    right: str


class StarInput(ExpressionPairInput):
    algebra: str = "weyl"
    order: Optional[int] = None
    gamma: Optional[str] = None


class PoissonInput(ExpressionPairInput):
    gamma: Optional[str] = None


class KernelInput(BaseModel):
    expr: str
    order: int = Field(default=config.QOSC_KERNEL_ORDER, ge=0)


class IntegrateInput(BaseModel):
    expr: str
    variant: str = "noncommutative"
    scaled: bool = False


# =====================
# Numerics Inputs
# =====================


class SpectrumInput(BaseModel):
    dim: int = Field(default=32, ge=2)
    q: float = Field(default=1.2, gt=0)
    eta2: float = Field(default=1.0, gt=0)
    omega: float = 1.0
    tol: float = config.QOSC_SPECTRUM_TOL


class EvolveInput(SpectrumInput):
    t: List[float] = [0.3, 1.7, 10.0]
    hbar: float = Field(default=1.0, gt=0)
    operators: List[str] = ["b", "bd"]
    tol: float = config.QOSC_EVOLUTION_TOL


class TraceCheckInput(BaseModel):
    q: float = 1.5
    nmax: int = 3
    windows: List[int] = [20, 25, 30]
    step: int = 5
    tol: float = config.QOSC_TRACE_TOL


class BchCheckInput(BaseModel):
    dim: int = 60
    kappa: float = 0.04
    hbar: float = 1.0
    block: Optional[int] = 20
    tol: float = config.QOSC_BCH_TOL


class PhiInput(BaseModel):
    q: float
    x: List[float]
    tol: float = config.QOSC_PHI_TOL


class ActionResidualInput(PathConfig):
    tol: float = config.QOSC_ACTION_TOL
