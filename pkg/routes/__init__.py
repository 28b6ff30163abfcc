"""Routes package for API endpoints."""

from .algebra import router as algebra_router
from .numerics import router as numerics_router

__all__ = [
    "algebra_router",
    "numerics_router",
]
