"""
Reduced q-action along a "reduced trajectory" rho(t), nu(t).

With z = tau*rho, zb = rho*tau^{-1}/sqrt(q) and nu = log(tau), the action of the
q-oscillator path integral becomes

    S = int (i/sqrt(q)) phi(rho^2/sqrt(q)) (rho^2 nu' + rho rho') - (omega k0/sqrt(q)) rho^2 dt

where K is replaced by its eigenvalue k0. Varying nu gives
d/dt [rho^2 phi(rho^2/sqrt(q))] = 0.
"""

import logging
import math
import os
from typing import Dict, List, Union

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel
from scipy.integrate import trapezoid

from config import QOSC_PHI_TOL
from qarith import QAlgebraError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, List[float]]


class PathConfigError(QAlgebraError):
    """Exception raised for invalid path configurations."""
    pass


class PathConfig(BaseModel):
    q: float
    k0: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    eta2: float = 1.0
    grid: List[float]
    rho: ArrayLike
    nu: ArrayLike = 0.0

    def arrays(self):
        """(grid, rho, nu) as float arrays, scalars broadcast over the grid."""
        t = np.asarray(self.grid, dtype=float)
        try:
            rho = np.broadcast_to(np.asarray(self.rho, dtype=float), t.shape).copy()
            nu = np.broadcast_to(np.asarray(self.nu, dtype=float), t.shape).copy()
        except ValueError:
            raise PathConfigError("rho and nu must be scalars or have one value per grid point")
        return t, rho, nu


def validate_path(cfg: PathConfig):
    if not 0 < cfg.q < 1:
        raise PathConfigError(f"q must lie in (0, 1) for the phi series, got {cfg.q}")
    t, rho, nu = cfg.arrays()
    if t.size < 2:
        raise PathConfigError("The time grid needs at least two points")
    if np.any(np.diff(t) <= 0):
        raise PathConfigError("The time grid must be strictly increasing")
    if np.any(rho <= 0):
        raise PathConfigError("rho must be positive on the whole grid")
    return t, rho, nu


def phi_terms_needed(q: float, tol: float) -> int:
    """Number of terms after which the tail sum_{r>=R} is below q^{2R+2} <= tol."""
    return max(1, int(math.ceil(math.log(tol) / (2 * math.log(q)))))


def phi_eval(x, q: float, tol: float = QOSC_PHI_TOL):
    """
    phi(x) = sum_r q^{2r} / ((q^2(1-q^2))^{-1} + q^{2r} x)

    for x >= 0 and 0 < q < 1. Each term is at most q^{2r+2}(1-q^2), so the tail
    after R terms is bounded by q^{2R+2}.
    """
    if not 0 < q < 1:
        raise PathConfigError(f"phi is defined for 0 < q < 1, got q = {q}")
    if tol <= 0:
        raise PathConfigError("tolerance must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise PathConfigError("phi is evaluated at nonnegative arguments")
    count = phi_terms_needed(q, tol)
    powers = q ** (2 * np.arange(count))
    offset = 1.0 / (q**2 * (1 - q**2))
    values = np.sum(powers / (offset + np.multiply.outer(x, powers)), axis=-1)
    if values.ndim == 0:
        return float(values)
    return values


def conserved_density(cfg: PathConfig) -> np.ndarray:
    """rho^2 phi(rho^2/sqrt(q)) on the grid."""
    _, rho, _ = validate_path(cfg)
    return rho**2 * phi_eval(rho**2 / math.sqrt(cfg.q), cfg.q)


def reduced_action_residual(cfg: PathConfig) -> np.ndarray:
    """Euler-Lagrange residual of the nu-variation: d/dt of rho^2 phi(rho^2/sqrt(q))."""
    t, _, _ = validate_path(cfg)
    residual = np.gradient(conserved_density(cfg), t)
    logger.debug("action residual max %.3e on %d points", float(np.max(np.abs(residual))), t.size)
    return residual


def reduced_action_value(cfg: PathConfig) -> complex:
    """Trapezoidal value of the reduced action."""
    t, rho, nu = validate_path(cfg)
    root_q = math.sqrt(cfg.q)
    phi = phi_eval(rho**2 / root_q, cfg.q)
    kinetic = (1j / root_q) * phi * (rho**2 * np.gradient(nu, t) + rho * np.gradient(rho, t))
    potential = (cfg.omega * cfg.k0 / root_q) * rho**2
    return complex(trapezoid(kinetic - potential, t))


def _parse_array(key: str, text: str) -> ArrayLike:
    text = text.strip()
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return np.linspace(float(start), float(stop), int(count)).tolist()
        if "," in text:
            return [float(v) for v in text.split(",") if v.strip()]
        return float(text)
    except ValueError:
        raise PathConfigError(f"Cannot read '{key}' value '{text}'")


def load_path_config(path: str) -> PathConfig:
    """
    Read a flat key=value file.

    Keys: q, k0, omega, hbar, eta2, grid, rho, nu (rho[] and nu[] are accepted too).
    Arrays are comma separated lists or start:stop:count ranges.
    """
    if not os.path.isfile(path):
        raise PathConfigError(f"Path config file {path} does not exist")
    raw = dotenv_values(path)
    values: Dict[str, ArrayLike] = {}
    for key, text in raw.items():
        if text is None:
            continue
        name = key.strip().rstrip("[]")
        if name not in PathConfig.model_fields:
            raise PathConfigError(f"Unknown path config key '{key}'")
        values[name] = _parse_array(name, text)
    for required in ("q", "grid", "rho"):
        if required not in values:
            raise PathConfigError(f"Path config {path} is missing '{required}'")
    grid = values["grid"]
    if not isinstance(grid, list):
        values["grid"] = [grid]
    return PathConfig(**values)
