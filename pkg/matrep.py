"""
Finite matrix representations of the q-oscillator and the q-plane.

FockRep truncates the Fock space to n = 0..dim-1:
    b|n> = sqrt(eta2 [n]) |n-1>,  b+|n> = sqrt(eta2 [n+1]) |n+1>,  K|n> = q^{-2n}|n>
WeylRep is the l2 window k = -M..M of
    z|k> = q^{-(k+1/2)} |k+1>,  zb|k> = q^{-(k-1/2)} |k-1>
Relation checks exclude the truncation boundary: the last Fock level and the
outer two window sites.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import eigh, expm

from ncalg import OSCILLATOR_ALPHABET, K_INVERSE_LETTER, K_LETTER, NCPoly, Word
from qarith import QAlgebraError

logger = logging.getLogger(__name__)

WEYL_BOUNDARY_SITES = 2


class RepresentationError(QAlgebraError):
    """Exception raised for invalid representation parameters."""
    pass


def q_number_numeric(n, q: float):
    """[n; q^2] = 1 + q^2 + ... + q^{2(n-1)} for integer n >= 0 (scalar or array)."""
    n = np.asarray(n)
    if q == 1.0:
        return n.astype(float)
    return (q ** (2 * n) - 1.0) / (q**2 - 1.0)


def q_factorial_numeric(n: int, q: float) -> float:
    return float(np.prod([q_number_numeric(k, q) for k in range(1, n + 1)]))


def _relative(residual: np.ndarray, *operators: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(op))) for op in operators)
    return float(np.max(np.abs(residual))) / max(scale, 1.0)


# =====================
# Truncated Fock representation
# =====================


@dataclass(frozen=True)
class FockRep:
    dim: int
    q: float
    eta2: float
    b: np.ndarray = field(repr=False)
    bd: np.ndarray = field(repr=False)
    K: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, dim: int, q: float, eta2: float = 1.0) -> "FockRep":
        if dim < 2:
            raise RepresentationError(f"Fock truncation needs dim >= 2, got {dim}")
        if q <= 0 or eta2 <= 0:
            raise RepresentationError("q and eta2 must be positive")
        levels = np.arange(dim)
        b = np.diag(np.sqrt(eta2 * q_number_numeric(levels[1:], q)), 1)
        K = np.diag(q ** (-2.0 * levels))
        return cls(dim, q, eta2, b, b.T.copy(), K)

    def k_power(self, p: int) -> np.ndarray:
        return np.diag(np.diag(self.K) ** p)

    def letter(self, name: str) -> np.ndarray:
        if name == K_LETTER:
            return self.K
        if name == K_INVERSE_LETTER:
            return self.k_power(-1)
        if name == "b":
            return self.b
        if name == "bd":
            return self.bd
        raise RepresentationError(f"Generator '{name}' has no Fock matrix")


def fock_relation_residual(rep: FockRep) -> np.ndarray:
    """b b+ - q^2 b+ b - eta2; nonzero only at the (dim-1, dim-1) corner."""
    return rep.b @ rep.bd - rep.q**2 * rep.bd @ rep.b - rep.eta2 * np.eye(rep.dim)


def fock_corner_value(rep: FockRep) -> float:
    """Closed form of the corner entry: -eta2 [dim; q^2]."""
    return -rep.eta2 * float(q_number_numeric(rep.dim, rep.q))


def fock_number_identity(rep: FockRep) -> float:
    """q^{2N} against 1 + (q^2 - 1) b+b / eta2, relative to the largest entry."""
    lhs = rep.k_power(-1)
    rhs = np.eye(rep.dim) + (rep.q**2 - 1.0) * rep.bd @ rep.b / rep.eta2
    return _relative(lhs - rhs, lhs)


def hamiltonian(rep: FockRep, omega: float) -> np.ndarray:
    """H = omega K b+ b."""
    return omega * rep.K @ rep.bd @ rep.b


def energy_closed_form(n, q: float, eta2: float, omega: float):
    """E_n = (omega eta2 / q^2)[n; q^-2] = omega eta2 q^{-2n} [n; q^2]."""
    n = np.asarray(n)
    return omega * eta2 * q ** (-2.0 * n) * q_number_numeric(n, q)


@dataclass
class Spectrum:
    indices: List[int]
    eigenvalues: List[float]
    params: Dict[str, float]

    def expected(self) -> List[float]:
        p = self.params
        return [float(v) for v in energy_closed_form(np.array(self.indices), p["q"], p["eta2"], p["omega"])]

    def max_deviation(self) -> float:
        return float(np.max(np.abs(np.array(self.eigenvalues) - np.array(self.expected()))))

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"n": n, "eigenvalue": e, "closed_form": c}
            for n, e, c in zip(self.indices, self.eigenvalues, self.expected())
        ]


def hamiltonian_spectrum(rep: FockRep, omega: float = 1.0) -> Spectrum:
    """Eigenvalues of omega K b+ b labelled by the Fock level their eigenvector sits on."""
    H = hamiltonian(rep, omega)
    if not np.allclose(H, H.conj().T):
        raise RepresentationError("Hamiltonian is not Hermitian")
    values, vectors = eigh(H)
    labels = np.argmax(np.abs(vectors), axis=0)
    order = np.argsort(labels)
    return Spectrum(
        indices=[int(labels[i]) for i in order],
        eigenvalues=[float(values[i]) for i in order],
        params={"q": rep.q, "eta2": rep.eta2, "omega": omega, "dim": rep.dim},
    )


def evolution_operator(rep: FockRep, omega: float, hbar: float, t: float) -> np.ndarray:
    """exp(-i H t / hbar) through the eigendecomposition of H."""
    values, vectors = eigh(hamiltonian(rep, omega))
    phases = np.exp(-1j * values * t / hbar)
    return (vectors * phases) @ vectors.conj().T


@dataclass(frozen=True)
class EvolutionResidual:
    """Max-norm of the evolution defect, absolute and divided by max(1, max |X|)."""

    absolute: float
    relative: float


def heisenberg_evolution_check(
    rep: FockRep, omega: float = 1.0, hbar: float = 1.0, t: float = 0.0, operator: str = "b"
) -> EvolutionResidual:
    """
    Max-norm of e^{iHt/hbar} X e^{-iHt/hbar} minus the closed-form solution:

        b(t) = b exp(-i eta2 omega K t / hbar),  b+(t) = exp(i eta2 omega K t / hbar) b+

    The entries of X grow like q^n, so tolerances are applied to the relative value.
    """
    if operator not in ("b", "bd"):
        raise RepresentationError(f"Evolution is checked for 'b' or 'bd', got '{operator}'")
    U = evolution_operator(rep, omega, hbar, t)
    X = rep.letter(operator)
    evolved = U.conj().T @ X @ U
    phase = np.diag(np.exp(-1j * rep.eta2 * omega * np.diag(rep.K) * t / hbar))
    expected = X @ phase if operator == "b" else phase.conj() @ X
    defect = evolved - expected
    return EvolutionResidual(float(np.max(np.abs(defect))), _relative(defect, X))


# =====================
# Symbolic polynomials as matrices
# =====================


def _coefficient_value(coeff, rep: FockRep, params: Dict[str, float]):
    return coeff.evaluate(rep.q, eta2=rep.eta2, **params)


def evaluate_poly(rep: FockRep, x: NCPoly, **params: float) -> np.ndarray:
    """Matrix of a normal-ordered oscillator polynomial."""
    if x.alphabet != OSCILLATOR_ALPHABET:
        raise RepresentationError("Only oscillator polynomials have Fock matrices")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for monomial, coeff in x.terms():
        r, s = monomial.exps
        matrix = (
            rep.k_power(monomial.k_power)
            @ np.linalg.matrix_power(rep.bd, r)
            @ np.linalg.matrix_power(rep.b, s)
        )
        out += _coefficient_value(coeff, rep, params) * matrix
    return out


def word_matrix(rep: FockRep, word: Word, **params: float) -> np.ndarray:
    """Direct product of the letter matrices, in the order written."""
    out = np.eye(rep.dim, dtype=complex) * _coefficient_value(word.coefficient, rep, params)
    for letter in word.letters:
        out = out @ rep.letter(letter)
    return out


def interior_mask(dim: int, margin: int) -> np.ndarray:
    """Entries (m, n) with max(m, n) < dim - margin, untouched by truncation."""
    levels = np.arange(dim)
    keep = levels < dim - margin
    return np.outer(keep, keep)


# =====================
# l2 window of the q-plane
# =====================


@dataclass(frozen=True)
class WeylRep:
    window: int
    q: float
    z: np.ndarray = field(repr=False)
    zb: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, window: int, q: float) -> "WeylRep":
        if window < 2:
            raise RepresentationError(f"Weyl window needs M >= 2, got {window}")
        if q <= 1:
            raise RepresentationError(f"The l2 representation is built for q > 1, got {q}")
        k = np.arange(-window, window + 1, dtype=float)
        z = np.diag(q ** -(k[:-1] + 0.5), -1)
        zb = np.diag(q ** -(k[1:] - 0.5), 1)
        return cls(window, q, z, zb)

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.window, self.window + 1)

    def interior(self) -> slice:
        return slice(WEYL_BOUNDARY_SITES, 2 * self.window + 1 - WEYL_BOUNDARY_SITES)


def weyl_relation_check(rep: WeylRep) -> float:
    """max over interior sites of |z zb - q^2 zb z|."""
    residual = np.diag(rep.z @ rep.zb - rep.q**2 * rep.zb @ rep.z)
    return float(np.max(np.abs(residual[rep.interior()])))


def weyl_diagonal_law(rep: WeylRep) -> float:
    """Relative deviation of (zb z)_kk from q^{-(2k+1)} over the interior."""
    diagonal = np.diag(rep.zb @ rep.z)
    expected = rep.q ** -(2.0 * rep.sites + 1)
    window = rep.interior()
    return float(np.max(np.abs(diagonal[window] - expected[window]) / expected[window]))


def ladder_eigenvalue(n: int, k, q: float):
    """(z^n zb^n)_kk = q^{n^2 - 2nk}."""
    return q ** (n * n - 2.0 * n * np.asarray(k))


def trace_weight(lam, q: float, tol: float = 1e-17):
    """
    1/e_{q^2}(lam) = e_{1/q^2}(-lam) for q > 1, as exp(-sum_j log1p((1-p) p^j lam)), p = q^-2.
    """
    p = q**-2
    lam = np.asarray(lam, dtype=float)
    scale = max(float(np.max(lam)) * (1 - p), tol)
    count = max(1, int(math.ceil(math.log(tol / scale) / math.log(p))) + 1)
    logs = np.log1p((1 - p) * np.multiply.outer(lam, p ** np.arange(count)))
    return np.exp(-logs.sum(axis=-1))


def windowed_trace(n: int, window: int, q: float) -> float:
    """T_n(M) = sum_{k=-M..M} w(q^{-(2k+1)}) q^{n^2-2nk}."""
    k = np.arange(-window, window + 1, dtype=float)
    return float(np.sum(trace_weight(q ** -(2 * k + 1), q) * ladder_eigenvalue(n, k, q)))


@dataclass
class TraceRow:
    n: int
    window: int
    trace: float
    stabilization: float
    ratio: float
    moment_ratio: float
    ladder_deviation: float


def trace_qintegral_report(q: float, n_max: int, windows: Sequence[int], step: int = 5) -> List[TraceRow]:
    """
    Windowed traces of w(zb z) z^n zb^n for n = 1..n_max.

    stabilization = |T_n(M) - T_n(M-step)| / |T_n(M)|; ratio = T_n/T_1 is set
    beside [n]!/[1]! without asserting agreement.
    """
    if q <= 1:
        raise RepresentationError(f"The trace report needs q > 1, got {q}")
    if n_max < 1:
        raise RepresentationError("n_max must be at least 1; the n = 0 trace diverges")
    rows = []
    for window in windows:
        if window - step < 2:
            raise RepresentationError(f"window {window} leaves no room for the step {step}")
        rep = WeylRep.build(window, q)
        base = windowed_trace(1, window, q)
        for n in range(1, n_max + 1):
            current = windowed_trace(n, window, q)
            previous = windowed_trace(n, window - step, q)
            ladder = np.diag(
                np.linalg.matrix_power(rep.z, n) @ np.linalg.matrix_power(rep.zb, n)
            )
            sites = rep.sites
            keep = sites >= -window + n
            expected = ladder_eigenvalue(n, sites[keep], q)
            rows.append(TraceRow(
                n=n,
                window=window,
                trace=current,
                stabilization=abs(current - previous) / abs(current),
                ratio=current / base,
                moment_ratio=q_factorial_numeric(n, q),
                ladder_deviation=float(np.max(np.abs(ladder[keep] - expected) / expected)),
            ))
    logger.debug("trace report: %d rows for q=%s", len(rows), q)
    return rows


# =====================
# Weyl form of the commutation relation
# =====================


def weyl_form_bch_check(dim: int, kappa: float, hbar: float = 1.0, block: Optional[int] = None) -> float:
    """
    With [a, a+] = hbar, Z = exp(sqrt(kappa) a) and Zb = exp(sqrt(kappa) a+) satisfy
    Z Zb = e^{kappa hbar} Zb Z. Returns the max residual on the top-left block.
    """
    if dim < 2:
        raise RepresentationError(f"Fock truncation needs dim >= 2, got {dim}")
    if kappa < 0 or hbar <= 0:
        raise RepresentationError("kappa must be nonnegative and hbar positive")
    block = dim // 2 if block is None else block
    if block < 1 or block > dim:
        raise RepresentationError(f"block must lie in 1..{dim}, got {block}")
    a = np.diag(np.sqrt(hbar * np.arange(1, dim)), 1)
    alpha = math.sqrt(kappa)
    Z = expm(alpha * a)
    Zb = expm(alpha * a.T)
    residual = Z @ Zb - math.exp(kappa * hbar) * Zb @ Z
    return float(np.max(np.abs(residual[:block, :block])))
