"""Hamiltonian-independent stabilizability conditions for covariance matrices.

The k-th condition is

    2 tr(I_C J Vt^k) + tr(R_C J Vt^(k-1)) = 0,   Vt = J V,

for k = 1..4.  Odd k vanish identically; only k = 2 and k = 4 constrain the
state.  A state passing them is then checked constructively by solving the
stationarity equation for a symmetric Hamiltonian matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lindblad_engine import (
    LindbladSpec,
    QuadraticHamiltonian,
    covariance_rhs,
    diffusion_matrix,
    drift_matrix,
    sym_to_vec,
    symmetric_basis,
)
from .symplectic_core import J, CovarianceMatrix, InvalidArgument

DEFAULT_TOL = 1e-9


def _terms(v, d: LindbladSpec, k: int) -> tuple[float, float]:
    if k not in (1, 2, 3, 4):
        raise InvalidArgument(f"condition index must be in 1..4, got {k}")
    vt = J @ np.asarray(v, dtype=float)
    imag_term = 2.0 * np.trace(d.i_c @ J @ np.linalg.matrix_power(vt, k))
    real_term = np.trace(d.r_c @ J @ np.linalg.matrix_power(vt, k - 1))
    return float(imag_term), float(real_term)


def condition_residual(v, d: LindbladSpec, k: int) -> float:
    imag_term, real_term = _terms(v, d, k)
    return imag_term + real_term


def condition_scale(v, d: LindbladSpec, k: int) -> float:
    """Largest magnitude among the two traces; residuals are judged against it."""
    return max(abs(t) for t in _terms(v, d, k))


@dataclass(frozen=True)
class StabilizabilityReport:
    residuals: tuple[float, float, float, float]
    scales: tuple[float, float, float, float]
    stabilizable: bool
    tolerance: float

    @property
    def g1(self) -> float:
        return self.residuals[1]

    @property
    def g2(self) -> float:
        return self.residuals[3]

    def relative(self, k: int) -> float:
        scale = self.scales[k - 1]
        return abs(self.residuals[k - 1]) / scale if scale > 0 else 0.0


def is_stabilizable(v, d: LindbladSpec, tol: float = DEFAULT_TOL) -> StabilizabilityReport:
    terms = [_terms(v, d, k) for k in (1, 2, 3, 4)]
    residuals = tuple(t[0] + t[1] for t in terms)
    scales = tuple(max(abs(t[0]), abs(t[1])) for t in terms)
    ok = all(abs(residuals[k]) <= tol * scales[k] for k in (1, 3))
    return StabilizabilityReport(residuals, scales, ok, tol)


@dataclass(frozen=True)
class ReconstructionResult:
    g: QuadraticHamiltonian
    residual: float
    solvable: bool


def stationarity_system(v, d: LindbladSpec) -> tuple[np.ndarray, np.ndarray]:
    """Linear system M x = y for the 10 entries of G making v stationary."""
    m = np.asarray(v, dtype=float)
    cols = []
    for e in symmetric_basis():
        je = J @ e
        cols.append(sym_to_vec(je @ m + m @ je.T))
    a0 = drift_matrix(QuadraticHamiltonian.zero(), d)
    rhs = -sym_to_vec(covariance_rhs(m, a0, diffusion_matrix(d)))
    return np.column_stack(cols), rhs


def reconstruct_hamiltonian(v, d: LindbladSpec, tol: float = DEFAULT_TOL) -> ReconstructionResult:
    """Minimum-norm symmetric G with J(G + I_C) V + V (.)^T + J R_C J^T = 0.

    The stationarity equation is linear in G; the least-squares solution is
    returned with the max-norm of the remaining right-hand side.
    """
    m_sys, rhs = stationarity_system(v, d)
    x, *_ = np.linalg.lstsq(m_sys, rhs, rcond=1e-12)
    g = np.zeros((4, 4))
    for coeff, e in zip(x, symmetric_basis()):
        g += coeff * e
    ham = QuadraticHamiltonian(g)
    m = np.asarray(v, dtype=float)
    residual = float(np.max(np.abs(covariance_rhs(m, drift_matrix(ham, d), diffusion_matrix(d)))))
    return ReconstructionResult(ham, residual, residual < tol)
