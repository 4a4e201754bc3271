"""Covariance-matrix dynamics under quadratic Hamiltonians and linear Lindblad operators.

The covariance obeys dV/dt = A V + V A^T + J R_C J^T with drift
A = J (G + I_C), where I_C = Im(C^dag C), R_C = Re(C^dag C) and the rows of C
are the coefficient vectors of L_k = c_k . xi.  G is the Hessian of the
Hamiltonian, H = xi^T G xi / 2, which is the normalization that makes the
drift above exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .symplectic_core import EXACT_TOL, J, CovarianceMatrix, InvalidArgument

# row/column pairs of the 10 independent entries of a symmetric 4x4 matrix
SYM_INDEX = [(i, j) for i in range(4) for j in range(i, 4)]


class DivergenceError(ArithmeticError):
    def __init__(self, message: str, steps_completed: int):
        super().__init__(message)
        self.steps_completed = steps_completed


@dataclass(frozen=True)
class LindbladSpec:
    coefficient_vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        vecs = np.array(self.coefficient_vectors, dtype=complex)
        if vecs.size == 0:
            vecs = np.zeros((0, 4), dtype=complex)
        vecs = np.atleast_2d(vecs)
        if vecs.shape[1] != 4:
            raise InvalidArgument(f"coefficient vectors must have length 4, got shape {vecs.shape}")
        if not np.all(np.isfinite(vecs)):
            raise InvalidArgument("non-finite Lindblad coefficients")
        vecs.flags.writeable = False
        object.__setattr__(self, "coefficient_vectors", vecs)

    @property
    def c(self) -> np.ndarray:
        return self.coefficient_vectors

    @property
    def gram(self) -> np.ndarray:
        """C^dag C."""
        return self.c.conj().T @ self.c

    @property
    def i_c(self) -> np.ndarray:
        return self.gram.imag

    @property
    def r_c(self) -> np.ndarray:
        return self.gram.real

    def __add__(self, other: "LindbladSpec") -> "LindbladSpec":
        return LindbladSpec(np.vstack([self.c, other.c]))

    def scaled(self, s: float) -> "LindbladSpec":
        """Every rate multiplied by s (vectors by sqrt(s))."""
        return LindbladSpec(np.sqrt(s) * self.c)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.shape != (4, 4):
            raise InvalidArgument(f"Hamiltonian matrix must be 4x4, got {g.shape}")
        if np.max(np.abs(g - g.T), initial=0.0) > EXACT_TOL * max(1.0, np.max(np.abs(g))):
            raise InvalidArgument("Hamiltonian matrix is not symmetric")
        g = 0.5 * (g + g.T)
        g.flags.writeable = False
        object.__setattr__(self, "g", g)

    @classmethod
    def zero(cls) -> "QuadraticHamiltonian":
        return cls(np.zeros((4, 4)))


@dataclass(frozen=True)
class EvolutionConfig:
    step: float
    horizon: float
    method: str = "rk4"

    def __post_init__(self):
        if not (self.step > 0 and self.horizon > 0):
            raise InvalidArgument("step and horizon must be positive")
        if self.step > self.horizon:
            raise InvalidArgument("step must not exceed horizon")
        if self.method != "rk4":
            raise InvalidArgument(f"unknown integration method {self.method!r}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.step)))


def drift_matrix(h: QuadraticHamiltonian, d: LindbladSpec) -> np.ndarray:
    return J @ (h.g + d.i_c)


def diffusion_matrix(d: LindbladSpec) -> np.ndarray:
    return J @ d.r_c @ J.T


def covariance_rhs(v: np.ndarray, a: np.ndarray, q: np.ndarray) -> np.ndarray:
    return a @ v + v @ a.T + q


def fixed_point_residual(v, h: QuadraticHamiltonian, d: LindbladSpec) -> float:
    """Max-norm of dV/dt at v."""
    m = np.asarray(v, dtype=float)
    return float(np.max(np.abs(covariance_rhs(m, drift_matrix(h, d), diffusion_matrix(d)))))


def evolve_trajectory(v0: CovarianceMatrix, h: QuadraticHamiltonian, d: LindbladSpec,
                      cfg: EvolutionConfig, every: int = 1):
    """Yield (t, V) pairs, starting with t = 0 and then every ``every`` steps.

    Uses classical RK4 on the full matrix with symmetrization after each step.
    Raises :class:`DivergenceError` once an entry exceeds 1e12.
    """
    a = drift_matrix(h, d)
    q = diffusion_matrix(d)
    dt = cfg.horizon / cfg.n_steps
    v = np.array(v0.entries)
    yield 0.0, v.copy()
    for n in range(1, cfg.n_steps + 1):
        k1 = covariance_rhs(v, a, q)
        k2 = covariance_rhs(v + 0.5 * dt * k1, a, q)
        k3 = covariance_rhs(v + 0.5 * dt * k2, a, q)
        k4 = covariance_rhs(v + dt * k3, a, q)
        v = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v = 0.5 * (v + v.T)
        if not np.all(np.isfinite(v)) or np.max(np.abs(v)) > 1e12:
            raise DivergenceError(f"covariance diverged at t={n * dt:g}", n - 1)
        if n % every == 0 or n == cfg.n_steps:
            yield n * dt, v.copy()


def evolve_covariance(v0: CovarianceMatrix, h: QuadraticHamiltonian, d: LindbladSpec,
                      cfg: EvolutionConfig) -> CovarianceMatrix:
    for _, v in evolve_trajectory(v0, h, d, cfg, every=cfg.n_steps):
        pass
    return CovarianceMatrix(v)


def symmetric_basis() -> list[np.ndarray]:
    basis = []
    for i, j in SYM_INDEX:
        e = np.zeros((4, 4))
        e[i, j] = e[j, i] = 1.0
        basis.append(e)
    return basis


def sym_to_vec(m: np.ndarray) -> np.ndarray:
    return np.array([m[i, j] for i, j in SYM_INDEX])


def vec_to_sym(x: Sequence[float]) -> np.ndarray:
    m = np.zeros((4, 4))
    for (i, j), val in zip(SYM_INDEX, x):
        m[i, j] = m[j, i] = val
    return m


def lyapunov_operator(a: np.ndarray) -> np.ndarray:
    """10x10 matrix of X -> A X + X A^T restricted to symmetric X."""
    return np.column_stack([sym_to_vec(a @ e + e @ a.T) for e in symmetric_basis()])


@dataclass(frozen=True)
class SteadyState:
    covariance: Optional[CovarianceMatrix]
    null_dim: int
    residual: float
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def unique(self) -> bool:
        return self.covariance is not None


def steady_state(h: QuadraticHamiltonian, d: LindbladSpec, tol: float = 1e-10) -> SteadyState:
    """Solve A V + V A^T = -J R_C J^T over symmetric V.

    ``covariance`` is None when some lambda_i + lambda_j of the drift is
    within ``tol`` of zero (no unique solution), or when the unique solution
    is not positive definite.  ``null_dim`` counts the dimension of the
    homogeneous solution space in that case.
    """
    a = drift_matrix(h, d)
    q = diffusion_matrix(d)
    lam = np.linalg.eigvals(a)
    pair_sums = np.abs(lam[:, None] + lam[None, :])
    op = lyapunov_operator(a)
    sv = np.linalg.svd(op, compute_uv=False)
    null_dim = int(np.sum(sv <= tol * max(1.0, sv[0])))
    if np.min(pair_sums) <= tol or null_dim > 0:
        return SteadyState(None, max(null_dim, 1), float("nan"), lam)
    x = np.linalg.solve(op, -sym_to_vec(q))
    v = vec_to_sym(x)
    residual = float(np.max(np.abs(covariance_rhs(v, a, q))))
    try:
        cov = CovarianceMatrix(v)
    except InvalidArgument:
        cov = None
    return SteadyState(cov, 0, residual, lam)
