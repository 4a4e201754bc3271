"""Stabilizable entanglement of two-mode Gaussian states under engineered dissipation."""

__version__ = "0.1.0"

from .lindblad_engine import (
    EvolutionConfig,
    LindbladSpec,
    QuadraticHamiltonian,
    evolve_covariance,
    steady_state,
)
from .measures import linear_entropy, log_negativity
from .stabilizability import is_stabilizable, reconstruct_hamiltonian
from .symplectic_core import (
    CovarianceMatrix,
    StandardForm,
    build_from_standard_form,
    check_physical,
    symplectic_eigenvalues,
    to_standard_form,
)

__all__ = [
    "CovarianceMatrix",
    "EvolutionConfig",
    "LindbladSpec",
    "QuadraticHamiltonian",
    "StandardForm",
    "build_from_standard_form",
    "check_physical",
    "evolve_covariance",
    "is_stabilizable",
    "linear_entropy",
    "log_negativity",
    "reconstruct_hamiltonian",
    "steady_state",
    "symplectic_eigenvalues",
    "to_standard_form",
]
