"""Entanglement and mixedness of two-mode Gaussian states (natural log)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .symplectic_core import (
    CovarianceMatrix,
    InvalidArgument,
    check_physical,
    local_invariants,
    partial_transpose_spectrum,
    symplectic_eigenvalues,
)


class UnphysicalState(ValueError):
    """Measures are undefined for states violating the uncertainty relation."""


@dataclass(frozen=True)
class MeasureReport:
    log_negativity: float
    linear_entropy: float
    purity: float
    renyi: dict[float, float] = field(default_factory=dict)


def _require_physical(v: CovarianceMatrix) -> None:
    report = check_physical(v)
    if not report.physical:
        raise UnphysicalState(f"unphysical covariance matrix (h1={report.h1:.3e}, h2={report.h2:.3e})")


def log_negativity(v: CovarianceMatrix) -> float:
    _require_physical(v)
    nu = partial_transpose_spectrum(v).nu_minus
    return max(0.0, -math.log(2.0 * nu))


def _g(p: float, x: float) -> float:
    # 2^p / ((x+1)^p - (x-1)^p), rescaled to stay finite for large x
    return 1.0 / (((x + 1.0) / 2.0) ** p - ((x - 1.0) / 2.0) ** p)


def trace_power(v: CovarianceMatrix, p: float) -> float:
    """tr rho^p for p > 1."""
    if not p > 1:
        raise InvalidArgument(f"trace power needs p > 1, got {p}")
    _require_physical(v)
    spec = symplectic_eigenvalues(v)
    return _g(p, 2.0 * spec.nu_plus) * _g(p, 2.0 * spec.nu_minus)


def linear_entropy(v: CovarianceMatrix) -> float:
    """1 - 1/(4 nu+ nu-), using nu+ nu- = sqrt(det V)."""
    _require_physical(v)
    det_v = local_invariants(v)[3]
    # pure states can land a few ulp below zero
    return max(0.0, 1.0 - 1.0 / (4.0 * math.sqrt(det_v)))


def purity(v: CovarianceMatrix) -> float:
    return 1.0 - linear_entropy(v)


def renyi_entropy(v: CovarianceMatrix, p: float) -> float:
    """ln(tr rho^p) / (1 - p).

    Tsallis entropies follow from :func:`trace_power` as
    ``(1 - tr rho^p) / (p - 1)`` and are not wrapped separately.
    """
    return max(0.0, math.log(trace_power(v, p)) / (1.0 - p))


def measure_report(v: CovarianceMatrix, renyi_orders=()) -> MeasureReport:
    s_l = linear_entropy(v)
    return MeasureReport(
        log_negativity=log_negativity(v),
        linear_entropy=s_l,
        purity=1.0 - s_l,
        renyi={float(p): renyi_entropy(v, p) for p in renyi_orders},
    )


def is_entangled(v: CovarianceMatrix) -> bool:
    return partial_transpose_spectrum(v).nu_minus < 0.5
