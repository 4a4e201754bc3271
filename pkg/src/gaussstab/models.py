"""The three benchmark dissipators and their stabilizable manifolds.

Annihilation operators are a_k = (x_k + i p_k) / sqrt(2) throughout.  Each
manifold function returns a :class:`StabilizableSolution` whose measures are
computed from the constructed covariance matrix; the ``*_closed_form``
helpers evaluate the analytic expressions directly so the two routes can be
compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lindblad_engine import LindbladSpec, QuadraticHamiltonian
from .measures import linear_entropy, log_negativity
from .stabilizability import is_stabilizable
from .symplectic_core import (
    EXACT_TOL,
    CovarianceMatrix,
    InvalidArgument,
    StandardForm,
    _squeezed,
    build_matrix,
    check_physical,
    partial_transpose_spectrum,
)

LN2 = math.log(2.0)
BOUNDARY_TOL = 1e-12
BRANCH_TOL = 1e-8

# quadrature coefficients of a_1, a_1^dag, a_2, a_2^dag
_A1 = np.array([1.0, 1.0j, 0.0, 0.0]) / math.sqrt(2.0)
_A2 = np.array([0.0, 0.0, 1.0, 1.0j]) / math.sqrt(2.0)
_A1D = _A1.conj()
_A2D = _A2.conj()


class InfeasiblePoint(ValueError):
    """Parameters outside the region where a manifold point exists."""


@dataclass(frozen=True)
class LocalDampingParams:
    gamma1: float = 1.0
    gamma2: float = 1.0
    x0: float = 1.0

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0 or self.gamma1 + self.gamma2 <= 0:
            raise InvalidArgument("need gamma1, gamma2 >= 0 with gamma1 + gamma2 > 0")
        if not self.x0 > 0:
            raise InvalidArgument("x0 must be positive")

    @property
    def chi(self) -> float:
        return 0.5 * (self.x0**-2 + self.x0**2)

    @property
    def gamma(self) -> float:
        """Ratio of the weaker to the stronger rate."""
        lo, hi = sorted((self.gamma1, self.gamma2))
        return lo / hi

    @classmethod
    def from_chi(cls, chi: float, gamma: float = 1.0, gamma1: float = 1.0,
                 branch: int = 1) -> "LocalDampingParams":
        """Rates (gamma1, gamma * gamma1) with x0 solving (x0^-2 + x0^2)/2 = chi.

        ``branch=+1`` picks x0 >= 1, ``-1`` its reciprocal.
        """
        return cls(gamma1, gamma * gamma1, x0_from_chi(chi, branch))


@dataclass(frozen=True)
class SqueezedDissipatorParams:
    alpha: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.eta < 0:
            raise InvalidArgument("alpha and eta must be non-negative")


@dataclass(frozen=True)
class CascadedParams:
    kappa: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidArgument("kappa must be positive")


@dataclass(frozen=True)
class StabilizableSolution:
    standard_form: StandardForm
    log_negativity: float
    linear_entropy: float
    physical: bool
    entangled: bool

    @property
    def matrix(self) -> np.ndarray:
        return build_matrix(self.standard_form)

    @property
    def covariance(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.matrix)

    def as_dict(self) -> dict:
        sf = self.standard_form
        return {
            "a": sf.a,
            "b": sf.b,
            "c_plus": sf.c_plus,
            "c_minus": sf.c_minus,
            "log_negativity": self.log_negativity,
            "linear_entropy": self.linear_entropy,
            "physical": self.physical,
            "entangled": self.entangled,
        }


def solution_from_standard_form(sf: StandardForm) -> StabilizableSolution:
    """Attach physicality and measures to a standard form."""
    m = build_matrix(sf)
    if not check_physical(m).physical:
        return StabilizableSolution(sf, math.nan, math.nan, False, False)
    v = CovarianceMatrix(m)
    e_n = log_negativity(v)
    return StabilizableSolution(
        sf, e_n, linear_entropy(v), True, partial_transpose_spectrum(v).nu_minus < 0.5
    )


def _plausibly_physical(sf: StandardForm, slack: float = 1e-9) -> bool:
    """Cheap scalar screen; the full check runs on survivors."""
    ab = sf.a * sf.b
    if sf.a <= 0 or sf.b <= 0:
        return False
    if ab - sf.c_plus**2 < -slack * ab or ab - sf.c_minus**2 < -slack * ab:
        return False
    delta, det = sf.delta, sf.det
    scale = max(1.0, 16 * abs(det), 4 * abs(delta))
    return 4 * delta - 16 * det - 1 <= slack * scale and 2 - 4 * delta <= slack * scale


def x0_from_chi(chi: float, branch: int = 1) -> float:
    if chi < 1.0 - EXACT_TOL:
        raise InvalidArgument(f"chi must be >= 1, got {chi}")
    chi = max(chi, 1.0)
    s = chi + branch * math.sqrt(chi * chi - 1.0)
    return math.sqrt(s)


# ---------------------------------------------------------------- local damping


def local_damping_spec(p: LocalDampingParams) -> LindbladSpec:
    x0 = p.x0
    return LindbladSpec(
        [
            math.sqrt(p.gamma1 / 2.0) * np.array([1.0 / x0, 1j * x0, 0.0, 0.0]),
            math.sqrt(p.gamma2 / 2.0) * np.array([0.0, 0.0, 1.0 / x0, 1j * x0]),
        ]
    )


def damping_conditions(sf: StandardForm, p: LocalDampingParams) -> tuple[float, float]:
    """Hand-reduced (g1, g2) for local damping.

    g2 is the form reduced with g1 = 0, so it only matches the trace
    condition on the g1 = 0 surface.  Signs follow the literal closed form,
    which is the negative of the trace-condition residual.
    """
    a, b, cp, cm = sf.as_tuple()
    g1r, g2r, x0 = p.gamma1, p.gamma2, p.x0
    chi2 = x0**-2 + x0**2
    g1 = (
        0.5 * g1r * (chi2 * a - 4 * a * a)
        + 0.5 * g2r * (chi2 * b - 4 * b * b)
        - 2 * (g1r + g2r) * cp * cm
    )
    g2 = -2 * (g1r + g2r) * (a * b - cp * cp) * (a * b - cm * cm) + 0.5 * (g2r * a + g1r * b) * (
        chi2 * a * b - (x0**-2 * cp * cp + x0**2 * cm * cm)
    )
    return g1, g2


def symmetric_occupations(r: float, chi: float, gamma: float) -> tuple[float, float]:
    """(nu_-, nu_+) of the stabilizable c+ = -c- family, stronger damping on mode 1."""
    ch2 = math.cosh(2.0 * r)
    den_minus = 1.0 + gamma + (1.0 - gamma) * ch2
    den_plus = 1.0 + gamma - (1.0 - gamma) * ch2
    if den_plus <= 0 or den_minus <= 0:
        raise InfeasiblePoint(f"pole in nu_+ at r={r}, gamma={gamma}")
    chr2, shr2 = math.cosh(r) ** 2, math.sinh(r) ** 2
    nu_minus = chi * (chr2 + gamma * shr2) / den_minus
    nu_plus = chi * (gamma * chr2 + shr2) / den_plus
    return nu_minus, nu_plus


def damping_symmetric_manifold(r: float, chi: float, gamma: float = 1.0) -> StabilizableSolution:
    if chi < 1.0 or not 0.0 <= gamma <= 1.0:
        raise InvalidArgument("need chi >= 1 and gamma in [0, 1]")
    nu_minus, nu_plus = symmetric_occupations(r, chi, gamma)
    return solution_from_standard_form(_squeezed(nu_minus, nu_plus, r))


def damping_symmetric_closed_form(r: float, chi: float) -> tuple[float, float]:
    """(E_N, S_L) of the symmetric (gamma = 1) family."""
    e_n = math.log(2.0 / chi) - math.log1p(math.exp(-4.0 * r))
    s_l = 1.0 - (chi * math.cosh(2.0 * r)) ** -2
    return max(0.0, e_n), s_l


def damping_symmetric_entangled(r: float, chi: float) -> bool:
    """2r > artanh(chi - 1); never for chi >= 2."""
    if chi >= 2.0:
        return False
    return 2.0 * r > math.atanh(chi - 1.0)


def _q(chi: float) -> float:
    return math.sqrt(max(chi * chi - 1.0, 0.0))


def equal_occupation_correlations(a: float, chi: float) -> tuple[float, float]:
    """(c+, c-) of the non-trivial a = b branch."""
    qc = _q(chi) + chi
    num = a * (2 * a - chi) * (1 + 2 * (2 * a - chi) * qc)
    den = 8 * a * qc - 2
    if den == 0 or num / den <= 0:
        raise InfeasiblePoint(f"no real c+ on the a=b branch at a={a}, chi={chi}")
    c_plus = math.sqrt(num / den)
    return c_plus, a * (chi - 2 * a) / (2 * c_plus)


def equal_occupation_threshold(chi: float) -> float:
    """Printed bound on a for the a = b branch.

    Above it the branch is entangled, but it is not tight: the closed-form
    negativity turns positive at much smaller a (for chi = 1, right above
    a = 1/2). The ``entangled`` flag of the solution is always computed from
    the state itself.
    """
    qc = _q(chi)
    s3 = math.sqrt(3.0)
    return (9 * chi + 4 * s3 * qc + math.sqrt(129 * chi * chi + 72 * s3 * chi * qc - 80)) / 8


def damping_equal_occupation_manifold(a: float, chi: float) -> StabilizableSolution:
    c_plus, c_minus = equal_occupation_correlations(a, chi)
    return solution_from_standard_form(StandardForm(a, a, c_plus, c_minus))


def equal_occupation_closed_form(a: float, chi: float) -> tuple[float, float]:
    """(E_N, S_L) on the a = b branch, E_N clipped at zero.

    The radicand X - Y of the printed form equals p^2 / (X + Y) identically,
    which avoids the cancellation between X and Y at large a.
    """
    if not 2 * a > chi:
        raise InfeasiblePoint(f"the a=b branch needs a > chi/2, got a={a}, chi={chi}")
    p = 2 * a * (4 * a - chi) / math.sqrt(16 * a * a - 8 * chi * a + 1)
    x = 2 * a * (4 * a - chi)
    y = 2 * p * math.sqrt(2 * a * (2 * a - chi))
    return max(0.0, 0.5 * math.log((x + y) / (p * p))), 1.0 - 1.0 / p


def general_damping_coefficients(a: float, b: float, p: LocalDampingParams):
    """Coefficients (A, B, C) of A t^2 + B t + C = 0 for t = c-^2, and K with c+ = K / c-.

    Obtained by eliminating c+ through g1 = 0 and clearing denominators in
    the k = 4 trace condition.
    """
    g1, g2, s = p.gamma1, p.gamma2, p.x0**2
    chi = p.chi
    tot = g1 + g2
    r2 = a * a + b * b
    k = (g1 * a * (chi - 2 * a) + g2 * b * (chi - 2 * b)) / (2 * tot)
    coef_a = s * (a * g2 + b * g1) - 4 * a * b * tot
    coef_b = (
        g1 * g1 * a * (chi - 2 * a) * (a * chi - 2 * r2)
        + 2 * g1 * g2 * a * b * (chi * chi + 8 * a * b - 3 * chi * (a + b))
        + g2 * g2 * b * (chi - 2 * b) * (b * chi - 2 * r2)
    ) / tot
    h = a * g2 + b * g1 - 4 * a * b * tot * s
    coef_c = (2 * tot * k) ** 2 * h / (4 * s * tot * tot)
    return coef_a, coef_b, coef_c, k


def damping_general_solution(a: float, b: float, p: LocalDampingParams,
                             tol: float = BRANCH_TOL) -> list[StabilizableSolution]:
    """All physical standard forms with the given (a, b) stabilizable under local damping.

    Both roots for c-^2 and both signs of c- are tried; candidates are kept
    when real, physical and passing the k = 2, 4 conditions at relative
    tolerance ``tol``.
    """
    coef_a, coef_b, coef_c, k = general_damping_coefficients(a, b, p)
    scale = max(abs(coef_a), abs(coef_b), abs(coef_c), 1e-300)
    if abs(coef_a) <= EXACT_TOL * scale:
        roots = [-coef_c / coef_b] if coef_b != 0 else []
    else:
        disc = coef_b * coef_b - 4 * coef_a * coef_c
        if disc < 0:
            if disc < -EXACT_TOL * coef_b * coef_b:
                return []
            disc = 0.0
        sq = math.sqrt(disc)
        roots = [(-coef_b + sq) / (2 * coef_a), (-coef_b - sq) / (2 * coef_a)]
    spec = local_damping_spec(p)
    out: list[StabilizableSolution] = []
    seen: list[tuple[float, float]] = []
    for t in roots:
        if not t > 0:
            continue
        for sign in (1.0, -1.0):
            c_minus = sign * math.sqrt(t)
            c_plus = k / c_minus
            if any(abs(c_plus - u) + abs(c_minus - w) < 1e-12 * (1 + abs(u)) for u, w in seen):
                continue
            sf = StandardForm(a, b, c_plus, c_minus)
            if not _plausibly_physical(sf):
                continue
            sol = solution_from_standard_form(sf)
            if not sol.physical:
                continue
            if not is_stabilizable(build_matrix(sf), spec, tol).stabilizable:
                continue
            seen.append((c_plus, c_minus))
            out.append(sol)
    return out


# ------------------------------------------------------- squeezed-state dissipator


def squeezed_dissipator_spec(p: SqueezedDissipatorParams) -> LindbladSpec:
    ch, sh = math.cosh(p.alpha), math.sinh(p.alpha)
    vectors = [ch * _A1 - sh * _A2D, ch * _A2 - sh * _A1D]
    spec = LindbladSpec(vectors)
    if p.eta > 0:
        spec = spec + local_damping_spec(LocalDampingParams(p.eta, p.eta, 1.0))
    return spec


def squeezed_occupation(r: float, alpha: float, eta: float = 0.0) -> float:
    """Common symplectic eigenvalue of the stabilizable c+ = -c- states.

    For eta > 0 this is the weighted mean of the two dissipators' targets,
    consistent with the perturbed log-negativity formula.
    """
    return (math.cosh(2 * (r - alpha)) + eta * math.cosh(2 * r)) / (2 * (1 + eta))


def squeezed_manifold(r: float, p: SqueezedDissipatorParams) -> StabilizableSolution:
    nu = squeezed_occupation(r, p.alpha, p.eta)
    return solution_from_standard_form(_squeezed(nu, nu, r))


def squeezed_closed_form(r: float, alpha: float, eta: float = 0.0) -> tuple[float, float]:
    """(E_N, S_L); E_N clipped at zero."""
    x = 2 * (r - alpha)
    # -ln(e^{-2r} cosh x) evaluated without overflow
    e_n = 2 * r - abs(x) - math.log1p(math.exp(-2 * abs(x))) + LN2
    if eta > 0:
        e_n -= math.log((1 + eta * math.cosh(2 * r) / math.cosh(x)) / (1 + eta))
        nu = squeezed_occupation(r, alpha, eta)
        s_l = 1 - 1 / (4 * nu * nu)
    else:
        s_l = math.tanh(x) ** 2
    return max(0.0, e_n), s_l


def squeezed_entangled(r: float, alpha: float) -> bool:
    return 4 * r > 2 * alpha - math.log(2 - math.exp(-2 * alpha))


# ------------------------------------------------------------ cascaded oscillators


def cascaded_spec(p: CascadedParams) -> LindbladSpec:
    return LindbladSpec([math.sqrt(p.kappa) * (_A1 + _A2)])


def c_plus_min(a: float) -> float:
    return math.sqrt((a - 1) * a + 0.5) - 0.5


def c_plus_max(a: float) -> float:
    return (a - 0.5 + math.sqrt(2 * a * (2 * a - 1) * (4 * a - 1) * (4 * a + 1))) / (8 * a - 1)


def c_plus_max_gap(a: float) -> float:
    """a - c+_max(a) without cancellation."""
    big = 8 * a * a - 2 * a + 0.5
    root = math.sqrt(2 * a * (2 * a - 1) * (4 * a - 1) * (4 * a + 1))
    return (8 * a - 1) / (4 * (big + root))


def c_plus_mid(a: float) -> float:
    return math.sqrt(a * (a - 0.5))


def cascaded_c_minus(a: float, c_plus: float) -> float:
    return -a + (a + c_plus) / (4 * a + 4 * c_plus - 1)


def cascaded_feasible(a: float, c_plus: float) -> bool:
    if a < 0.5 - BOUNDARY_TOL:
        return False
    lo, hi = c_plus_min(a), c_plus_max(a)
    if abs(c_plus - lo) <= BOUNDARY_TOL * max(1.0, a) and abs(c_plus - hi) <= BOUNDARY_TOL * max(1.0, a):
        return True
    return lo < c_plus <= hi + BOUNDARY_TOL * max(1.0, a)


def cascaded_manifold(a: float, c_plus: float) -> StabilizableSolution:
    if not cascaded_feasible(a, c_plus):
        raise InfeasiblePoint(f"c+={c_plus} outside ({c_plus_min(a)}, {c_plus_max(a)}] at a={a}")
    return solution_from_standard_form(StandardForm(a, a, c_plus, cascaded_c_minus(a, c_plus)))


def cascaded_closed_form(a: float, c_plus: float, gap: Optional[float] = None) -> tuple[float, float]:
    """(E_N, S_L) on the b = a branch.

    ``gap`` is a - c+ when the caller knows it more precisely than the
    difference of the two (see :func:`c_plus_max_gap`).
    """
    gap = a - c_plus if gap is None else gap
    den = 4 * a + 4 * c_plus - 1
    inner = 2 * math.sqrt(gap * (a + c_plus) / den)
    e_n = max(0.0, -math.log(inner)) if inner > 0 else math.inf
    o = c_plus * (8 * a - 1) + a * (8 * a - 3)
    s_l = 1 - den / (4 * (a + c_plus) * math.sqrt(gap * o))
    return e_n, s_l


# --------------------------------------------------------- reference Hamiltonians


def reference_hamiltonian(model: str, omega: float = 1.0) -> QuadraticHamiltonian:
    """Hessian G (H = xi^T G xi / 2) of the two example stabilizing Hamiltonians.

    ``"sq"``: -i omega (a1 a2 - a1^dag a2^dag) = omega (x1 p2 + p1 x2).
    ``"cas"``: (-i omega / 2) [(a1 + a2)^2 - (a1^dag + a2^dag)^2]
    = (omega / 2) (X P + P X) with X = x1 + x2, P = p1 + p2.
    """
    if not omega > 0:
        raise InvalidArgument("omega must be positive")
    g = np.zeros((4, 4))
    if model == "sq":
        g[0, 3] = g[3, 0] = g[1, 2] = g[2, 1] = omega
    elif model == "cas":
        for xi in (0, 2):
            for pj in (1, 3):
                g[xi, pj] = g[pj, xi] = omega
    else:
        raise InvalidArgument(f"unknown reference Hamiltonian {model!r}")
    return QuadraticHamiltonian(g)


def model_spec(model: str, params: Optional[dict] = None) -> LindbladSpec:
    """Dissipator from a model tag and a parameter mapping."""
    params = dict(params or {})
    if model == "local_damping":
        if "chi" in params:
            return local_damping_spec(
                LocalDampingParams.from_chi(
                    params["chi"], params.get("gamma", 1.0), params.get("gamma1", 1.0),
                    params.get("branch", 1),
                )
            )
        return local_damping_spec(LocalDampingParams(**params))
    if model == "squeezed":
        return squeezed_dissipator_spec(SqueezedDissipatorParams(**params))
    if model == "cascaded":
        return cascaded_spec(CascadedParams(**params))
    raise InvalidArgument(f"unknown dissipator model {model!r}")
