"""Two-mode covariance matrices, standard form and symplectic spectra.

Conventions: hbar = 1, quadrature ordering (x1, p1, x2, p2), vacuum
covariance = identity / 2, natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

EXACT_TOL = 1e-12
ORACLE_TOL = 1e-9
RADICAND_TOL = 1e-10

J = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)
J.flags.writeable = False

# p2 -> -p2
PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])
PARTIAL_TRANSPOSE.flags.writeable = False


class InvalidArgument(ValueError):
    pass


class ReductionFailure(ArithmeticError):
    """Local invariants do not correspond to any real standard form."""


class NumericDomainError(ArithmeticError):
    pass


def symplectic_form(n_modes: int = 2) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric positive-definite 4x4 second-moment matrix.

    Inputs within ``1e-12`` of symmetric are symmetrized on construction;
    anything further off is rejected.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.shape != (4, 4):
            raise InvalidArgument(f"covariance matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidArgument("covariance matrix has non-finite entries")
        if np.max(np.abs(m - m.T)) > EXACT_TOL * max(1.0, np.max(np.abs(m))):
            raise InvalidArgument("covariance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        if np.linalg.eigvalsh(m)[0] <= -EXACT_TOL:
            raise InvalidArgument("covariance matrix is not positive definite")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @classmethod
    def vacuum(cls) -> "CovarianceMatrix":
        return cls(0.5 * np.eye(4))

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Local blocks (A, B) and the correlation block C."""
        m = self.entries
        return m[:2, :2], m[2:, 2:], m[:2, 2:]

    def partial_transpose(self) -> "CovarianceMatrix":
        return CovarianceMatrix(PARTIAL_TRANSPOSE @ self.entries @ PARTIAL_TRANSPOSE)

    def congruence(self, s: np.ndarray) -> "CovarianceMatrix":
        """S V S^T, symmetrized (exactly symmetric in exact arithmetic)."""
        m = s @ self.entries @ s.T
        return CovarianceMatrix(0.5 * (m + m.T))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class StandardForm:
    """Parameters (a, b, c_plus, c_minus) of the standard-form matrix.

    Any finite values are accepted so that model manifolds can be carried
    with their native signs; :func:`to_standard_form` always returns the
    canonical representative with ``c_plus >= |c_minus|``.
    """

    a: float
    b: float
    c_plus: float
    c_minus: float

    def __post_init__(self):
        for name in ("a", "b", "c_plus", "c_minus"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgument(f"standard form field {name} is not finite")
            object.__setattr__(self, name, float(value))

    @property
    def delta(self) -> float:
        return self.a**2 + self.b**2 + 2.0 * self.c_plus * self.c_minus

    @property
    def delta_tilde(self) -> float:
        return self.a**2 + self.b**2 - 2.0 * self.c_plus * self.c_minus

    @property
    def det(self) -> float:
        ab = self.a * self.b
        return (ab - self.c_plus**2) * (ab - self.c_minus**2)

    def canonical(self) -> "StandardForm":
        """Representative with c_plus >= |c_minus| (same local orbit)."""
        cp, cm = self.c_plus, self.c_minus
        if abs(cm) > abs(cp):
            cp, cm = cm, cp
        if cp < 0:
            cp, cm = -cp, -cm
        return StandardForm(self.a, self.b, cp, cm)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c_plus, self.c_minus)


@dataclass(frozen=True)
class SymplecticSpectrum:
    nu_minus: float
    nu_plus: float


@dataclass(frozen=True)
class PhysicalityReport:
    h1: float
    h2: float
    h1_ok: bool
    h2_ok: bool
    positive_definite: bool

    @property
    def physical(self) -> bool:
        return self.h1_ok and self.h2_ok and self.positive_definite


def build_from_standard_form(sf: StandardForm) -> CovarianceMatrix:
    a, b, cp, cm = sf.as_tuple()
    return CovarianceMatrix(
        np.array(
            [
                [a, 0.0, cp, 0.0],
                [0.0, a, 0.0, cm],
                [cp, 0.0, b, 0.0],
                [0.0, cm, 0.0, b],
            ]
        )
    )


def _det2(m00: float, m01: float, m10: float, m11: float) -> float:
    return m00 * m11 - m01 * m10


def local_invariants(v) -> tuple[float, float, float, float]:
    """det A, det B, det C and det V; all unchanged by local symplectics.

    When the x-p cross entries vanish (standard-form shape) det V factorizes
    into the x-block and p-block determinants, which avoids the cancellation
    of a full LU determinant for strongly squeezed states.
    """
    m = np.asarray(v, dtype=float)
    det_a = _det2(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    det_b = _det2(m[2, 2], m[2, 3], m[3, 2], m[3, 3])
    det_c = _det2(m[0, 2], m[0, 3], m[1, 2], m[1, 3])
    if m[0, 1] == 0 and m[0, 3] == 0 and m[1, 2] == 0 and m[2, 3] == 0:
        det_v = _det2(m[0, 0], m[0, 2], m[2, 0], m[2, 2]) * _det2(m[1, 1], m[1, 3], m[3, 1], m[3, 3])
    else:
        det_v = float(np.linalg.det(m))
    return float(det_a), float(det_b), float(det_c), float(det_v)


def _term_scale(det_a: float, det_b: float, det_c: float) -> float:
    return max(1.0, (abs(det_a) + abs(det_b) + 2.0 * abs(det_c)) ** 2)


def _normalizer(block: np.ndarray) -> np.ndarray:
    """det^(1/4) * block^(-1/2): a one-mode symplectic taking block to sqrt(det) * I."""
    w, u = np.linalg.eigh(block)
    if w[0] <= 0:
        raise ReductionFailure("local blocks must be positive definite")
    return (w[0] * w[1]) ** 0.25 * (u / np.sqrt(w)) @ u.T


def to_standard_form(v: CovarianceMatrix) -> StandardForm:
    """Canonical (a, b, c+, c-) with c+ >= |c-|.

    a and b are the square roots of the local block determinants.  The
    correlation block, once both local blocks are brought to multiples of the
    identity, is diagonalized by rotations (signed singular values), which
    keeps c+ and c- accurate to rounding of the block itself even when they
    are tiny or nearly degenerate.
    """
    m = np.asarray(v, dtype=float)
    m = 0.5 * (m + m.T)
    s1, s2 = _normalizer(m[:2, :2]), _normalizer(m[2:, 2:])
    a = math.sqrt(_det2(m[0, 0], m[0, 1], m[1, 0], m[1, 1]))
    b = math.sqrt(_det2(m[2, 2], m[2, 3], m[3, 2], m[3, 3]))
    corr = s1 @ m[:2, 2:] @ s2.T
    u, sigma, wt = np.linalg.svd(corr)
    # rotations only: a reflection on either side flips the smaller value
    sign = np.sign(np.linalg.det(u)) * np.sign(np.linalg.det(wt))
    return StandardForm(a, b, float(sigma[0]), float(sign * sigma[1]))


def _spectrum_from_invariants(delta: float, det_v: float, scale: float) -> SymplecticSpectrum:
    # scale bounds the rounding error of delta^2 and det V
    inner = delta * delta - 4.0 * det_v
    if inner < -RADICAND_TOL * scale:
        raise NumericDomainError(f"negative inner radicand {inner:.3e}")
    inner = math.sqrt(max(inner, 0.0))
    hi = 0.5 * (delta + inner)
    if hi <= 0 or det_v < -RADICAND_TOL * scale:
        raise NumericDomainError(f"negative radicand (delta={delta:.3e}, det={det_v:.3e})")
    nu_plus = math.sqrt(hi)
    # nu- nu+ = sqrt(det V) is better conditioned than delta - inner
    nu_minus = math.sqrt(max(det_v, 0.0)) / nu_plus
    return SymplecticSpectrum(nu_minus, nu_plus)


def symplectic_eigenvalues(v: CovarianceMatrix) -> SymplecticSpectrum:
    det_a, det_b, det_c, det_v = local_invariants(v)
    return _spectrum_from_invariants(det_a + det_b + 2.0 * det_c, det_v,
                                     _term_scale(det_a, det_b, det_c))


def partial_transpose_spectrum(v: CovarianceMatrix) -> SymplecticSpectrum:
    det_a, det_b, det_c, det_v = local_invariants(v)
    return _spectrum_from_invariants(det_a + det_b - 2.0 * det_c, det_v,
                                     _term_scale(det_a, det_b, det_c))


def symplectic_eigenvalues_numeric(v) -> np.ndarray:
    """Sorted moduli of the eigenvalues of J V, each pair reported once."""
    m = np.asarray(v, dtype=float)
    mods = np.sort(np.abs(np.linalg.eigvals(symplectic_form(m.shape[0] // 2) @ m)))
    return mods[::2]


def check_physical(v) -> PhysicalityReport:
    """Heisenberg constraints h1 <= 0 and h2 <= 0 plus positive definiteness.

    Accepts anything array-like so that unphysical candidates can be
    screened without building a :class:`CovarianceMatrix`.
    """
    if isinstance(v, StandardForm):
        delta, det_v = v.delta, v.det
        m = np.asarray(build_matrix(v))
    else:
        m = np.asarray(v, dtype=float)
        m = 0.5 * (m + m.T)
        det_a, det_b, det_c, det_v = local_invariants(m)
        delta = det_a + det_b + 2.0 * det_c
    h1 = float(4.0 * delta - 16.0 * det_v - 1.0)
    h2 = float(-4.0 * delta + 2.0)
    if isinstance(v, StandardForm):
        terms = v.a**2 + v.b**2 + 2.0 * abs(v.c_plus * v.c_minus)
    else:
        terms = math.sqrt(_term_scale(*local_invariants(m)[:3]))
    scale = max(1.0, 16.0 * terms * terms)
    return PhysicalityReport(
        h1=h1,
        h2=h2,
        h1_ok=h1 <= EXACT_TOL * scale,
        h2_ok=h2 <= EXACT_TOL * scale,
        positive_definite=bool(np.linalg.eigvalsh(m)[0] > -EXACT_TOL),
    )


def build_matrix(sf: StandardForm) -> np.ndarray:
    """Standard-form matrix without the positive-definiteness gate."""
    a, b, cp, cm = sf.as_tuple()
    return np.array(
        [
            [a, 0.0, cp, 0.0],
            [0.0, a, 0.0, cm],
            [cp, 0.0, b, 0.0],
            [0.0, cm, 0.0, b],
        ]
    )


def squeezed_parametrization(nu_minus: float, nu_plus: float, r: float) -> StandardForm:
    """Two-mode squeezed thermal state with symplectic eigenvalues nu_-, nu_+."""
    if not (math.isfinite(nu_minus) and math.isfinite(nu_plus) and math.isfinite(r)):
        raise InvalidArgument("non-finite squeezed-state parameters")
    if nu_minus < 0.5 - EXACT_TOL or nu_plus < nu_minus - EXACT_TOL:
        raise InvalidArgument(f"need 1/2 <= nu_- <= nu_+, got ({nu_minus}, {nu_plus})")
    return _squeezed(nu_minus, nu_plus, r)


def _squeezed(nu_minus: float, nu_plus: float, r: float) -> StandardForm:
    ch2, sh2 = math.cosh(r) ** 2, math.sinh(r) ** 2
    c = 0.5 * (nu_minus + nu_plus) * math.sinh(2.0 * r)
    return StandardForm(
        nu_minus * ch2 + nu_plus * sh2,
        nu_minus * sh2 + nu_plus * ch2,
        c,
        -c,
    )


def random_local_symplectic(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """S1 (+) S2 with each block rotation . squeeze . rotation."""
    blocks = []
    for _ in range(2):
        t1, t2 = rng.uniform(0, 2 * np.pi, size=2)
        z = rng.normal(scale=scale)
        blocks.append(_rot(t1) @ np.diag([np.exp(z), np.exp(-z)]) @ _rot(t2))
    s = np.zeros((4, 4))
    s[:2, :2], s[2:, 2:] = blocks
    return s


def random_symplectic(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random two-mode symplectic matrix exp(J H) with H symmetric."""
    h = rng.normal(scale=scale, size=(4, 4))
    return expm(J @ (h + h.T) / 2)


def random_physical_state(rng: np.random.Generator, scale: float = 0.5) -> CovarianceMatrix:
    """Thermal state with random occupations dressed by a random symplectic."""
    nus = 0.5 + rng.exponential(scale=1.0, size=2)
    thermal = np.diag([nus[0], nus[0], nus[1], nus[1]])
    s = random_symplectic(rng, scale)
    return CovarianceMatrix(s @ thermal @ s.T)


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])
