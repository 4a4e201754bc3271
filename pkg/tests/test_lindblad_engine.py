import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm, solve_continuous_lyapunov

from gaussstab.lindblad_engine import (
    DivergenceError,
    EvolutionConfig,
    LindbladSpec,
    QuadraticHamiltonian,
    diffusion_matrix,
    drift_matrix,
    evolve_covariance,
    evolve_trajectory,
    fixed_point_residual,
    lyapunov_operator,
    steady_state,
    sym_to_vec,
    symmetric_basis,
    vec_to_sym,
)
from gaussstab.measures import log_negativity
from gaussstab.models import (
    CascadedParams,
    LocalDampingParams,
    SqueezedDissipatorParams,
    cascaded_spec,
    local_damping_spec,
    reference_hamiltonian,
    squeezed_dissipator_spec,
)
from gaussstab.symplectic_core import (
    CovarianceMatrix,
    InvalidArgument,
    StandardForm,
    build_from_standard_form,
    random_physical_state,
    squeezed_parametrization,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
EMPTY = LindbladSpec(np.zeros((0, 4)))


def random_spec(rng, k=None):
    k = k or int(rng.integers(1, 5))
    return LindbladSpec(rng.normal(size=(k, 4)) + 1j * rng.normal(size=(k, 4)))


# ---------------------------------------------------------------- LindbladSpec


@given(seeds)
def test_gram_parts_have_the_right_symmetry(seed):
    d = random_spec(np.random.default_rng(seed))
    assert np.max(np.abs(d.r_c - d.r_c.T)) < 1e-14
    assert np.max(np.abs(d.i_c + d.i_c.T)) < 1e-14
    assert np.linalg.eigvalsh(d.gram)[0] > -1e-12


def test_gram_of_annihilation_operators():
    a1 = np.array([1, 1j, 0, 0]) / math.sqrt(2)
    d = LindbladSpec([a1])
    # a^dag a quadratic form: (x^2 + p^2)/2 plus i(xp - px)/2
    assert np.allclose(d.r_c[:2, :2], 0.5 * np.eye(2))
    assert np.allclose(d.i_c[:2, :2], [[0, 0.5], [-0.5, 0]])


def test_spec_rejects_wrong_length():
    with pytest.raises(InvalidArgument):
        LindbladSpec([[1, 2, 3]])


def test_spec_addition_and_scaling(rng):
    d1, d2 = random_spec(rng, 2), random_spec(rng, 1)
    both = d1 + d2
    assert both.c.shape == (3, 4)
    assert np.allclose(both.gram, d1.gram + d2.gram)
    assert np.allclose(d1.scaled(3.0).gram, 3.0 * d1.gram)


def test_hamiltonian_must_be_symmetric():
    g = np.zeros((4, 4))
    g[0, 1] = 1.0
    with pytest.raises(InvalidArgument):
        QuadraticHamiltonian(g)


# ------------------------------------------------------------- drift/diffusion


def test_zero_drift_without_dynamics():
    assert np.array_equal(drift_matrix(QuadraticHamiltonian.zero(), EMPTY), np.zeros((4, 4)))
    assert np.array_equal(diffusion_matrix(EMPTY), np.zeros((4, 4)))


@pytest.mark.parametrize("gamma", [0.3, 1.0, 2.5])
def test_local_damping_drift(gamma):
    d = local_damping_spec(LocalDampingParams(gamma, gamma, 1.0))
    assert np.allclose(drift_matrix(QuadraticHamiltonian.zero(), d), -0.5 * gamma * np.eye(4), atol=1e-15)


@pytest.mark.parametrize("t", [0.1, 0.7, 1.5])
def test_squeezing_generator_flow(t):
    a = drift_matrix(reference_hamiltonian("sq", 1.0), EMPTY)
    s = expm(a * t)
    v = s @ (0.5 * np.eye(4)) @ s.T
    expected = build_from_standard_form(squeezed_parametrization(0.5, 0.5, t)).entries
    assert np.allclose(v, expected, rtol=1e-12, atol=1e-12)


# ------------------------------------------------------------------ evolution


def test_config_validation():
    with pytest.raises(InvalidArgument):
        EvolutionConfig(0.0, 1.0)
    with pytest.raises(InvalidArgument):
        EvolutionConfig(2.0, 1.0)
    with pytest.raises(InvalidArgument):
        EvolutionConfig(0.1, 1.0, method="euler")
    assert EvolutionConfig(0.1, 1.0).n_steps == 10


@pytest.mark.parametrize("horizon", [0.5, 3.0, 20.0])
def test_vacuum_is_stationary_under_damping(horizon):
    d = local_damping_spec(LocalDampingParams(1.0, 1.0, 1.0))
    v = evolve_covariance(CovarianceMatrix.vacuum(), QuadraticHamiltonian.zero(), d, EvolutionConfig(0.05, horizon))
    assert np.max(np.abs(v.entries - 0.5 * np.eye(4))) < 1e-14


@pytest.mark.parametrize("omega", [0.5, 1.0])
def test_pure_squeezing_flow_matches_closed_form(omega):
    h = reference_hamiltonian("sq", omega)
    cfg = EvolutionConfig(0.005, 1.0)
    for t, v in evolve_trajectory(CovarianceMatrix.vacuum(), h, EMPTY, cfg, every=20):
        expected = build_from_standard_form(squeezed_parametrization(0.5, 0.5, omega * t)).entries
        assert np.max(np.abs(v - expected)) < 1e-8


def test_trajectory_times_and_symmetry(rng):
    d = random_spec(rng, 2)
    g = rng.normal(size=(4, 4))
    cfg = EvolutionConfig(0.01, 1.0)
    times = []
    for t, v in evolve_trajectory(random_physical_state(rng), QuadraticHamiltonian(g + g.T), d, cfg, every=10):
        times.append(t)
        assert np.array_equal(v, v.T)
    assert times[0] == 0.0 and times[-1] == pytest.approx(1.0)
    assert len(times) == 11


def _flow_error(dt):
    h = reference_hamiltonian("sq", 1.0)
    v = evolve_covariance(CovarianceMatrix.vacuum(), h, EMPTY, EvolutionConfig(dt, 2.0))
    exact = build_from_standard_form(squeezed_parametrization(0.5, 0.5, 2.0)).entries
    return np.max(np.abs(v.entries - exact))


def test_fourth_order_convergence():
    errors = [_flow_error(dt) for dt in (0.1, 0.05, 0.025)]
    ratios = [errors[i] / errors[i + 1] for i in range(2)]
    assert all(r >= 8 for r in ratios)
    assert all(abs(r - 16) < 2 for r in ratios)


def test_divergence_is_reported():
    h = reference_hamiltonian("sq", 5.0)
    with pytest.raises(DivergenceError) as info:
        evolve_covariance(CovarianceMatrix.vacuum(), h, EMPTY, EvolutionConfig(0.01, 10.0))
    assert 0 < info.value.steps_completed < 1000


def test_damping_destroys_entanglement():
    d = local_damping_spec(LocalDampingParams(1.0, 1.0, 1.0))
    v0 = build_from_standard_form(squeezed_parametrization(0.5, 0.5, 1.0))
    assert log_negativity(v0) > 1.9
    v = evolve_covariance(v0, QuadraticHamiltonian.zero(), d, EvolutionConfig(0.01, 30.0))
    assert log_negativity(v) == 0.0


# --------------------------------------------------------------- steady state


def test_symmetric_basis_round_trip(rng):
    x = rng.normal(size=10)
    assert np.array_equal(sym_to_vec(vec_to_sym(x)), x)
    assert len(symmetric_basis()) == 10


def test_lyapunov_operator_matches_direct_application(rng):
    a = rng.normal(size=(4, 4))
    x = vec_to_sym(rng.normal(size=10))
    assert np.allclose(lyapunov_operator(a) @ sym_to_vec(x), sym_to_vec(a @ x + x @ a.T))


def test_damping_steady_state_is_vacuum():
    d = local_damping_spec(LocalDampingParams(1.0, 1.0, 1.0))
    ss = steady_state(QuadraticHamiltonian.zero(), d)
    assert ss.unique
    assert np.max(np.abs(ss.covariance.entries - 0.5 * np.eye(4))) < 1e-12
    assert ss.residual < 1e-12


@given(seeds)
def test_steady_state_matches_scipy_lyapunov(seed):
    rng = np.random.default_rng(seed)
    d = local_damping_spec(LocalDampingParams(*rng.uniform(0.2, 2.0, size=2), rng.uniform(0.5, 2.0)))
    g = 0.1 * rng.normal(size=(4, 4))
    h = QuadraticHamiltonian(g + g.T)
    a = drift_matrix(h, d)
    if np.max(np.linalg.eigvals(a).real) >= -1e-3:
        return
    ss = steady_state(h, d)
    oracle = solve_continuous_lyapunov(a, -diffusion_matrix(d))
    assert np.allclose(ss.covariance.entries, oracle, rtol=1e-9, atol=1e-10)
    assert ss.residual < 1e-10


def test_cascaded_has_no_unique_steady_state():
    d = cascaded_spec(CascadedParams(1.0))
    ss = steady_state(QuadraticHamiltonian.zero(), d)
    assert not ss.unique
    assert ss.null_dim >= 1


@pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
def test_cascaded_fixed_point_family(a):
    d = cascaded_spec(CascadedParams(1.0))
    v = build_from_standard_form(StandardForm(a, a, 0.5 - a, 0.5 - a))
    assert fixed_point_residual(v, QuadraticHamiltonian.zero(), d) < 1e-12
    assert log_negativity(v) == 0.0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_squeezed_dissipator_steady_state(alpha):
    d = squeezed_dissipator_spec(SqueezedDissipatorParams(alpha, 0.0))
    ss = steady_state(QuadraticHamiltonian.zero(), d)
    expected = build_from_standard_form(squeezed_parametrization(0.5, 0.5, alpha)).entries
    assert np.max(np.abs(ss.covariance.entries - expected)) < 1e-10
    assert fixed_point_residual(expected, QuadraticHamiltonian.zero(), d) < 1e-12


def test_steady_state_is_stationary_under_evolution():
    gamma = 0.7
    d = local_damping_spec(LocalDampingParams(gamma, 0.4, 1.3))
    h = reference_hamiltonian("sq", 0.1)
    ss = steady_state(h, d)
    v = evolve_covariance(ss.covariance, h, d, EvolutionConfig(0.01, 10.0 / gamma))
    assert np.max(np.abs(v.entries - ss.covariance.entries)) < 1e-10
