import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmemchan.channels import (
    CarrierSequence,
    EnvironmentModel,
    amplitude_damping,
    compose_sequence,
    coupling_block,
    environment_errors,
    eta_profile,
    grouped_map,
    memoryless_map,
    perfect_memory_map,
    phase_damping,
    product_of_groups,
    qubit_control_coupling,
    qubit_dephasing_model,
)
from qmemchan.qcore import QuantumChannel, choi_distance, is_unitary, partial_trace, random_density, tensor

lams = st.floats(0.0, 1.0)
seeds = st.integers(0, 2**32 - 1)


@given(lams)
def test_coupling_is_unitary_and_controlled(lam):
    theta = coupling_block(lam)
    assert is_unitary(theta)
    np.testing.assert_allclose(theta, theta.conj().T, atol=1e-15)
    u = qubit_control_coupling(lam)
    assert is_unitary(u)
    np.testing.assert_allclose(u[:2, :2], np.eye(2))
    np.testing.assert_allclose(u[2:, 2:], theta)


def test_eta_profile():
    assert eta_profile(0.0, 1.0) == 1.0
    assert eta_profile(0.25, 1.0) == pytest.approx(0.75)
    assert eta_profile(1.0, 1.0) == 0.0
    assert eta_profile(3.0, 1.0) == 0.0


def test_amplitude_damping_limits(rng):
    rho = random_density(2, rng)
    np.testing.assert_allclose(amplitude_damping(1.0)(rho), rho, atol=1e-15)
    np.testing.assert_allclose(amplitude_damping(0.0)(rho), np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(ValueError):
        amplitude_damping(1.2)


@given(st.floats(-1.0, 1.0))
def test_phase_damping_scales_coherences(g):
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    out = phase_damping(g)(rho)
    np.testing.assert_allclose(np.diag(out), np.diag(rho), atol=1e-14)
    assert out[0, 1] == pytest.approx(g * rho[0, 1], abs=1e-14)


@given(lams)
def test_model_axioms(lam):
    errs = environment_errors(qubit_dephasing_model(lam))
    assert max(errs.values()) < 1e-12


@given(lams)
def test_memoryless_map_is_phase_damping(lam):
    env = qubit_dephasing_model(lam)
    assert choi_distance(memoryless_map(env), phase_damping(np.sqrt(lam))) < 1e-12


@given(lams, st.floats(1.0, 5.0), st.integers(2, 3))
def test_memoryless_factorization(lam, tau, n):
    env = qubit_dephasing_model(lam)
    single = memoryless_map(env)
    prod = single
    for _ in range(n - 1):
        prod = prod.tensor(single)
    assert choi_distance(compose_sequence(env, CarrierSequence.uniform(tau), n), prod) < 1e-10


@given(lams, st.floats(0.05, 0.95), st.floats(1.0, 3.0))
def test_group_factorization(lam, intra, gap):
    env = qubit_dephasing_model(lam)
    seq = CarrierSequence((intra, gap))
    assert choi_distance(compose_sequence(env, seq, 4), product_of_groups(env, [[intra], [intra]])) < 1e-10


def test_perfect_memory_is_not_a_product():
    env = qubit_dephasing_model(0.25)
    single = memoryless_map(env)
    assert choi_distance(perfect_memory_map(env, 2), single.tensor(single)) > 0.1


def test_short_interval_approaches_perfect_memory():
    env = qubit_dephasing_model(0.4)
    near = compose_sequence(env, CarrierSequence.uniform(1e-12), 3)
    assert choi_distance(near, perfect_memory_map(env, 3)) < 1e-10


@given(seeds, lams, st.lists(st.floats(0.0, 1.5), min_size=1, max_size=3))
def test_state_route_matches_kraus_route(seed, lam, intervals):
    rng = np.random.default_rng(seed)
    ch = grouped_map(qubit_dephasing_model(lam), intervals)
    rho = random_density(ch.dim_in, rng)
    assert ch.completeness_error() < 1e-12
    np.testing.assert_allclose(ch.apply(rho), QuantumChannel(ch.kraus).apply(rho), atol=1e-12)


@given(seeds, lams, st.floats(0.01, 2.0))
def test_causality(seed, lam, tau):
    rng = np.random.default_rng(seed)
    ch = compose_sequence(qubit_dephasing_model(lam), CarrierSequence.uniform(tau), 2)
    r1 = random_density(2, rng)
    a = partial_trace(ch(tensor(r1, random_density(2, rng))), [2, 2], [0])
    b = partial_trace(ch(tensor(r1, random_density(2, rng))), [2, 2], [0])
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_carrier_sequence():
    s = CarrierSequence((1.0, 2.0))
    assert s.intervals(5) == [1.0, 2.0, 1.0, 2.0, 1.0]
    np.testing.assert_allclose(s.entry_times(4), [0.0, 1.0, 3.0, 4.0])
    fin = CarrierSequence((0.5, 0.7), periodic=False)
    assert fin.n_carriers == 3
    with pytest.raises(ValueError):
        fin.intervals(3)
    for bad in ((), (0.0,), (-1.0,), (np.inf,)):
        with pytest.raises(ValueError):
            CarrierSequence(bad)


def test_budget_is_enforced():
    env = qubit_dephasing_model(0.3)
    with pytest.raises(ValueError, match="budget"):
        perfect_memory_map(env, 12)


def test_environment_model_validation():
    env = qubit_dephasing_model(0.3)
    with pytest.raises(ValueError):
        EnvironmentModel(2, 2, np.eye(3), env.relaxation, env.sigma0, 1.0)
    with pytest.raises(ValueError):
        EnvironmentModel(2, 2, env.coupling, env.relaxation, np.diag([0.5, 0.6]), 1.0)
    # a non-stationary sigma0 is accepted but flagged
    bad = EnvironmentModel(2, 2, env.coupling, env.relaxation, np.diag([0.0, 1.0]), 1.0)
    assert environment_errors(bad)["stationarity"] > 0.5
