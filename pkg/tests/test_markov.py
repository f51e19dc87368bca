import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmemchan.channels import CarrierSequence, compose_sequence, qubit_control_coupling, qubit_dephasing_model
from qmemchan.markov import (
    DecoherentRelaxation,
    decoherent_channel,
    decoherent_model,
    markov_channel,
    markov_decompose,
    markov_reconstruct,
    qubit_decoherent_relaxation,
)
from qmemchan.qcore import choi_distance, random_density, random_unitary, trace_distance

seeds = st.integers(0, 2**32 - 1)
spec = qubit_decoherent_relaxation()


def model(lam):
    return decoherent_model(qubit_control_coupling(lam), spec, 2)


def test_decoherent_relaxation_kills_coherences():
    rho = np.array([[0.4, 0.3], [0.3, 0.6]])
    out = decoherent_channel(spec, 0.5)(rho)
    theta = np.pi / 4
    psi1 = np.array([np.cos(theta), np.sin(theta)])
    np.testing.assert_allclose(out, 0.4 * np.diag([1.0, 0.0]) + 0.6 * np.outer(psi1, psi1), atol=1e-14)


def test_decoherent_relaxation_end_points():
    rho = random_density(2, np.random.default_rng(0))
    np.testing.assert_allclose(decoherent_channel(spec, 1.0)(rho), np.diag([1.0, 0.0]), atol=1e-15)
    np.testing.assert_allclose(decoherent_channel(spec, 0.0)(rho), np.diag(np.diag(rho)), atol=1e-15)


@given(seeds, st.floats(0.0, 1.0), st.integers(1, 3), st.sampled_from(["normalized", "trace"]))
def test_reconstruction_matches_direct_composition(seed, lam, n, convention):
    rng = np.random.default_rng(seed)
    env = model(lam)
    s = CarrierSequence(tuple(rng.uniform(0.05, 1.5, 2)))
    rho = random_density(2**n, rng)
    dec = markov_decompose(env, s, n, convention)
    assert trace_distance(markov_reconstruct(dec, rho), compose_sequence(env, s, n)(rho)) < 1e-10


@given(seeds, st.integers(1, 3))
def test_generic_coupling_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    env = decoherent_model(random_unitary(4, rng), spec, 2)
    s = CarrierSequence((rng.uniform(0.05, 1.5),))
    dec = markov_decompose(env, s, n)
    assert choi_distance(markov_channel(dec), compose_sequence(env, s, n)) < 1e-10


@given(seeds)
def test_normalized_conditionals_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    env = decoherent_model(random_unitary(4, rng), spec, 2)
    dec = markov_decompose(env, CarrierSequence((0.3, 0.8)), 3)
    assert dec.normalization_error() < 1e-12
    assert np.all(dec.first_probs >= 0)
    for p in dec.step_probs:
        assert np.all(p >= -1e-15)


def test_trace_convention_scale():
    dec = markov_decompose(model(0.3), CarrierSequence((0.4,)), 2, "trace")
    assert dec.prob_scale == 2.0
    assert dec.normalization_error() < 1e-12


def test_incoming_sums_are_not_normalized():
    # sums over the previous LE state are not constrained; they can exceed one
    dec = markov_decompose(model(0.2), CarrierSequence((0.3,)), 2)
    sums = dec.incoming_sums()[0]
    assert sums.sum() == pytest.approx(2.0)
    assert sums.max() > 1.0


def test_rejects_non_decoherent_model():
    with pytest.raises(ValueError, match="decoherent"):
        markov_decompose(qubit_dephasing_model(0.3), CarrierSequence((0.4,)), 2)


def test_rejects_bad_relaxation_family():
    stuck = DecoherentRelaxation(np.eye(2), lambda l, t: np.eye(2)[l], 0)
    with pytest.raises(ValueError, match="stationary"):
        decoherent_model(qubit_control_coupling(0.3), stuck, 2)
    with pytest.raises(ValueError):
        DecoherentRelaxation(np.ones((2, 2)), spec.post_state, 0)
