import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmemchan.attenuation import (
    AttenuationProtocol,
    ClosedFormUnavailable,
    attenuated_channel,
    closed_form_gbar,
    closed_form_state,
    gbar,
    gbar_value,
    iterate_environment,
    iterated_gbar,
    modified_map,
    optimize_gbar,
    recursion_matrices,
)
from qmemchan.channels import phase_damping
from qmemchan.qcore import choi_distance

unit = st.floats(0.0, 1.0)
taus = st.floats(0.01, 1.5)


@given(st.integers(0, 50), taus, unit, unit)
def test_closed_form_matches_iteration(n, tau, p, lam):
    proto = AttenuationProtocol(n, tau, p, lam)
    assert abs(gbar(proto) - iterated_gbar(proto)) < 1e-9


@given(st.integers(0, 30), taus, unit, unit)
def test_trajectory_has_no_y_component(n, tau, p, lam):
    assert np.max(np.abs(iterate_environment(AttenuationProtocol(n, tau, p, lam)).y)) < 1e-14


@given(st.integers(1, 10), taus, unit, unit)
def test_message_carrier_sees_phase_damping(n, tau, p, lam):
    proto = AttenuationProtocol(n, tau, p, lam)
    assert choi_distance(modified_map(proto), phase_damping(iterated_gbar(proto))) < 1e-10


@given(st.integers(1, 20), taus, unit, unit)
def test_gbar_is_a_valid_damping_factor(n, tau, p, lam):
    assert abs(gbar(AttenuationProtocol(n, tau, p, lam))) <= 1 + 1e-12


@given(st.integers(0, 20), taus, unit)
def test_memoryless_limits(n, tau, lam):
    g0 = np.sqrt(lam)
    # no sacrificial carriers, a fully relaxed LE, or carriers in |0> (which never touch the LE)
    assert gbar(AttenuationProtocol(0, tau, 0.3, lam)) == pytest.approx(g0, abs=1e-12)
    assert gbar(AttenuationProtocol(n, max(tau, 1.0), 0.3, lam)) == pytest.approx(g0, abs=1e-12)
    assert gbar(AttenuationProtocol(n, tau, 1.0, lam)) == pytest.approx(g0, abs=1e-12)


def test_recursion_first_step():
    p, lam, eta = 0.3, 0.4, 0.6
    a, w = recursion_matrices(p, lam, eta)
    z, x = closed_form_state(p, lam, eta, 1)
    assert z == pytest.approx(eta**0.25 * w[0], abs=1e-14)
    assert x == pytest.approx(w[1], abs=1e-14)


def test_unit_circle_eigenvalue_falls_back():
    # eta = 1 and p = 0 give a unimodular recursion eigenvalue
    with pytest.raises(ClosedFormUnavailable):
        closed_form_state(0.0, 0.3, 1.0, 5)
    proto = AttenuationProtocol(5, 1e-12, 0.0, 0.3)
    assert gbar_value(0.0, 0.3, 1.0, 5) == pytest.approx(iterated_gbar(proto), abs=1e-9)


def test_optimize_gbar_small_lambda():
    p, g = optimize_gbar(0.01, 1, 0.5)
    assert p == pytest.approx(0.0, abs=1e-6)
    assert g == pytest.approx(0.141007142675, abs=1e-9)
    assert g > np.sqrt(0.01)


@given(st.floats(0.01, 0.99), st.integers(1, 6), st.floats(0.05, 0.99))
def test_optimum_beats_grid(lam, n, tau):
    p, g = optimize_gbar(lam, n, tau)
    assert 0.0 <= p <= 1.0
    grid = [gbar(AttenuationProtocol(n, tau, q, lam)) for q in np.linspace(0, 1, 11)]
    assert g >= max(grid) - 1e-12
    assert g >= np.sqrt(lam) - 1e-12


def test_attenuated_channel_type():
    proto = AttenuationProtocol(2, 0.4, 0.1, 0.2)
    assert choi_distance(attenuated_channel(proto), phase_damping(closed_form_gbar(proto))) < 1e-12


def test_protocol_validation():
    for args in ((-1, 0.5, 0.1, 0.1), (1, 0.0, 0.1, 0.1), (1, 0.5, 1.1, 0.1), (1, 0.5, 0.1, -0.1)):
        with pytest.raises(ValueError):
            AttenuationProtocol(*args)
