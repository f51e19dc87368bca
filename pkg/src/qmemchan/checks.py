"""Structural invariant suite, used by ``qmemchan validate``.

Every check is deterministic (fixed seeds) and returns a :class:`CheckResult`;
exceptions raised while building the objects under test count as failures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import attenuation as att
from .channels import (
    CarrierSequence,
    amplitude_damping,
    compose_sequence,
    environment_errors,
    eta_profile,
    grouped_map,
    memoryless_map,
    perfect_memory_map,
    phase_damping,
    product_of_groups,
    qubit_dephasing_model,
)
from .markov import (
    decoherent_channel,
    decoherent_model,
    markov_decompose,
    markov_reconstruct,
    qubit_decoherent_relaxation,
)
from .qcore import (
    TOL,
    QuantumChannel,
    choi_distance,
    partial_trace,
    purify,
    random_density,
    random_unitary,
    tensor,
    trace_distance,
)
from .rates import coherent_information

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _model_factory(eta):
    return lambda lam: qubit_dephasing_model(lam, 1.0, eta=eta)


def check_kraus_completeness(model) -> str:
    env = model(0.3)
    chans = [amplitude_damping(e) for e in (0.0, 0.3, 1.0)]
    chans += [phase_damping(g) for g in (-1.0, 0.0, 0.4, 1.0)]
    chans += [memoryless_map(env), perfect_memory_map(env, 3), grouped_map(env, [0.2, 0.7])]
    chans += [compose_sequence(env, CarrierSequence((0.4, 1.3)), 3)]
    chans += [decoherent_channel(qubit_decoherent_relaxation(), t) for t in (0.0, 0.5, 2.0)]
    chans += [att.modified_map(att.AttenuationProtocol(3, 0.4, 0.2, 0.3))]
    worst = max(c.completeness_error() for c in chans)
    assert worst <= TOL.kraus, f"completeness error {worst:.2e}"
    return f"{len(chans)} channels, worst error {worst:.1e}"


def check_stationarity(model) -> str:
    errs = environment_errors(model(0.5))
    assert errs["stationarity"] <= 1e-10, f"E_tau(sigma0) deviates by {errs['stationarity']:.2e}"
    assert errs["identity_at_zero"] <= 1e-10, "E_0 is not the identity"
    return f"stationarity {errs['stationarity']:.1e}, E_0 {errs['identity_at_zero']:.1e}"


def check_full_relaxation(model) -> str:
    errs = environment_errors(model(0.5))
    assert errs["full_relaxation"] <= 1e-10, f"tau >= tau_E does not reset the LE ({errs['full_relaxation']:.2e})"
    return f"max deviation {errs['full_relaxation']:.1e}"


def check_factorization(model) -> str:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for lam in rng.uniform(0.0, 1.0, 5):
        env = model(lam)
        n = memoryless_map(env)
        worst = max(worst, choi_distance(compose_sequence(env, CarrierSequence((1.0 + rng.random(),)), 2), n.tensor(n)))
        intra = [rng.uniform(0.05, 0.9)]
        seq = CarrierSequence((intra[0], 1.0 + rng.random()), periodic=True)
        worst = max(worst, choi_distance(compose_sequence(env, seq, 4), product_of_groups(env, [intra, intra])))
    assert worst < TOL.map_eq, f"Choi distance {worst:.2e}"
    return f"worst Choi distance {worst:.1e}"


def check_causality(model) -> str:
    rng = np.random.default_rng(SEED + 1)
    env = model(0.2)
    ch = compose_sequence(env, CarrierSequence((0.3,)), 2)
    worst = 0.0
    for _ in range(10):
        r1 = random_density(2, rng)
        a = partial_trace(ch.apply(tensor(r1, random_density(2, rng))), [2, 2], [0])
        b = partial_trace(ch.apply(tensor(r1, random_density(2, rng))), [2, 2], [0])
        worst = max(worst, float(np.max(np.abs(a - b))))
    assert worst < 1e-10, f"first carrier depends on the second input ({worst:.2e})"
    return f"max difference {worst:.1e}"


def check_purification_invariance(model) -> str:
    rng = np.random.default_rng(SEED + 2)
    env = model(0.4)
    chans = [memoryless_map(env), QuantumChannel(compose_sequence(env, CarrierSequence((0.5,)), 2).kraus)]
    worst = 0.0
    for ch in chans:
        rho = random_density(ch.dim_in, rng)
        psi = purify(rho).reshape(ch.dim_in, ch.dim_in)
        # any unitary on the ancilla gives another purification
        other = (psi @ random_unitary(ch.dim_in, rng).T).ravel()
        worst = max(worst, abs(coherent_information(ch, rho) - coherent_information(ch, rho, other)))
    assert worst < 1e-9, f"coherent information depends on the purification ({worst:.2e})"
    return f"max difference {worst:.1e}"


def check_trajectory_y_zero(model) -> str:
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(10):
        proto = att.AttenuationProtocol(int(rng.integers(1, 12)), rng.uniform(0.05, 1.0), rng.random(), rng.random())
        worst = max(worst, float(np.max(np.abs(att.iterate_environment(proto).y))))
    assert worst < 1e-14, f"|y_j| reaches {worst:.2e}"
    return f"max |y| {worst:.1e}"


def check_closed_form(model) -> str:
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(20):
        p, lam, eta = rng.random(3)
        n = int(rng.integers(0, 51))
        proto = att.AttenuationProtocol(n, 1.0 - eta, p, lam)
        worst = max(worst, abs(att.closed_form_gbar(proto) - att.iterated_gbar(proto)))
    assert worst < 1e-9, f"closed form and iteration differ by {worst:.2e}"
    return f"max difference {worst:.1e}"


def check_markov(model) -> str:
    rng = np.random.default_rng(SEED + 5)
    spec = qubit_decoherent_relaxation()
    worst = 0.0
    for _ in range(10):
        env = decoherent_model(model(rng.random()).coupling, spec, 2)
        n = int(rng.integers(1, 4))
        s = CarrierSequence(tuple(rng.uniform(0.05, 1.5, 2)))
        rho = random_density(2**n, rng)
        worst = max(worst, trace_distance(markov_reconstruct(markov_decompose(env, s, n), rho), compose_sequence(env, s, n).apply(rho)))
    assert worst < 1e-10, f"trace distance {worst:.2e}"
    return f"max trace distance {worst:.1e}"


CHECKS: dict[str, Callable] = {
    "kraus-completeness": check_kraus_completeness,
    "stationarity": check_stationarity,
    "full-relaxation": check_full_relaxation,
    "factorization": check_factorization,
    "causality": check_causality,
    "purification-invariance": check_purification_invariance,
    "trajectory-y-zero": check_trajectory_y_zero,
    "closed-form-vs-iteration": check_closed_form,
    "markov-reconstruction": check_markov,
}

FAULTS = {
    "eta-gt-1": lambda tau, tau_e: 1.2,
}


def run_checks(fault: str | None = None) -> list[CheckResult]:
    eta = eta_profile if fault is None else FAULTS[fault]
    model = _model_factory(eta)
    results = []
    for name, fn in CHECKS.items():
        try:
            detail = fn(model)
            results.append(CheckResult(name, True, detail))
        except Exception as exc:  # noqa: BLE001 - any failure is reported, not raised
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
