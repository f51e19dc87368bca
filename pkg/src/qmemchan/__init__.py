"""Collision-model simulation of quantum memory channels.

Carriers hit a finite local environment (LE) that relaxes towards a
stationary state between hits.  The package builds the resulting
multi-carrier maps, their Markov form for decoherent relaxations, the noise
attenuation protocol for the qubit dephasing example, and the information
measures and rates used to compare carrier sequences.
"""

__version__ = "0.1.0"

from .qcore import (  # noqa: E402
    TOL,
    QuantumChannel,
    binary_entropy,
    choi_distance,
    partial_trace,
    purify,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .channels import (  # noqa: E402
    CarrierSequence,
    EnvironmentModel,
    compose_sequence,
    grouped_map,
    memoryless_map,
    perfect_memory_map,
    phase_damping,
    product_of_groups,
    qubit_dephasing_model,
)
from .markov import decoherent_model, markov_decompose, markov_reconstruct, qubit_decoherent_relaxation  # noqa: E402
from .attenuation import AttenuationProtocol, closed_form_gbar, gbar, iterated_gbar, optimize_gbar  # noqa: E402
from .rates import (  # noqa: E402
    RateReport,
    best_rate_search,
    coherent_information,
    dephasing_classical_capacity,
    dephasing_quantum_capacity,
    gamma_ratio,
    holevo_information,
    one_shot_c_lower,
    one_shot_q_lower,
    rate_attenuation,
    rate_regular,
)
