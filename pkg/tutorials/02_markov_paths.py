# %% [markdown]
# # Path sums for decoherent relaxation
#
# If each relaxation step kills LE coherences in a fixed basis, the
# multi-carrier map is a mixture over LE trajectories.  Each trajectory
# applies a product of single-carrier operators, weighted by a Markov chain
# on the LE basis labels.

# %%
import numpy as np

from qmemchan import CarrierSequence, compose_sequence, markov_decompose, markov_reconstruct, trace_distance
from qmemchan.channels import qubit_control_coupling
from qmemchan.markov import decoherent_model, qubit_decoherent_relaxation
from qmemchan.qcore import random_density

rng = np.random.default_rng(3)
relax = qubit_decoherent_relaxation(tau_e=1.0)
env = decoherent_model(qubit_control_coupling(0.3), relax, carrier_dim=2)
seq = CarrierSequence((0.2, 0.6))

dec = markov_decompose(env, seq, 3)
print("first-step probabilities:", dec.first_probs)
print("transition matrix for the first wait (columns: previous LE label):")
print(dec.step_probs[0])

# %% [markdown]
# Columns sum to one.  Rows need not: summing over where the LE came from
# is not a probability.

# %%
print("column sums:", dec.step_probs[0].sum(axis=0))
print("row sums:   ", dec.incoming_sums()[0])

# %% [markdown]
# The path sum reproduces the directly composed map.

# %%
rho = random_density(8, rng)
direct = compose_sequence(env, seq, 3)(rho)
print("trace distance:", trace_distance(markov_reconstruct(dec, rho), direct))
