# %% [markdown]
# # Carriers, a local environment, and memory
#
# Every carrier (a qubit here) hits the same two-level local environment (LE)
# through a controlled unitary.  Between hits the LE relaxes towards
# `|0><0|` by amplitude damping, and it is fully reset after `tau_E`.
#
# This script builds the single-carrier map, checks that widely spaced
# carriers see independent noise, and shows what happens when they come
# close together.

# %%
import numpy as np

from qmemchan import (
    CarrierSequence,
    choi_distance,
    compose_sequence,
    memoryless_map,
    perfect_memory_map,
    phase_damping,
    qubit_dephasing_model,
)
from qmemchan.channels import environment_errors

lam = 0.25
env = qubit_dephasing_model(lam, tau_e=1.0)
print(environment_errors(env))

# %% [markdown]
# A lone carrier sees a phase damping channel whose coherence factor is
# `sqrt(lam)`.

# %%
single = memoryless_map(env)
print("distance to P_sqrt(lam):", choi_distance(single, phase_damping(np.sqrt(lam))))

# %% [markdown]
# Spacing carriers by at least `tau_E` gives a product of identical maps.
# With no waiting at all (perfect memory) the joint map is very different.

# %%
pair = single.tensor(single)
for tau in (2.0, 1.0, 0.5, 0.1, 0.0):
    ch = perfect_memory_map(env, 2) if tau == 0 else compose_sequence(env, CarrierSequence.uniform(tau), 2)
    print(f"tau = {tau:4.1f} tau_E   distance from N (x) N: {choi_distance(ch, pair):.3f}")

# %% [markdown]
# Shrinking the waiting time moves the map continuously towards the perfect
# memory channel.

# %%
for tau in (1e-2, 1e-4, 1e-8):
    ch = compose_sequence(env, CarrierSequence.uniform(tau), 3)
    print(f"tau = {tau:.0e}: distance to perfect memory {choi_distance(ch, perfect_memory_map(env, 3)):.2e}")
