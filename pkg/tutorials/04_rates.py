# %% [markdown]
# # Rates: capacity per unit time
#
# A regular sequence with mean spacing `tau_s` transmits at `capacity / tau_s`.
# Spacing carriers at `tau_E` gives the memoryless rates.  Packing them
# tighter trades noise for speed.

# %%
import numpy as np

from qmemchan import best_rate_search, dephasing_quantum_capacity, qubit_dephasing_model
from qmemchan.rates import group_coherent_information
from qmemchan.qcore import binary_entropy

lam = 0.25
env = qubit_dephasing_model(lam)
print("memoryless r_q at tau_s = tau_E:", dephasing_quantum_capacity(np.sqrt(lam)))

# %% [markdown]
# A group of `m` carriers with no waiting loses a fixed amount of coherent
# information, `H2((1 + sqrt(lam)) / 2)`, however large `m` is.

# %%
for m in (1, 2, 4, 8):
    j = group_coherent_information(env, [0.0] * (m - 1))
    print(m, round(j, 6), round(m - binary_entropy((1 + np.sqrt(lam)) / 2), 6))

# %% [markdown]
# Groups must still be separated by `tau_E`, so with spacing `tau_min` a group
# of `m` can at best deliver `m / ((m - 1) tau_min + tau_E)` qubits per unit
# time.  The search below finds the best group size within the memory budget.

# %%
for tau_min in (1.0, 0.3, 0.05):
    rep = best_rate_search(tau_min, env, budget=2, tau_points=4, p_points=4)
    print(f"tau_min = {tau_min}: r_q = {rep.r_q:.3f}, r_c = {rep.r_c:.3f}, "
          f"bound {rep.upper_bound:.1f}, {rep.regime} {rep.details['quantum_argmax']}")
