# %% [markdown]
# # Sacrificing carriers to clean the environment
#
# `n` carriers prepared in `diag(p, 1 - p)` and sent `tau` apart push the LE
# away from its stationary state.  The next carrier then sees phase damping
# with a coherence factor `gbar` that can exceed the memoryless `sqrt(lam)`.
#
# The gain is paid for in time: one useful carrier every `n tau + tau_E`.
# `Gamma` compares the resulting quantum rate with the memoryless one.

# %%
import numpy as np

from qmemchan import AttenuationProtocol, gbar, iterated_gbar, optimize_gbar
from qmemchan.cli import SweepConfig, run_sweep

proto = AttenuationProtocol(n=1, tau=0.5, p=0.0, lam=0.01)
print("closed form:", gbar(proto), " iteration:", iterated_gbar(proto), " memoryless:", np.sqrt(0.01))

# %%
print(optimize_gbar(0.01, n=3, tau=0.3))

# %% [markdown]
# Sweep the whole grid and locate the best protocol.

# %%
cfg = SweepConfig(lambda_values=[0.01], n_values=list(range(1, 11)), tau_over_tauE=(0.02, 1.0, 50)).validate()
rows = run_sweep(cfg)
best = max(rows, key=lambda r: r["gamma"])
print({k: round(v, 4) if isinstance(v, float) else v for k, v in best.items()})

# %% [markdown]
# Plotting needs matplotlib (the `tutorials` extra).

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    taus = cfg.tau_grid()
    fig, ax = plt.subplots()
    for n in (1, 2, 5, 10):
        ax.plot(taus, [r["gamma"] for r in rows if r["n"] == n], label=f"n = {n}")
    ax.axhline(1.0, color="grey", lw=0.5)
    ax.set_xlabel("tau / tau_E")
    ax.set_ylabel("Gamma")
    ax.legend()
    fig.savefig("gamma_lambda_0.01.png", dpi=120)
    print("saved gamma_lambda_0.01.png")

# %% [markdown]
# Weak coupling leaves nothing to gain.

# %%
weak = SweepConfig(lambda_values=[0.81], n_values=list(range(1, 11)), tau_over_tauE=(0.02, 1.0, 50)).validate()
print("max Gamma at lam = 0.81:", max(r["gamma"] for r in run_sweep(weak)))
