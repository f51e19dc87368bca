"""Carrier/environment collision model and the channels it generates.

A train of carriers hits a small local environment (LE) one at a time.  Each
hit is the same unitary ``U`` on carrier (x) LE; between hits the LE relaxes
through a CPT map ``E_tau`` that depends on the waiting time.  Tracing the LE
out after ``n`` hits gives an ``n``-carrier channel whose memory depends on the
spacings: long waits (``tau >= tau_E``) reset the LE and the channel factorizes,
zero waits keep every correlation.

The qubit instance used throughout is a controlled coupling
``|0><0| (x) I + |1><1| (x) Theta(lam)`` with amplitude-damping relaxation of
the LE towards ``|0>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .qcore import (
    TOL,
    QuantumChannel,
    choi_distance,
    check_density,
    is_unitary,
    projector,
    tensor_channels,
)

#: Largest joint carriers (x) LE dimension handled explicitly.
MAX_JOINT_DIM = 4096
#: Largest number of stored complex entries when Kraus operators of a
#: composite map are materialized.
MAX_KRAUS_ENTRIES = 2**27
_PRUNE = 1e-14


# ---------------------------------------------------------------------------
# elementary qubit channels


def coupling_block(lam: float) -> np.ndarray:
    """The 2x2 LE transformation triggered by a carrier in |1>."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"coupling lambda must lie in [0, 1], got {lam}")
    a, b = np.sqrt(lam), np.sqrt(1.0 - lam)
    return np.array([[a, b], [b, -a]], dtype=complex)


def qubit_control_coupling(lam: float) -> np.ndarray:
    """4x4 controlled unitary on carrier (x) LE, carrier first."""
    theta = coupling_block(lam)
    u = np.zeros((4, 4), dtype=complex)
    u[:2, :2] = np.eye(2)
    u[2:, 2:] = theta
    return u


def amplitude_damping(eta: float) -> QuantumChannel:
    """Decay |1> -> |0> with probability 1 - eta; coherences scale by sqrt(eta)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"amplitude damping eta must lie in [0, 1], got {eta}")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(eta)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(1.0 - eta)], [0.0, 0.0]], dtype=complex)
    return QuantumChannel([k0, k1])


def eta_profile(tau: float, tau_e: float) -> float:
    """Piecewise-linear survival 1 - tau/tau_E, clamped to 0 beyond tau_E."""
    if tau < 0:
        raise ValueError("waiting time must be non-negative")
    if tau_e <= 0:
        raise ValueError("relaxation time must be positive")
    return 1.0 - tau / tau_e if tau < tau_e else 0.0


def phase_damping(g: float) -> QuantumChannel:
    """Qubit channel keeping populations and multiplying coherences by ``g``."""
    if abs(g) > 1.0 + 1e-15:
        raise ValueError(f"|g| must not exceed 1 (got {g}); the map would not be CP")
    g = float(np.clip(g, -1.0, 1.0))
    z = np.diag([1.0, -1.0]).astype(complex)
    return QuantumChannel([np.sqrt((1 + g) / 2) * np.eye(2), np.sqrt((1 - g) / 2) * z])


# ---------------------------------------------------------------------------
# model records


@dataclass(frozen=True, eq=False)
class EnvironmentModel:
    """Coupling unitary, relaxation family and stationary state of the LE.

    ``relaxation`` maps a waiting time (same units as ``tau_e``) to a CPT map
    on the LE.  ``decoherent`` optionally carries the basis/post-state data
    needed for the Markov decomposition (see :mod:`qmemchan.markov`).
    """

    carrier_dim: int
    env_dim: int
    coupling: np.ndarray
    relaxation: Callable[[float], QuantumChannel]
    sigma0: np.ndarray
    tau_e: float = 1.0
    decoherent: object | None = field(default=None, repr=False)

    def __post_init__(self):
        u = np.asarray(self.coupling, dtype=complex)
        d = self.carrier_dim * self.env_dim
        if u.shape != (d, d):
            raise ValueError(f"coupling must be {d}x{d}, got {u.shape}")
        if not is_unitary(u):
            raise ValueError("coupling is not unitary")
        object.__setattr__(self, "coupling", u)
        object.__setattr__(self, "sigma0", check_density(self.sigma0, "sigma0"))
        if self.sigma0.shape != (self.env_dim, self.env_dim):
            raise ValueError("sigma0 has the wrong dimension")
        if self.tau_e <= 0:
            raise ValueError("tau_e must be positive")


def qubit_dephasing_model(
    lam: float,
    tau_e: float = 1.0,
    eta: Callable[[float, float], float] = eta_profile,
) -> EnvironmentModel:
    """The qubit carrier / qubit LE example with amplitude-damping relaxation."""
    return EnvironmentModel(
        carrier_dim=2,
        env_dim=2,
        coupling=qubit_control_coupling(lam),
        relaxation=lambda tau: amplitude_damping(eta(tau, tau_e)),
        sigma0=projector([1.0, 0.0]),
        tau_e=tau_e,
    )


def environment_errors(env: EnvironmentModel, taus: Sequence[float] | None = None) -> dict[str, float]:
    """Worst-case violations of the model assumptions.

    Keys: ``unitarity``, ``stationarity`` (E_tau(sigma0) = sigma0),
    ``full_relaxation`` (E_tau(X) = sigma0 Tr X for tau >= tau_E) and
    ``identity_at_zero``.
    """
    taus = [0.0, 0.25, 0.5, 1.0, 2.0] if taus is None else list(taus)
    u = env.coupling
    errs = {"unitarity": float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))}
    errs["stationarity"] = max(
        float(np.max(np.abs(env.relaxation(t * env.tau_e).apply(env.sigma0) - env.sigma0)))
        for t in taus
    )
    d = env.env_dim
    worst = 0.0
    for t in (t for t in taus if t >= 1.0):
        ch = env.relaxation(t * env.tau_e)
        for i in range(d):
            for j in range(d):
                x = np.zeros((d, d), dtype=complex)
                x[i, j] = 1.0
                worst = max(worst, float(np.max(np.abs(ch.apply(x) - env.sigma0 * np.trace(x)))))
    errs["full_relaxation"] = worst
    errs["identity_at_zero"] = choi_distance(env.relaxation(0.0), QuantumChannel.identity(d))
    return errs


@dataclass(frozen=True)
class CarrierSequence:
    """Waiting times between consecutive carriers.

    ``pattern[j]`` is the gap between carrier ``j+1`` and carrier ``j+2``.  A
    periodic sequence repeats its pattern forever; a finite one describes
    ``len(pattern) + 1`` carriers.
    """

    pattern: tuple[float, ...]
    periodic: bool = True

    def __post_init__(self):
        pat = tuple(float(t) for t in self.pattern)
        if not pat:
            raise ValueError("a carrier sequence needs at least one interval")
        if any(not np.isfinite(t) or t <= 0 for t in pat):
            raise ValueError("all intervals must be positive and finite")
        object.__setattr__(self, "pattern", pat)

    @classmethod
    def uniform(cls, tau: float) -> "CarrierSequence":
        return cls((tau,), periodic=True)

    @property
    def n_carriers(self) -> float:
        return np.inf if self.periodic else len(self.pattern) + 1

    def intervals(self, count: int) -> list[float]:
        """The first ``count`` intervals."""
        if count < 0:
            raise ValueError("count must be non-negative")
        if self.periodic:
            reps = -(-count // len(self.pattern))
            return list((self.pattern * max(reps, 1))[:count])
        if count > len(self.pattern):
            raise ValueError(f"finite sequence has only {len(self.pattern)} intervals")
        return list(self.pattern[:count])

    def entry_times(self, count: int) -> np.ndarray:
        """Entry times of the first ``count`` carriers, starting at t = 0."""
        return np.concatenate([[0.0], np.cumsum(self.intervals(count - 1))]) if count > 0 else np.zeros(0)


# ---------------------------------------------------------------------------
# sequence composition


def _check_budget(env: EnvironmentModel, n: int) -> None:
    if n < 1:
        raise ValueError("need at least one carrier")
    if env.carrier_dim**n * env.env_dim > MAX_JOINT_DIM:
        raise ValueError(
            f"{n} carriers of dimension {env.carrier_dim} with a {env.env_dim}-level LE "
            f"exceed the joint dimension budget {MAX_JOINT_DIM}"
        )


def _local_op(op: np.ndarray, t: np.ndarray, axes: tuple[int, int], dims: tuple[int, int]) -> np.ndarray:
    """Apply ``op`` (acting on two tensor factors) to the given axes of ``t``."""
    op4 = op.reshape(dims + dims)
    out = np.tensordot(op4, t, axes=([2, 3], list(axes)))
    return np.moveaxis(out, [0, 1], list(axes))


def _sequence_kraus(env: EnvironmentModel, intervals: Sequence[float]) -> np.ndarray:
    n = len(intervals) + 1
    d, de = env.carrier_dim, env.env_dim
    dn = d**n
    w, v = np.linalg.eigh(env.sigma0)
    keep = w > TOL.eig_floor
    # rows: (carriers..., LE); columns: input carriers
    t = np.einsum("ab,kl->kabl", np.eye(dn), (v[:, keep] * np.sqrt(w[keep])).T)
    t = np.moveaxis(t, 3, 2).reshape((int(keep.sum()),) + (d,) * n + (de, dn))
    le_axis = 1 + n
    for j in range(n):
        t = _local_op(env.coupling, t, (1 + j, le_axis), (d, de))
        if j == n - 1:
            break
        ek = env.relaxation(intervals[j]).kraus
        t = np.tensordot(ek, t, axes=([2], [le_axis]))  # (r, de, b, ...)
        t = np.moveaxis(t, 1, 2 + n).reshape((-1,) + (d,) * n + (de, dn))
        norms = np.sqrt(np.sum(np.abs(t.reshape(t.shape[0], -1)) ** 2, axis=1))
        t = t[norms > _PRUNE]
        if t.size * de > MAX_KRAUS_ENTRIES:
            raise MemoryError("Kraus representation of this composite map is too large")
    t = np.moveaxis(t, le_axis, 1)
    return t.reshape(-1, dn, dn)


def _sequence_state(env: EnvironmentModel, intervals: Sequence[float], rho: np.ndarray) -> np.ndarray:
    n = len(intervals) + 1
    d, de = env.carrier_dim, env.env_dim
    dims = (d,) * n + (de,)
    joint = np.kron(rho, env.sigma0).reshape(dims + dims)
    m = n + 1
    le = n
    for j in range(n):
        u = env.coupling
        joint = _local_op(u, joint, (j, le), (d, de))
        joint = _local_op(u.conj(), joint, (m + j, m + le), (d, de))
        if j == n - 1:
            break
        acc = np.zeros_like(joint)
        for k in env.relaxation(intervals[j]).kraus:
            tmp = np.moveaxis(np.tensordot(k, joint, axes=([1], [le])), 0, le)
            acc += np.moveaxis(np.tensordot(k.conj(), tmp, axes=([1], [m + le])), 0, m + le)
        joint = acc
    joint = np.trace(joint, axis1=le, axis2=m + le)
    dn = d**n
    return joint.reshape(dn, dn)


class SequenceChannel(QuantumChannel):
    """The n-carrier map generated by a list of waiting times.

    ``apply`` propagates the joint carriers (x) LE state directly, which stays
    cheap up to the joint dimension budget; the Kraus operators are only built
    on first access.
    """

    def __init__(self, env: EnvironmentModel, intervals: Sequence[float]):
        intervals = [float(t) for t in intervals]
        if any(t < 0 for t in intervals):
            raise ValueError("waiting times must be non-negative")
        n = len(intervals) + 1
        _check_budget(env, n)
        self.env = env
        self.intervals = tuple(intervals)
        self.n = n
        self.dim_in = self.dim_out = env.carrier_dim**n
        self._kraus = None

    @property
    def kraus(self) -> np.ndarray:
        if self._kraus is None:
            self._kraus = _sequence_kraus(self.env, self.intervals)
        return self._kraus

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"input of shape {rho.shape} for a channel on {self.dim_in} levels")
        return _sequence_state(self.env, self.intervals, rho)

    __call__ = apply


def memoryless_map(env: EnvironmentModel) -> QuantumChannel:
    """Single-carrier map Tr_LE U (rho (x) sigma0) U^dag."""
    return QuantumChannel(SequenceChannel(env, []).kraus)


def compose_sequence(env: EnvironmentModel, s: CarrierSequence, n: int) -> SequenceChannel:
    """Joint map on the first ``n`` carriers of ``s``.

    Interactions and relaxations alternate U_1, E_tau1, U_2, ..., U_n; there is
    no relaxation after the last hit.
    """
    _check_budget(env, n)
    return SequenceChannel(env, s.intervals(n - 1))


def perfect_memory_map(env: EnvironmentModel, n: int) -> SequenceChannel:
    """``n`` consecutive hits with no relaxation in between."""
    return SequenceChannel(env, [0.0] * (n - 1))


def grouped_map(env: EnvironmentModel, intra_intervals: Sequence[float]) -> SequenceChannel:
    """Map of one group of ``len(intra_intervals) + 1`` carriers."""
    return SequenceChannel(env, intra_intervals)


def product_of_groups(env: EnvironmentModel, groups: Sequence[Sequence[float]]) -> QuantumChannel:
    """Tensor product of the group maps (valid when groups are >= tau_E apart)."""
    return tensor_channels(*(QuantumChannel(grouped_map(env, g).kraus, check=False) for g in groups))
