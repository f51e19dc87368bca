"""Information measures, capacities and transmission rates.

Rates are capacities per unit time.  For a regular sequence (well-defined mean
spacing ``tau_s``) the rate is ``capacity / tau_s``; otherwise only the
interval ``[capacity / tau'', capacity / tau']`` is known, where ``tau'`` and
``tau''`` are the smallest and largest long-run mean spacings.

Exact capacities of correlated multi-carrier maps are out of reach, so
searches over sequences use single-copy coherent and Holevo information,
which are lower bounds.  The phase damping channel is the exception: its
capacities are known in closed form and are used directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .attenuation import AttenuationProtocol, gbar, modified_channel, optimize_gbar
from .channels import (
    MAX_JOINT_DIM,
    CarrierSequence,
    EnvironmentModel,
    grouped_map,
    memoryless_map,
)
from .qcore import (
    QuantumChannel,
    binary_entropy,
    entropy_of_spectrum,
    purify,
    von_neumann_entropy,
)

REGIMES = ("memoryless", "perfect", "grouped", "attenuation", "bound")
_PAULI = np.array(
    [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


# ---------------------------------------------------------------------------
# sequence analytics


@dataclass(frozen=True)
class SequenceStats:
    tau_prime: float
    tau_double_prime: float
    regular: bool
    tau_s: float | None


def count_carriers(s: CarrierSequence, t: float) -> int:
    """Number of carriers entering strictly before time ``t`` (first at t = 0)."""
    if t <= 0:
        return 0
    if s.periodic:
        period = sum(s.pattern)
        full = int(t // period)
        count = full * len(s.pattern)
        start = full * period
        times = start + np.concatenate([[0.0], np.cumsum(s.pattern[:-1])])
        return count + int(np.sum(times < t))
    times = s.entry_times(len(s.pattern) + 1)
    return int(np.sum(times < t))


def sequence_stats(s: CarrierSequence, tail: float = 0.5) -> SequenceStats:
    """Long-run mean spacings of a sequence.

    Periodic patterns have exact limits (the pattern mean).  For a finite
    pattern the running means ``(tau_1 + ... + tau_k) / k`` over the last
    ``tail`` fraction of ``k`` are used as finite-horizon estimates.
    """
    if s.periodic:
        m = float(np.mean(s.pattern))
        return SequenceStats(m, m, True, m)
    means = np.cumsum(s.pattern) / np.arange(1, len(s.pattern) + 1)
    start = min(int(math.floor(len(means) * (1 - tail))), len(means) - 1)
    window = means[start:]
    lo, hi = float(window.min()), float(window.max())
    regular = hi - lo <= 1e-12
    return SequenceStats(lo, hi, regular, lo if regular else None)


# ---------------------------------------------------------------------------
# information measures


def dephasing_quantum_capacity(g: float) -> float:
    """Q(P_g) = 1 - H2((1 + g) / 2)."""
    if abs(g) > 1.0 + 1e-15:
        raise ValueError(f"|g| must not exceed 1, got {g}")
    return max(0.0, 1.0 - binary_entropy(0.5 + 0.5 * min(abs(g), 1.0)))


def dephasing_classical_capacity(g: float) -> float:
    """Populations survive unchanged, so one bit per use for every g."""
    return 1.0


def coherent_information(channel: QuantumChannel, rho: np.ndarray, purification: np.ndarray | None = None) -> float:
    """S(Phi(rho)) - S((Phi (x) id)(Psi_rho)).

    ``purification`` may be any purification of ``rho`` with the system factor
    first; the canonical one is used by default.
    """
    rho = np.asarray(rho, dtype=complex)
    d = channel.dim_in
    if rho.shape != (d, d):
        raise ValueError("input state does not match the channel")
    psi = purify(rho) if purification is None else np.asarray(purification, dtype=complex).ravel()
    if psi.size % d:
        raise ValueError("purification dimension is not a multiple of the input dimension")
    psi = psi.reshape(d, -1)
    # (K_k (x) I)|psi>, one row per Kraus operator
    vecs = np.einsum("kab,bc->kac", channel.kraus, psi).reshape(len(channel.kraus), -1)
    gram = vecs.conj() @ vecs.T
    s_joint = entropy_of_spectrum(np.clip(np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)), 0, 1))
    return von_neumann_entropy(channel.apply(rho)) - s_joint


def check_ensemble(ens) -> list[tuple[float, np.ndarray]]:
    items = [(float(p), np.asarray(r, dtype=complex)) for p, r in ens]
    if not items:
        raise ValueError("empty ensemble")
    probs = np.array([p for p, _ in items])
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("ensemble probabilities must be non-negative and sum to one")
    return items


def holevo_information(channel: QuantumChannel, ens) -> float:
    """S(Phi(sum p_k R_k)) - sum p_k S(Phi(R_k))."""
    items = check_ensemble(ens)
    outs = [channel.apply(r) for _, r in items]
    avg = sum(p * o for (p, _), o in zip(items, outs))
    chi = von_neumann_entropy(avg) - sum(p * von_neumann_entropy(o) for (p, _), o in zip(items, outs))
    return max(chi, 0.0)


def bloch_state(r: Sequence[float]) -> np.ndarray:
    x, y, z = r
    return 0.5 * (_PAULI[0] + x * _PAULI[1] + y * _PAULI[2] + z * _PAULI[3])


def _batched_entropy(mats: np.ndarray) -> np.ndarray:
    w = np.clip(np.linalg.eigvalsh(0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))), 0.0, 1.0)
    safe = np.where(w > 1e-12, w, 1.0)
    return -np.sum(np.where(w > 1e-12, w * np.log2(safe), 0.0), axis=-1)


def _coherent_info_batch(channel: QuantumChannel, rs: np.ndarray) -> np.ndarray:
    """Coherent information for many Bloch vectors via the complementary output."""
    basis = [0.5 * p for p in _PAULI]
    out = np.array([channel.apply(b) for b in basis])
    env = np.array([channel.environment_output(b) for b in basis])
    coeff = np.column_stack([np.ones(len(rs)), rs])
    outs = np.einsum("nk,kab->nab", coeff, out)
    envs = np.einsum("nk,kab->nab", coeff, env)
    return _batched_entropy(outs) - _batched_entropy(envs)


def _project_ball(r: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(r)
    return r / norm if norm > 1 else r


def one_shot_q_lower(channel: QuantumChannel, grid: int = 11, refine: bool = True, return_state: bool = False):
    """Maximum single-use coherent information of a qubit channel.

    A cubic grid of Bloch vectors (points outside the ball dropped) is
    followed by a Nelder-Mead refinement from the best point.
    """
    if channel.dim_in != 2:
        raise ValueError("one_shot_q_lower handles qubit-input channels only")
    axis = np.linspace(-1.0, 1.0, grid)
    pts = np.array(np.meshgrid(axis, axis, axis, indexing="ij")).reshape(3, -1).T
    pts = pts[np.linalg.norm(pts, axis=1) <= 1.0 + 1e-12]
    vals = _coherent_info_batch(channel, pts)
    i = int(np.argmax(vals))
    best_r, best = pts[i], float(vals[i])
    if refine:
        res = minimize(
            lambda r: -_coherent_info_batch(channel, _project_ball(r)[None])[0],
            best_r,
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-12, "initial_simplex": best_r + 0.05 * np.vstack([np.zeros(3), np.eye(3)])},
        )
        if -res.fun > best:
            best_r, best = _project_ball(res.x), float(-res.fun)
    best = max(best, 0.0)
    return (best, bloch_state(best_r)) if return_state else best


def one_shot_c_lower(channel: QuantumChannel, grid: int = 21, return_basis: bool = False):
    """Holevo information of the best equiprobable pair of orthogonal pure inputs.

    Qubit channels only; directions are scanned on a (theta, phi) grid.
    """
    if channel.dim_in != 2:
        raise ValueError("one_shot_c_lower handles qubit-input channels only")
    best, best_n = -1.0, None
    for th in np.linspace(0.0, np.pi / 2, grid):
        for ph in np.linspace(0.0, np.pi, grid) if th > 0 else [0.0]:
            n = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
            chi = holevo_information(channel, [(0.5, bloch_state(n)), (0.5, bloch_state(-n))])
            if chi > best + 1e-15:
                best, best_n = chi, n
    return (best, best_n) if return_basis else best


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class RateReport:
    r_q: float
    r_c: float
    regime: str
    upper_bound: float
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")


def rate_regular(capacity: float, tau_s) -> float:
    """capacity / tau_s for a regular sequence.

    ``tau_s`` may be a number or :class:`SequenceStats`; irregular stats are
    refused, use :func:`rate_bounds` for those.
    """
    if isinstance(tau_s, SequenceStats):
        if not tau_s.regular:
            raise ValueError("sequence is not regular; use rate_bounds for the rate interval")
        tau_s = tau_s.tau_s
    if tau_s <= 0:
        raise ValueError("tau_s must be positive")
    return capacity / tau_s


def rate_bounds(capacity: float, stats: SequenceStats) -> tuple[float, float]:
    """``(capacity / tau'', capacity / tau')``."""
    return capacity / stats.tau_double_prime, capacity / stats.tau_prime


def rate_attenuation(proto: AttenuationProtocol) -> RateReport:
    """Rates of the attenuation layout: one message carrier per n tau + tau_E."""
    g = gbar(proto)
    period = proto.n * proto.tau + proto.tau_e
    return RateReport(
        r_q=dephasing_quantum_capacity(g) / period,
        r_c=dephasing_classical_capacity(g) / period,
        regime="attenuation",
        upper_bound=(proto.n + 1) * math.log2(2) / period,
        details={"gbar": g, "period": period},
    )


def gamma_point(lam: float, n: int, tau: float, tau_e: float = 1.0) -> dict:
    """Optimized attenuation protocol against the memoryless sequence at tau_E."""
    g0 = math.sqrt(lam)
    q0 = dephasing_quantum_capacity(g0)
    if q0 <= 0:
        raise ValueError("memoryless quantum capacity vanishes (lam = 0); the ratio is undefined")
    if n == 0:
        p_opt, g = 1.0, g0
    else:
        p_opt, g = optimize_gbar(lam, n, tau, tau_e)
    rq_bar = dephasing_quantum_capacity(g) / (n * tau + tau_e)
    rq0 = q0 / tau_e
    return {
        "lambda": lam,
        "n": n,
        "tau_over_tauE": tau / tau_e,
        "p_opt": p_opt,
        "gbar": g,
        "g0": g0,
        "gamma": rq_bar / rq0,
        "rq_bar": rq_bar,
        "rq_s0": rq0,
    }


def gamma_ratio(lam: float, n: int, tau: float, tau_e: float = 1.0) -> float:
    return gamma_point(lam, n, tau, tau_e)["gamma"]


# ---------------------------------------------------------------------------
# sequence search


def _controlled_blocks(env: EnvironmentModel) -> list[np.ndarray] | None:
    """LE unitaries V_k if the coupling is sum_k |k><k| (x) V_k, else None."""
    d, de = env.carrier_dim, env.env_dim
    u4 = env.coupling.reshape(d, de, d, de)
    for a in range(d):
        for b in range(d):
            if a != b and np.max(np.abs(u4[a, :, b, :])) > 1e-14:
                return None
    return [u4[k, :, k, :] for k in range(d)]


def _relax_superop(channel: QuantumChannel) -> np.ndarray:
    k = channel.kraus
    return np.einsum("kab,kcd->acbd", k, k.conj())


def group_coherent_information(env: EnvironmentModel, intra: Sequence[float]) -> float:
    """Coherent information of a group map at the maximally mixed input.

    Controlled couplings leave carrier populations untouched, so the output is
    maximally mixed and the joint reference/output state lives on the
    ``|k>|k>`` subspace with Gram matrix ``G[k, k']`` of the conditional LE
    evolutions.  That Gram matrix is built by carrying LE blocks forward, which
    reaches larger groups than the Kraus route used for other couplings.
    """
    m = len(intra) + 1
    d = env.carrier_dim
    blocks = _controlled_blocks(env)
    if blocks is None:
        ch = grouped_map(env, intra)
        return coherent_information(QuantumChannel(ch.kraus, check=False), np.eye(d**m) / d**m)
    if d ** (2 * m) * env.env_dim**2 > 4 * MAX_JOINT_DIM**2:
        raise ValueError("group too large")
    de = env.env_dim
    x = env.sigma0[None, None]  # (K, K', de, de)
    v = np.array(blocks)
    for j in range(m):
        # X[(k,a),(k',b)] = V_a X[k,k'] V_b^dag
        x = np.einsum("aef,klfg,bhg->kalbeh", v, x, v.conj())
        x = x.reshape(x.shape[0] * d, x.shape[2] * d, de, de)
        if j < m - 1:
            sop = _relax_superop(env.relaxation(intra[j]))
            x = np.einsum("acbd,klbd->klac", sop, x)
    gram = np.einsum("klee->kl", x) / d**m
    w = np.clip(np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)), 0, 1)
    return m * math.log2(d) - entropy_of_spectrum(w)


def _max_group_size(env: EnvironmentModel) -> int:
    m = 1
    while env.carrier_dim ** (m + 1) * env.env_dim <= MAX_JOINT_DIM:
        m += 1
    return m


def _first_max(cands, k: int, rtol: float = 1e-12):
    """Earliest candidate within ``rtol`` of the maximum (candidate order is the tie-break)."""
    top = max(c[k] for c in cands)
    return next(c for c in cands if c[k] >= top - rtol * max(abs(top), 1.0))


def best_rate_search(
    tau_min: float,
    env: EnvironmentModel,
    budget: int = 5,
    m_max: int | None = None,
    tau_points: int = 8,
    p_points: int = 6,
) -> RateReport:
    """Lower bound on the best single-sequence rates with spacings >= tau_min.

    Candidates are (i) groups of ``m`` carriers spaced by ``tau_min`` and
    separated by ``max(tau_min, tau_E)`` (only when ``tau_min < tau_E``), rated with single-copy coherent
    information at the maximally mixed input (``m = 1`` uses the optimized
    one-shot bounds), and (ii) attenuation layouts with ``1 <= n <= budget``
    sacrificial carriers in diagonal states, spacing ``tau`` in
    ``[tau_min, tau_E)``.
    """
    if tau_min <= 0:
        raise ValueError("tau_min must be positive")
    tau_e = env.tau_e
    d = env.carrier_dim
    upper = math.log2(d) / tau_min
    gap = max(tau_min, tau_e)
    m_max = _max_group_size(env) if m_max is None else m_max
    cands = []  # (r_q, r_c, regime, params)

    single = memoryless_map(env)
    q1 = one_shot_q_lower(single) if d == 2 else coherent_information(single, np.eye(d) / d)
    c1 = one_shot_c_lower(single) if d == 2 else q1
    cands.append((q1 / gap, max(c1, q1) / gap, "memoryless", {"m": 1}))

    # groups spaced >= tau_E are products of single-carrier maps and add nothing
    controlled = _controlled_blocks(env) is not None
    for m in range(2, m_max + 1) if tau_min < tau_e else ():
        intra = [tau_min] * (m - 1)
        try:
            j = group_coherent_information(env, intra)
        except (ValueError, MemoryError):
            break
        period = (m - 1) * tau_min + gap
        # controlled couplings pass computational-basis products untouched: m log2 d bits
        c = max(j, m * math.log2(d)) if controlled else j
        cands.append((j / period, c / period, "grouped", {"m": m}))

    if tau_min < tau_e and d == 2:
        for n in range(1, budget + 1):
            for tau in np.linspace(tau_min, tau_e, tau_points, endpoint=False):
                period = n * tau + tau_e
                for p in np.linspace(0.0, 1.0, p_points):
                    ch = modified_channel(env, np.diag([p, 1 - p]).astype(complex), tau, n)
                    q = one_shot_q_lower(ch, refine=False)
                    c = max(one_shot_c_lower(ch, grid=7), q)
                    cands.append((q / period, c / period, "attenuation", {"n": n, "tau": float(tau), "p": float(p)}))

    best_q = _first_max(cands, 0)
    best_c = _first_max(cands, 1)
    return RateReport(
        r_q=best_q[0],
        r_c=best_c[1],
        regime=best_q[2],
        upper_bound=upper,
        details={"quantum_argmax": best_q[3], "classical_argmax": best_c[3], "candidates": len(cands)},
    )
