"""Markov-chain form of the sequence map for decoherent LE relaxations.

When every relaxation step kills LE coherences in a fixed basis ``{|l>}`` and
sends ``|l><l|`` to a pure post-relaxation state ``|psi_l(tau)>``, the
n-carrier map becomes a mixture over LE trajectories ``l_1, ..., l_n``:

    Phi(R) = sum_paths p(l_1) p(l_2|l_1) ... M_path R M_path^dag

with single-carrier operators ``A_{l'} = <l'|U|start>`` and ``M = A / sqrt(p)``.
The probabilities are reported with ``Tr(A^dag A) / D`` by default so that the
conditionals sum to one; ``convention="trace"`` keeps the bare trace instead.
Both give the same reconstruction because ``p`` cancels against ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .channels import CarrierSequence, EnvironmentModel
from .qcore import QuantumChannel, is_unitary, projector, tensor

PROB_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class DecoherentRelaxation:
    """Basis (columns), post-relaxation states and stationary basis index."""

    basis: np.ndarray
    post_state: Callable[[int, float], np.ndarray]
    stationary_index: int = 0

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if not is_unitary(b):
            raise ValueError("basis columns must be orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def psi(self, index: int, tau: float) -> np.ndarray:
        v = np.asarray(self.post_state(index, tau), dtype=complex).ravel()
        return v / np.linalg.norm(v)


def decoherent_channel(spec: DecoherentRelaxation, tau: float) -> QuantumChannel:
    """E_tau(|l><l'|) = delta_{ll'} |psi_l(tau)><psi_l(tau)|."""
    kraus = [np.outer(spec.psi(l, tau), spec.basis[:, l].conj()) for l in range(spec.dim)]
    return QuantumChannel(np.array(kraus))


def qubit_decoherent_relaxation(tau_e: float = 1.0) -> DecoherentRelaxation:
    """Qubit LE: |0> is stationary, |1> rotates onto |0> linearly in time.

    ``psi_1(tau) = cos(theta)|0> + sin(theta)|1>`` with
    ``theta = (pi/2) max(0, 1 - tau/tau_e)``.
    """

    def post(index: int, tau: float) -> np.ndarray:
        if index == 0:
            return np.array([1.0, 0.0])
        theta = 0.5 * np.pi * max(0.0, 1.0 - tau / tau_e)
        return np.array([np.cos(theta), np.sin(theta)])

    return DecoherentRelaxation(np.eye(2), post, 0)


def decoherent_model(
    coupling: np.ndarray, spec: DecoherentRelaxation, carrier_dim: int, tau_e: float = 1.0
) -> EnvironmentModel:
    """Environment model whose relaxation is the decoherent family ``spec``."""
    l0 = spec.stationary_index
    for l in range(spec.dim):
        if abs(abs(np.vdot(spec.basis[:, l0], spec.psi(l, tau_e))) - 1.0) > 1e-12:
            raise ValueError("post-relaxation states must reach the stationary state at tau_e")
    return EnvironmentModel(
        carrier_dim=carrier_dim,
        env_dim=spec.dim,
        coupling=coupling,
        relaxation=lambda tau: decoherent_channel(spec, tau),
        sigma0=projector(spec.basis[:, l0]),
        tau_e=tau_e,
        decoherent=spec,
    )


@dataclass(frozen=True, eq=False)
class MarkovDecomposition:
    """Operator and probability tables of the Markov form.

    ``first_ops[l]`` is ``A_l``; ``step_ops[j][l_next, l_prev]`` is the operator
    for carrier ``j + 2``.  ``first_probs`` and ``step_probs`` hold the matching
    probabilities and ``first_M`` / ``step_M`` the normalized operators, set to
    zero where the probability is below :data:`PROB_FLOOR`.
    """

    carrier_dim: int
    env_dim: int
    n: int
    convention: str
    first_ops: np.ndarray
    first_probs: np.ndarray
    step_ops: tuple[np.ndarray, ...]
    step_probs: tuple[np.ndarray, ...]
    first_M: np.ndarray
    step_M: tuple[np.ndarray, ...]

    @property
    def prob_scale(self) -> float:
        return 1.0 if self.convention == "normalized" else float(self.carrier_dim)

    def normalization_error(self) -> float:
        """Largest deviation of sum_{l_next} p(l_next | l_prev) from its target."""
        errs = [abs(self.first_probs.sum() - self.prob_scale)]
        errs += [float(np.max(np.abs(p.sum(axis=0) - self.prob_scale))) for p in self.step_probs]
        return max(errs)

    def incoming_sums(self) -> list[np.ndarray]:
        """sum_{l_prev} p(l_next | l_prev) for every step (diagnostic only)."""
        return [p.sum(axis=1) for p in self.step_probs]

    def paths(self):
        """Yield ``(weight, kraus)`` for every LE trajectory that survives the floor."""
        d = self.env_dim
        for path in product(range(d), repeat=self.n):
            w = self.first_probs[path[0]]
            if w <= PROB_FLOOR:
                continue
            ops = [self.first_M[path[0]]]
            for j in range(1, self.n):
                pj = self.step_probs[j - 1][path[j], path[j - 1]]
                if pj <= PROB_FLOOR:
                    break
                w = w * pj
                ops.append(self.step_M[j - 1][path[j], path[j - 1]])
            else:
                yield w, tensor(*ops)


def _le_blocks(u: np.ndarray, d: int, de: int, bra: np.ndarray, ket_vec: np.ndarray) -> np.ndarray:
    """Carrier operator <bra|_LE U |ket>_LE."""
    u4 = u.reshape(d, de, d, de)
    return np.einsum("e,aebf,f->ab", bra.conj(), u4, ket_vec)


def markov_decompose(
    env: EnvironmentModel, s: CarrierSequence, n: int, convention: str = "normalized"
) -> MarkovDecomposition:
    spec = env.decoherent
    if not isinstance(spec, DecoherentRelaxation):
        raise ValueError("the environment relaxation is not decoherent")
    if convention not in ("normalized", "trace"):
        raise ValueError(f"unknown probability convention {convention!r}")
    if n < 1:
        raise ValueError("need at least one carrier")
    l0 = spec.stationary_index
    if np.max(np.abs(env.sigma0 - projector(spec.basis[:, l0]))) > 1e-12:
        raise ValueError("sigma0 must be the stationary basis state")
    d, de = env.carrier_dim, env.env_dim
    scale = 1.0 / d if convention == "normalized" else 1.0
    u = env.coupling
    basis = spec.basis

    def normalize(ops, probs):
        m = np.zeros_like(ops)
        ok = probs > PROB_FLOOR
        m[ok] = ops[ok] / np.sqrt(probs[ok])[..., None, None]
        return m

    first = np.array([_le_blocks(u, d, de, basis[:, l], basis[:, l0]) for l in range(de)])
    first_p = scale * np.einsum("lab,lab->l", first.conj(), first).real
    step_ops, step_probs, step_m = [], [], []
    for tau in s.intervals(n - 1):
        ops = np.array(
            [[_le_blocks(u, d, de, basis[:, ln], spec.psi(lp, tau)) for lp in range(de)] for ln in range(de)]
        )
        probs = scale * np.einsum("xyab,xyab->xy", ops.conj(), ops).real
        step_ops.append(ops)
        step_probs.append(probs)
        step_m.append(normalize(ops, probs))
    return MarkovDecomposition(
        carrier_dim=d,
        env_dim=de,
        n=n,
        convention=convention,
        first_ops=first,
        first_probs=first_p,
        step_ops=tuple(step_ops),
        step_probs=tuple(step_probs),
        first_M=normalize(first, first_p),
        step_M=tuple(step_m),
    )


def markov_reconstruct(decomp: MarkovDecomposition, rho: np.ndarray) -> np.ndarray:
    """Evaluate the path sum on an n-carrier input state."""
    rho = np.asarray(rho, dtype=complex)
    dn = decomp.carrier_dim**decomp.n
    if rho.shape != (dn, dn):
        raise ValueError(f"expected a {dn}x{dn} input, got {rho.shape}")
    out = np.zeros_like(rho)
    for w, k in decomp.paths():
        out += w * (k @ rho @ k.conj().T)
    return out


def markov_channel(decomp: MarkovDecomposition) -> QuantumChannel:
    """The path sum as an explicit Kraus set."""
    kraus = [np.sqrt(w) * k for w, k in decomp.paths()]
    return QuantumChannel(np.array(kraus), check=False)
