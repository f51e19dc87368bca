"""Dense linear algebra and quantum-information primitives.

Everything here works on plain ``numpy`` arrays of complex dtype.  States are
square matrices (density operators) or 1-D arrays (pure states); composite
systems are ordered left to right, so ``tensor(a, b)`` puts ``a`` on the first
factor.  Dimensions are small (a few thousand at most) and all routines are
dense O(d^3).

Choi matrices use the convention

    J(Phi) = sum_ij |i><j| (x) Phi(|i><j|)

with the *input* factor first, so the identity channel on ``d`` levels maps to
``d`` times the projector on the maximally entangled state and
``Tr_out J = I_in`` expresses trace preservation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-10
    positivity: float = 1e-10
    map_eq: float = 1e-10
    kraus: float = 1e-12
    pure_norm: float = 1e-12
    eig_floor: float = 1e-12


TOL = Tolerances()


# ---------------------------------------------------------------------------
# construction helpers


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def maximally_entangled(dim: int) -> np.ndarray:
    """Normalized sum_i |i>|i> / sqrt(dim)."""
    return np.eye(dim, dtype=complex).ravel() / np.sqrt(dim)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix drawn from the induced (Ginibre) measure."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# validation


def is_hermitian(a: np.ndarray, tol: float = TOL.hermitian) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T), initial=0.0) <= tol


def is_unitary(u: np.ndarray, tol: float = TOL.kraus) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def is_density_operator(rho: np.ndarray, tol: float = TOL.hermitian) -> bool:
    rho = np.asarray(rho)
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1.0) > TOL.trace:
        return False
    return np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -TOL.positivity


def check_density(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if not is_density_operator(rho):
        raise ValueError(f"{name} is not a valid density operator")
    return rho


def check_pure(psi: np.ndarray, name: str = "psi") -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > TOL.pure_norm:
        raise ValueError(f"{name} is not normalized")
    return psi


# ---------------------------------------------------------------------------
# core operations


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    return reduce(np.kron, (np.asarray(o) for o in ops))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced operator on the factors listed in ``keep`` (order preserved).

    ``dims`` gives the dimension of every tensor factor of ``rho``.
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"operator of shape {rho.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # trace pairs from the highest axis down so earlier axis numbers stay valid
    for i in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + m)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def _spectrum(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return np.clip(w, 0.0, 1.0)


def entropy_of_spectrum(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > TOL.eig_floor]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -Tr rho log2 rho, in bits."""
    return max(entropy_of_spectrum(_spectrum(rho)), 0.0)


def binary_entropy(x: float) -> float:
    return entropy_of_spectrum(np.array([x, 1.0 - x]))


def fidelity(psi: np.ndarray, rho: np.ndarray) -> float:
    """<psi|rho|psi> for a pure reference state."""
    psi = np.asarray(psi, dtype=complex).ravel()
    rho = np.asarray(rho)
    if rho.shape != (psi.size, psi.size):
        raise ValueError("state dimensions do not match")
    return float(np.real(psi.conj() @ rho @ psi))


def purify(rho: np.ndarray) -> np.ndarray:
    """Canonical purification sum_i sqrt(w_i) |e_i> (x) |i>, system factor first."""
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.clip(w, 0.0, None)
    d = rho.shape[0]
    psi = np.zeros((d, d), dtype=complex)
    psi[:, :] = v * np.sqrt(w)[None, :]
    psi = psi.ravel()
    return psi / np.linalg.norm(psi)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = np.asarray(a) - np.asarray(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


# ---------------------------------------------------------------------------
# channels


class QuantumChannel:
    """CPT map in operator-sum form rho -> sum_k K_k rho K_k^dag.

    Kraus operators are stored as an array of shape ``(r, dim_out, dim_in)``.
    Instances are treated as immutable.
    """

    def __init__(self, kraus, check: bool = True):
        k = np.asarray(kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3:
            raise ValueError("Kraus operators must form a (r, dim_out, dim_in) array")
        self._kraus = k
        self.dim_out, self.dim_in = k.shape[1], k.shape[2]
        if check:
            err = self.completeness_error()
            if err > TOL.kraus:
                raise ValueError(f"Kraus operators are not trace preserving (error {err:.2e})")

    @property
    def kraus(self) -> np.ndarray:
        return self._kraus

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "QuantumChannel":
        return cls(np.asarray(u, dtype=complex))

    @classmethod
    def from_choi(cls, choi: np.ndarray, dim_in: int, dim_out: int) -> "QuantumChannel":
        """Minimal Kraus set from a Choi matrix (input factor first)."""
        w, v = np.linalg.eigh(0.5 * (choi + choi.conj().T))
        keep = w > TOL.eig_floor * max(1.0, w.max())
        kraus = [
            np.sqrt(wi) * vi.reshape(dim_in, dim_out).T for wi, vi in zip(w[keep], v[:, keep].T)
        ]
        return cls(np.array(kraus))

    def completeness_error(self) -> float:
        k = self.kraus
        s = np.einsum("kai,kaj->ij", k.conj(), k)
        return float(np.max(np.abs(s - np.eye(self.dim_in))))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho)
        if rho.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"input of shape {rho.shape} for a channel on {self.dim_in} levels")
        k = self.kraus
        return np.einsum("kai,ij,kbj->ab", k, rho, k.conj())

    __call__ = apply

    def choi(self) -> np.ndarray:
        k = self.kraus
        # v_k[(i, a)] = K_k[a, i]
        v = np.transpose(k, (0, 2, 1)).reshape(k.shape[0], -1)
        return v.T @ v.conj()

    def environment_output(self, rho: np.ndarray) -> np.ndarray:
        """Complementary-channel output [Tr K_i rho K_j^dag]_ij."""
        k = self.kraus
        return np.einsum("iab,bc,jac->ij", k, np.asarray(rho), k.conj())

    def tensor(self, other: "QuantumChannel") -> "QuantumChannel":
        a, b = self.kraus, other.kraus
        prod = np.einsum("iab,jcd->ijacbd", a, b).reshape(
            a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]
        )
        return QuantumChannel(prod, check=False)

    def then(self, other: "QuantumChannel") -> "QuantumChannel":
        """``other`` applied after ``self``."""
        if other.dim_in != self.dim_out:
            raise ValueError("channel dimensions do not chain")
        a, b = self.kraus, other.kraus
        prod = np.einsum("jab,ibc->jiac", b, a).reshape(-1, other.dim_out, self.dim_in)
        return QuantumChannel(prod, check=False)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim_in={self.dim_in}, dim_out={self.dim_out}, rank={len(self.kraus)})"


def tensor_channels(*channels: QuantumChannel) -> QuantumChannel:
    return reduce(lambda a, b: a.tensor(b), channels)


def choi_of(channel: QuantumChannel) -> np.ndarray:
    return channel.choi()


def choi_distance(a: QuantumChannel | np.ndarray, b: QuantumChannel | np.ndarray) -> float:
    """Largest absolute entry difference between two Choi matrices."""
    ja = a.choi() if isinstance(a, QuantumChannel) else np.asarray(a)
    jb = b.choi() if isinstance(b, QuantumChannel) else np.asarray(b)
    if ja.shape != jb.shape:
        raise ValueError(f"Choi shapes differ: {ja.shape} vs {jb.shape}")
    return float(np.max(np.abs(ja - jb)))


def same_channel(a: QuantumChannel, b: QuantumChannel, tol: float = TOL.map_eq) -> bool:
    return choi_distance(a, b) < tol
