"""Noise attenuation by sacrificial carriers (qubit dephasing instance).

``n`` message-free carriers prepared in ``rho0 = diag(p, 1 - p)`` and spaced by
``tau`` steer the LE away from its stationary state before the message carrier
arrives.  For the controlled coupling the message carrier then sees a phase
damping channel with factor ``gbar = Tr(sigma_n Theta)``, which can beat the
memoryless factor ``sqrt(lam)``.

Two independent routes give ``sigma_n``: direct iteration of the collision map
(:func:`iterate_environment`) and the eigen-solution of the linear recursion
for ``(eta^-1/4 z, x)`` (:func:`closed_form_state`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import (
    EnvironmentModel,
    coupling_block,
    eta_profile,
    phase_damping,
    qubit_dephasing_model,
)
from .qcore import QuantumChannel, partial_trace, projector

#: Eigenvalue magnitude above which the closed form is refused.
EIG_MARGIN = 1e-9
P_GRID = 101
P_XTOL = 1e-7


class ClosedFormUnavailable(ArithmeticError):
    """The recursion matrix has an eigenvalue too close to the unit circle."""


@dataclass(frozen=True)
class AttenuationProtocol:
    n: int
    tau: float
    p: float
    lam: float
    tau_e: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.tau <= 0 or self.tau_e <= 0:
            raise ValueError("tau and tau_e must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")

    @property
    def eta(self) -> float:
        return eta_profile(self.tau, self.tau_e)

    @property
    def rho0(self) -> np.ndarray:
        return np.diag([self.p, 1.0 - self.p]).astype(complex)


@dataclass(frozen=True)
class EnvTrajectory:
    """LE states sigma_0..sigma_n as rows ``(x, y, z)``.

    ``sigma = [[1 - z, x + iy], [x - iy, z]]``.
    """

    points: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 2]

    def sigma(self, j: int) -> np.ndarray:
        x, y, z = self.points[j]
        return np.array([[1 - z, x + 1j * y], [x - 1j * y, z]])

    @classmethod
    def from_states(cls, states) -> "EnvTrajectory":
        pts = [(s[0, 1].real, s[0, 1].imag, s[1, 1].real) for s in states]
        return cls(np.array(pts))


# ---------------------------------------------------------------------------
# iteration route (any environment model)


def environment_trajectory(env: EnvironmentModel, rho0: np.ndarray, tau: float, n: int) -> list[np.ndarray]:
    """sigma_0 .. sigma_n under sigma -> E_tau(Tr_C U (rho0 (x) sigma) U^dag)."""
    u = env.coupling
    relax = env.relaxation(tau)
    dims = [env.carrier_dim, env.env_dim]
    states = [env.sigma0]
    sigma = env.sigma0
    for _ in range(n):
        joint = u @ np.kron(rho0, sigma) @ u.conj().T
        sigma = relax.apply(partial_trace(joint, dims, [1]))
        states.append(sigma)
    return states


def modified_channel(env: EnvironmentModel, rho0: np.ndarray, tau: float, n: int) -> QuantumChannel:
    """Message-carrier map Tr_LE U (rho (x) sigma_n) U^dag."""
    sigma = environment_trajectory(env, rho0, tau, n)[-1]
    w, v = np.linalg.eigh(sigma)
    d, de = env.carrier_dim, env.env_dim
    u4 = env.coupling.reshape(d, de, d, de)
    kraus = [
        np.sqrt(wk) * np.einsum("e,aebf,f->ab", np.eye(de)[l], u4, v[:, k])
        for k, wk in enumerate(np.clip(w, 0, None))
        if wk > 1e-15
        for l in range(de)
    ]
    return QuantumChannel(np.array(kraus))


def iterate_environment(proto: AttenuationProtocol, rho0: np.ndarray | None = None) -> EnvTrajectory:
    env = qubit_dephasing_model(proto.lam, proto.tau_e)
    rho0 = proto.rho0 if rho0 is None else np.asarray(rho0, dtype=complex)
    return EnvTrajectory.from_states(environment_trajectory(env, rho0, proto.tau, proto.n))


def gbar_from_state(lam: float, sigma: np.ndarray) -> float:
    """Coherence factor Tr(sigma Theta) of the message-carrier channel."""
    g = np.trace(np.asarray(sigma) @ coupling_block(lam))
    return float(g.real)


def iterated_gbar(proto: AttenuationProtocol) -> float:
    return gbar_from_state(proto.lam, iterate_environment(proto).sigma(proto.n))


def modified_map(proto: AttenuationProtocol) -> QuantumChannel:
    env = qubit_dephasing_model(proto.lam, proto.tau_e)
    return modified_channel(env, proto.rho0, proto.tau, proto.n)


# ---------------------------------------------------------------------------
# closed form


def recursion_matrices(p: float, lam: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """``(A, w)`` with v_{j+1} = A v_j + w for v = (eta^-1/4 z, x)."""
    c = np.sqrt(lam * (1 - lam))
    q = 1.0 - p
    a = np.array(
        [
            [eta * (p - q + 2 * q * lam), -2 * eta**0.75 * q * c],
            [-2 * eta**0.75 * q * c, np.sqrt(eta) * (p + q - 2 * q * lam)],
        ]
    )
    w = q * np.array([eta**0.75 * (1 - lam), np.sqrt(eta) * c])
    return a, w


def _eigensystem(p: float, lam: float, eta: float):
    se = np.sqrt(eta)
    c = np.sqrt(lam * (1 - lam))
    s = (1 + se) * p + (1 - p) * (1 - se) * (1 - 2 * lam)
    delta = np.sqrt(max(s * s + 4 * se * (1 - 2 * p), 0.0))
    pairs = []
    for sign in (1.0, -1.0):
        mu = 0.5 * se * (s + sign * delta)
        alpha = 4 * eta**0.25 * (1 - p) * c
        beta = (se - 1) * p - (1 - p) * (1 - 2 * lam) * (1 + se) - sign * delta
        pairs.append((mu, alpha, beta, np.hypot(alpha, beta)))
    # a vanishing eigenvector numerator means the matrix is diagonal; the
    # other eigenvector then fixes the basis
    k = 0 if pairs[0][3] >= pairs[1][3] else 1
    mu_k, a_k, b_k, n_k = pairs[k]
    if n_k < 1e-300:
        vecs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    else:
        e = np.array([a_k, b_k]) / n_k
        vecs = [None, None]
        vecs[k] = e
        vecs[1 - k] = np.array([-e[1], e[0]])
    return [pairs[0][0], pairs[1][0]], vecs


def closed_form_state(p: float, lam: float, eta: float, n: int) -> tuple[float, float]:
    """``(z_n, x_n)`` of sigma_n from the eigen-solution of the recursion."""
    if p >= 1.0 or eta == 0.0 or n == 0:
        return 0.0, 0.0
    mus, vecs = _eigensystem(p, lam, eta)
    if max(abs(m) for m in mus) >= 1.0 - EIG_MARGIN:
        raise ClosedFormUnavailable(f"eigenvalues {mus} too close to the unit circle")
    u = v = t = 0.0
    for mu, (al, be) in zip(mus, vecs):
        xi = (1.0 - mu**n) / (1.0 - mu)
        u += xi * al * al
        v += xi * be * be
        t += xi * al * be
    c = np.sqrt(lam * (1 - lam))
    z = eta**0.75 * (1 - p) * (eta**0.25 * (1 - lam) * u + c * t)
    x = np.sqrt(eta) * (1 - p) * (eta**0.25 * (1 - lam) * t + c * v)
    return float(z), float(x)


def gbar_from_zx(lam: float, z: float, x: float) -> float:
    return float(np.sqrt(lam) - 2 * (np.sqrt(lam) * z - np.sqrt(1 - lam) * x))


def closed_form_gbar(proto: AttenuationProtocol) -> float:
    z, x = closed_form_state(proto.p, proto.lam, proto.eta, proto.n)
    return gbar_from_zx(proto.lam, z, x)


def _iterated_zx(p: float, lam: float, eta: float, n: int) -> tuple[float, float]:
    a, w = recursion_matrices(p, lam, eta)
    v = np.zeros(2)
    for _ in range(n):
        v = a @ v + w
    return float(v[0] * eta**0.25), float(v[1])


def gbar_value(p: float, lam: float, eta: float, n: int) -> float:
    """ḡ via the closed form, falling back to the recursion near |eigenvalue| = 1."""
    try:
        z, x = closed_form_state(p, lam, eta, n)
    except ClosedFormUnavailable:
        z, x = _iterated_zx(p, lam, eta, n)
    return gbar_from_zx(lam, z, x)


def gbar(proto: AttenuationProtocol) -> float:
    return gbar_value(proto.p, proto.lam, proto.eta, proto.n)


def attenuated_channel(proto: AttenuationProtocol) -> QuantumChannel:
    """Phase damping channel with the protocol's ḡ."""
    return phase_damping(gbar(proto))


def optimize_gbar(lam: float, n: int, tau: float, tau_e: float = 1.0) -> tuple[float, float]:
    """Best ``(p, gbar)`` over diagonal sacrificial states.

    A uniform grid on p is refined by bounded Brent search around the best
    grid point; the p = 1 endpoint (ḡ = sqrt(lam)) is always on the grid.
    """
    eta = eta_profile(tau, tau_e)
    grid = np.linspace(0.0, 1.0, P_GRID)
    vals = np.array([gbar_value(p, lam, eta, n) for p in grid])
    i = int(np.argmax(vals))
    best_p, best_g = float(grid[i]), float(vals[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, P_GRID - 1)]
    res = minimize_scalar(
        lambda p: -gbar_value(p, lam, eta, n), bounds=(lo, hi), method="bounded", options={"xatol": P_XTOL}
    )
    if res.success and -res.fun > best_g:
        best_p, best_g = float(res.x), float(-res.fun)
    return best_p, best_g
