"""Position-space evolution on a finite periodic lattice.

States live on N sites with two internal components per site, stored as a
complex (N, 2) array with column 0 = r (right mover) and column 1 = l
(left mover).  Shifts are implemented by index rotation, so locality holds
structurally: one Dirac step moves amplitude at most one site, one modified
step at most two sites.

The discrete momentum grid is p_k = 2 pi k / (N dx) for
k in {-floor(N/2), ..., ceil(N/2) - 1}; with even N the grid contains the
zone-edge momentum -pi/dx, with odd N it does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spinor import su2_exp
from .walk1d import WalkParams

R, L = 0, 1


def momentum_grid(n_sites: int, dx: float = 1.0) -> np.ndarray:
    """Discrete momenta p_k = 2 pi k / (N dx), k centered around zero."""
    if n_sites < 1:
        raise DomainError("need at least one site")
    k = np.arange(n_sites) - n_sites // 2
    return 2.0 * math.pi * k / (n_sites * dx)


@dataclass
class LatticeState:
    """Amplitude field over N sites x (r, l), periodic in the site index."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 2 or amp.shape[1] != 2 or amp.shape[0] < 2:
            raise DomainError("amplitudes must have shape (N, 2) with N >= 2")
        self.amplitudes = amp

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def site_probabilities(self) -> np.ndarray:
        """(N, 2) array of |amplitude|^2 per site and component."""
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "LatticeState":
        return LatticeState(self.amplitudes.copy())

    @classmethod
    def delta(cls, n_sites: int, site: int, component: int = R) -> "LatticeState":
        """Unit amplitude on a single site and internal component."""
        if component not in (R, L):
            raise DomainError("component must be 0 (r) or 1 (l)")
        amp = np.zeros((n_sites, 2), dtype=complex)
        amp[site % n_sites, component] = 1.0
        return cls(amp)

    @classmethod
    def momentum_eigenstate(
        cls, n_sites: int, k: int, spinor, dx: float = 1.0
    ) -> "LatticeState":
        """Plane wave e^{i p_k n dx} / sqrt(N) tensored with a unit spinor."""
        spinor = np.asarray(spinor, dtype=complex)
        if spinor.shape != (2,):
            raise DomainError("spinor must be a 2-vector")
        p_k = 2.0 * math.pi * k / (n_sites * dx)
        phase = np.exp(1j * p_k * np.arange(n_sites) * dx) / math.sqrt(n_sites)
        return cls(np.outer(phase, spinor))


def _apply_coin(amp: np.ndarray, coin: np.ndarray) -> np.ndarray:
    # sitewise 2x2 multiply on the component axis
    return amp @ coin.T


def _shift_z(amp: np.ndarray) -> np.ndarray:
    """r-component one site right, l-component one site left, both cyclic."""
    out = np.empty_like(amp)
    out[:, R] = np.roll(amp[:, R], 1)
    out[:, L] = np.roll(amp[:, L], -1)
    return out


def step_dirac(state: LatticeState, params: WalkParams) -> LatticeState:
    """One Dirac-walk step: chirality shift, then the mass coin sitewise."""
    if params.theta is not None:
        raise DomainError("step_dirac requires Dirac-walk params")
    coin = su2_exp((1.0, 0.0, 0.0), -params.m_dt)
    return LatticeState(_apply_coin(_shift_z(state.amplitudes), coin))


def step_mod(state: LatticeState, params: WalkParams) -> LatticeState:
    """One modified-walk step: two tilted shifts, then the mass coin.

    Each tilted shift is a sitewise rotation into the tilted spin basis, a
    chirality shift, and the inverse rotation, so support grows by at most
    two sites per side per step.
    """
    if params.theta is None:
        raise DomainError("step_mod requires modified-walk params")
    if state.n_sites < 4:
        raise DomainError("modified step needs at least 4 sites")
    theta = params.theta
    rot = su2_exp((1.0, 0.0, 0.0), theta / 2)  # maps sigma_z to the +theta axis
    rot_dag = rot.conj().T
    amp = state.amplitudes
    # shift along the -theta axis, then along the +theta axis
    amp = _apply_coin(_shift_z(_apply_coin(amp, rot)), rot_dag)
    amp = _apply_coin(_shift_z(_apply_coin(amp, rot_dag)), rot)
    coin = su2_exp((1.0, 0.0, 0.0), -params.m_dt)
    return LatticeState(_apply_coin(amp, coin))


def step(state: LatticeState, params: WalkParams) -> LatticeState:
    return step_dirac(state, params) if params.theta is None else step_mod(state, params)


def dft(state: LatticeState) -> np.ndarray:
    """Momentum amplitudes on the centered grid; unitary, Parseval-exact.

    Row k of the result is the coefficient of the plane wave with momentum
    ``momentum_grid(N, dx)[k]`` for each internal component.
    """
    n = state.n_sites
    coeff = np.fft.fft(state.amplitudes, axis=0) / math.sqrt(n)
    return np.fft.fftshift(coeff, axes=0)


def idft(momentum_amplitudes: np.ndarray) -> LatticeState:
    """Inverse of :func:`dft`."""
    coeff = np.fft.ifftshift(np.asarray(momentum_amplitudes, dtype=complex), axes=0)
    n = coeff.shape[0]
    return LatticeState(np.fft.ifft(coeff, axis=0) * math.sqrt(n))


def support(state: LatticeState, tol: float) -> set[int]:
    """Sites whose two-component amplitude norm exceeds tol."""
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    weights = np.linalg.norm(state.amplitudes, axis=1)
    return {int(i) for i in np.nonzero(weights > tol)[0]}
