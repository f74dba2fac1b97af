"""Exact small-matrix complex algebra for two-level internal spaces.

Provides the Pauli basis, closed-form SU(2) exponentials, tilted spin axes,
eigendecomposition of small unitaries, and the map from unit-circle
eigenvalue phases to quasi-energies on the principal branch (-pi/dt, pi/dt].

The 2x2 path never calls a general eigensolver: every 2x2 unitary is split
as U = e^{i gamma} (r I - i n.sigma) with real r and real 3-vector n, which
gives eigenphases and eigenvectors in closed form.  Sizes above 2 go through
a complex Schur decomposition, whose orthonormal Schur vectors are exact
eigenvectors for normal matrices up to roundoff.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import schur

from .errors import DomainError

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-12
_AXIS_TOL = 1e-12
_GAUGE_TOL = 1e-12


def pauli_vector(n) -> np.ndarray:
    """n . sigma for a real 3-vector n."""
    nx, ny, nz = float(n[0]), float(n[1]), float(n[2])
    return nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z


def unitarity_defect(u: np.ndarray) -> float:
    """Max-entry norm of U†U - I."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def hermiticity_defect(a: np.ndarray) -> float:
    """Max-entry norm of A - A†."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def require_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol:
        raise DomainError(f"matrix is not unitary (defect {defect:.3e} > {tol:.1e})")
    return u


def su2_exp(axis, angle: float) -> np.ndarray:
    """exp(i * angle * axis.sigma) for a unit 3-vector axis.

    Evaluated in closed form as cos(angle) I + i sin(angle) axis.sigma,
    so the result is unitary to roundoff for any angle.
    """
    ax = np.asarray(axis, dtype=float)
    if ax.shape != (3,):
        raise DomainError("axis must be a real 3-vector")
    norm = float(np.sqrt(np.dot(ax, ax)))
    if abs(norm - 1.0) > _AXIS_TOL:
        raise DomainError(f"axis must be a unit vector (|n| = {norm!r})")
    return math.cos(angle) * ID2 + 1j * math.sin(angle) * pauli_vector(ax)


def rotated_sigma(theta: float) -> np.ndarray:
    """The spin axis sigma_z tilted by theta toward sigma_y.

    Equals cos(theta) sigma_z + sin(theta) sigma_y, i.e. the conjugation of
    sigma_z by the internal rotation su2_exp(x_hat, theta/2).  Hermitian with
    eigenvalues +-1 for every theta.
    """
    return math.cos(theta) * SIGMA_Z + math.sin(theta) * SIGMA_Y


def fold_phase(x):
    """Fold a phase (or array of phases) into the half-open branch (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)


def principal_energy(phase: float, dt: float) -> float:
    """Quasi-energy on the principal branch for an eigenvalue e^{i phase}.

    The eigenvalue is read as e^{-i E dt}; E is folded into (-pi/dt, pi/dt],
    with the branch endpoint mapped to +pi/dt.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    return float(fold_phase(-phase)) / dt


def gauge_fix(v: np.ndarray, tol: float = _GAUGE_TOL) -> np.ndarray:
    """Rephase a vector so its first component above tol is real positive."""
    v = np.asarray(v, dtype=complex)
    for comp in v:
        if abs(comp) > tol:
            return v * (comp.conjugate() / abs(comp))
    return v.copy()


def su2_split(u: np.ndarray, tol: float = UNITARY_TOL):
    """Split a 2x2 unitary as e^{i gamma} (r I - i n.sigma).

    Returns (gamma, r, n) with gamma in (-pi/2, pi/2], real r and a real
    3-vector n satisfying r^2 + |n|^2 = 1.
    """
    u = require_unitary(u, tol)
    if u.shape != (2, 2):
        raise DomainError("su2_split expects a 2x2 matrix")
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    gamma = 0.5 * math.atan2(det.imag, det.real)
    v = u * np.exp(-1j * gamma)
    r = 0.5 * (v[0, 0] + v[1, 1]).real
    n = np.array(
        [
            -0.5 * (v[0, 1].imag + v[1, 0].imag),
            0.5 * (v[1, 0].real - v[0, 1].real),
            0.5 * (v[1, 1].imag - v[0, 0].imag),
        ]
    )
    return gamma, r, n


def _axis_eigenvectors(n: np.ndarray):
    """Orthonormal eigenvectors (v_plus, v_minus) of n.sigma, |n| > 0."""
    mag = float(np.sqrt(np.dot(n, n)))
    nx, ny, nz = n
    if mag + nz > mag * 1e-8:
        v_plus = np.array([mag + nz, nx + 1j * ny], dtype=complex)
    else:
        # n close to -z: use the complementary expression to avoid cancellation
        v_plus = np.array([nx - 1j * ny, mag - nz], dtype=complex)
    v_plus = v_plus / np.linalg.norm(v_plus)
    v_minus = np.array([-v_plus[1].conjugate(), v_plus[0].conjugate()])
    return gauge_fix(v_plus), gauge_fix(v_minus)


def eig_unitary(u: np.ndarray, tol: float = 1e-10):
    """Eigenphases and orthonormal eigenvectors of a unitary matrix.

    Returns a list of (phase, vector) pairs sorted by phase ascending, with
    phases folded into (-pi, pi] and vectors gauge-fixed (first component
    above tolerance real positive).  Degenerate eigenvalues yield an
    arbitrary orthonormal basis of the eigenspace.
    """
    u = require_unitary(u)
    dim = u.shape[0]
    if dim == 2:
        gamma, r, n = su2_split(u)
        mag = float(np.sqrt(np.dot(n, n)))
        if mag <= 1e-14:
            phase = float(fold_phase(gamma + (0.0 if r >= 0 else np.pi)))
            pairs = [(phase, ID2[:, 0].copy()), (phase, ID2[:, 1].copy())]
        else:
            alpha = math.atan2(mag, r)
            v_plus, v_minus = _axis_eigenvectors(n)
            pairs = [
                (float(fold_phase(gamma - alpha)), v_plus),
                (float(fold_phase(gamma + alpha)), v_minus),
            ]
    else:
        t, q = schur(u, output="complex")
        residual = float(np.max(np.abs(t - np.diag(np.diag(t)))))
        if residual > math.sqrt(tol):
            raise DomainError(f"matrix is not normal (Schur residual {residual:.3e})")
        pairs = [
            (float(fold_phase(np.angle(t[k, k]))), gauge_fix(q[:, k]))
            for k in range(dim)
        ]
    pairs.sort(key=lambda item: item[0])
    return pairs
