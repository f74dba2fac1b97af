"""Qubit circuits for the fermionic lattice models and exact cross-checks.

Two qubits per lattice site hold the occupations of the left and right
movers.  Qubit (n, l) sits at register position 2n and (n, r) at 2n + 1;
basis index bit q (little-endian) is the occupation of qubit q.  Fermion
operators are mapped to qubits with Z-strings extending toward lower
register positions, so operators on register-adjacent qubit pairs need no
string corrections.

Gate set.  ``gate_matrix`` provides the textbook four: the fermionic swap
S, the mass-mixing gate Wprime, the internal rotation Rtheta, and
Wdoubleprime = Wprime @ Rtheta^dagger.  The compiled step returned by
``build_circuit`` uses S, Rtheta and one composite on-site gate,
``RxSwap(angle)``: an x-axis internal rotation followed by the on-site
fermionic swap.  The swap factor is required because a parallel layer of S
gates on the cross-site pairs ((n, r), (n + 1, l)) realises the chirality
shift only up to a per-site exchange of the two movers; RxSwap undoes that
exchange while applying the mass (or tilt) rotation, so one S layer plus
one RxSwap layer is exactly one free step.  RxSwap(angle) equals Wprime
with its two middle columns exchanged when angle = 2 m c^2 dt.

Boundary.  The cyclic S gate acts on qubits (2N - 1, 0), which are not
register-adjacent; the missing Z-string makes the circuit transport across
the boundary with a sign that depends on total fermion parity.  All gates
conserve parity, and within a fixed sector the circuit equals the
second-quantised step built with periodic (odd sector) or antiperiodic
(even sector) boundary transport.  ``equivalence_report`` checks exactly
that, sector by sector, up to one global phase per sector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, NumericalCheckError
from .walk1d import DIRAC, WalkParams, _check_model

MAX_REGISTER_SITES = 7   # dense vectors up to 2^14
MAX_REFERENCE_SITES = 5  # dense unitaries up to 2^10
MAX_EQUIVALENCE_SITES = 4

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"


def qubit_index(site: int, chirality: str, n_sites: int) -> int:
    """Register position of qubit (site, chirality)."""
    if chirality not in ("l", "r"):
        raise DomainError("chirality must be 'l' or 'r'")
    return 2 * (site % n_sites) + (1 if chirality == "r" else 0)


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

def _fswap() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]], dtype=complex
    )


def _wprime(m_dt: float) -> np.ndarray:
    c, s = math.cos(m_dt), math.sin(m_dt)
    return np.array(
        [[1, 0, 0, 0], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [0, 0, 0, -1]],
        dtype=complex,
    )


def _rtheta(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array(
        [[1, 0, 0, 0], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [0, 0, 0, 1]],
        dtype=complex,
    )


def _rx_swap(angle: float) -> np.ndarray:
    """x-rotation by ``angle`` composed with the on-site fermionic swap."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array(
        [[1, 0, 0, 0], [0, -1j * s, c, 0], [0, c, -1j * s, 0], [0, 0, 0, -1]],
        dtype=complex,
    )


def gate_matrix(kind: str, m_dt: float = 0.0, theta: float = 0.0) -> np.ndarray:
    """4x4 matrix of a named gate.

    Kinds: "S" (fermionic swap), "Wprime" (mass mixing, uses m_dt),
    "Rtheta" (internal rotation, uses theta), "Wdoubleprime"
    (= Wprime @ Rtheta^dagger), "RxSwap" (rotation + swap, uses theta as
    the rotation angle).
    """
    if kind == "S":
        return _fswap()
    if kind == "Wprime":
        return _wprime(m_dt)
    if kind == "Rtheta":
        return _rtheta(theta)
    if kind == "Wdoubleprime":
        return _wprime(m_dt) @ _rtheta(theta).conj().T
    if kind == "RxSwap":
        return _rx_swap(theta)
    raise DomainError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class GateSpec:
    """One gate: kind, ordered qubit pair, angle parameter, 4x4 matrix.

    The matrix is stated in the product basis |a>_{q0} |b>_{q1} with
    row/column index (a << 1) | b.
    """

    kind: str
    qubits: tuple
    angle: float
    matrix: np.ndarray = field(repr=False)


@dataclass
class RegisterState:
    """Dense state vector over 2N qubits (N lattice sites)."""

    n_sites: int
    vector: np.ndarray

    def __post_init__(self):
        if self.n_sites < 1 or self.n_sites > MAX_REGISTER_SITES:
            raise DomainError(f"site count must be in [1, {MAX_REGISTER_SITES}]")
        vec = np.asarray(self.vector, dtype=complex)
        if vec.shape != (1 << (2 * self.n_sites),):
            raise DomainError("state vector has the wrong dimension")
        self.vector = vec

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_sites

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    @classmethod
    def vacuum(cls, n_sites: int) -> "RegisterState":
        vec = np.zeros(1 << (2 * n_sites), dtype=complex)
        vec[0] = 1.0
        return cls(n_sites, vec)

    @classmethod
    def basis(cls, n_sites: int, occupied) -> "RegisterState":
        """Computational basis state with the given qubit positions set."""
        index = 0
        for q in occupied:
            index |= 1 << q
        vec = np.zeros(1 << (2 * n_sites), dtype=complex)
        vec[index] = 1.0
        return cls(n_sites, vec)


def _apply_gate(array: np.ndarray, gate: np.ndarray, q0: int, q1: int, n_qubits: int):
    """Apply a 4x4 gate on qubits (q0, q1) to a vector or matrix columns."""
    dim = 1 << n_qubits
    if q0 == q1 or not (0 <= q0 < n_qubits and 0 <= q1 < n_qubits):
        raise DomainError(f"invalid qubit pair ({q0}, {q1})")
    idx = np.arange(dim)
    m0, m1 = 1 << q0, 1 << q1
    base = idx[(idx & m0 == 0) & (idx & m1 == 0)]
    rows = (base, base | m1, base | m0, base | m0 | m1)
    old = [array[r] for r in rows]
    out = array.copy()
    for r_new in range(4):
        acc = gate[r_new, 0] * old[0]
        for r_old in range(1, 4):
            g = gate[r_new, r_old]
            if g != 0:
                acc = acc + g * old[r_old]
        out[rows[r_new]] = acc
    return out


def apply_circuit(state: RegisterState, circuit) -> RegisterState:
    """Apply gates in order; norm drift beyond 1e-12 raises."""
    vec = state.vector
    for gate in circuit:
        vec = _apply_gate(vec, gate.matrix, gate.qubits[0], gate.qubits[1], state.n_qubits)
    out = RegisterState(state.n_sites, vec)
    if abs(out.norm() - state.norm()) > 1e-12:
        raise NumericalCheckError("state norm drifted beyond 1e-12")
    return out


def circuit_unitary(circuit, n_sites: int) -> np.ndarray:
    """Dense 2^{2N} unitary of a gate list."""
    dim = 1 << (2 * n_sites)
    u = np.eye(dim, dtype=complex)
    for gate in circuit:
        u = _apply_gate(u, gate.matrix, gate.qubits[0], gate.qubits[1], 2 * n_sites)
    return u


def build_circuit(model: str, n_sites: int, params: WalkParams):
    """Gate list realising one step of the free model on N sites.

    Layers (first listed acts first):

    * dirac:    [S on ((n,r),(n+1,l)) for all n] ; [RxSwap(2 M) on sites]
    * modified: [Rtheta(-theta) on sites] ; [S cross layer] ;
                [RxSwap(2 theta) on sites] ; [S cross layer] ;
                [RxSwap(2 M - theta) on sites]

    with M = m c^2 dt.  The cross layer includes the cyclic closure gate on
    ((N-1, r), (0, l)).  Even N >= 2 required so the cross layer tiles the
    register.
    """
    model = _check_model(params, model)
    if n_sites < 2 or n_sites % 2 != 0:
        raise DomainError("the brick pattern needs an even site count >= 2")
    m_dt = params.m_dt

    def cross_layer():
        return [
            GateSpec(
                "S",
                (qubit_index(n, "r", n_sites), qubit_index(n + 1, "l", n_sites)),
                0.0,
                _fswap(),
            )
            for n in range(n_sites)
        ]

    def onsite_layer(kind, angle):
        mat = gate_matrix(kind, theta=angle)
        return [
            GateSpec(
                kind,
                (qubit_index(n, "l", n_sites), qubit_index(n, "r", n_sites)),
                angle,
                mat,
            )
            for n in range(n_sites)
        ]

    if model == DIRAC:
        return cross_layer() + onsite_layer("RxSwap", 2.0 * m_dt)
    theta = params.theta
    return (
        onsite_layer("Rtheta", -theta)
        + cross_layer()
        + onsite_layer("RxSwap", 2.0 * theta)
        + cross_layer()
        + onsite_layer("RxSwap", 2.0 * m_dt - theta)
    )


# ---------------------------------------------------------------------------
# Jordan-Wigner operators and the second-quantised reference step
# ---------------------------------------------------------------------------

def jw_field_operator(site: int, chirality: str, n_sites: int) -> np.ndarray:
    """Dense creation operator for mode (site, chirality) on 2N qubits.

    The Z-string covers every register position below the target, so the
    matrix element carries (-1)^(number of occupied lower modes).
    """
    if not 0 <= site < n_sites:
        raise DomainError("site out of range")
    if n_sites > MAX_REFERENCE_SITES:
        raise DomainError(f"dense field operators capped at N = {MAX_REFERENCE_SITES}")
    mu = qubit_index(site, chirality, n_sites)
    n_qubits = 2 * n_sites
    dim = 1 << n_qubits
    idx = np.arange(dim)
    bit = 1 << mu
    sources = idx[(idx & bit) == 0]
    targets = sources | bit
    below = sources & (bit - 1)
    signs = 1.0 - 2.0 * (np.array([bin(x).count("1") for x in below]) % 2)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[targets, sources] = signs
    return mat


def _quadratic_step(n_sites: int, angle: float) -> np.ndarray:
    """exp(-i angle * sum_n (r_n^dag l_n + l_n^dag r_n)) on the full register."""
    dim = 1 << (2 * n_sites)
    quad = np.zeros((dim, dim), dtype=complex)
    for n in range(n_sites):
        create_r = jw_field_operator(n, "r", n_sites)
        create_l = jw_field_operator(n, "l", n_sites)
        quad += create_r @ create_l.conj().T + create_l @ create_r.conj().T
    return expm(-1j * angle * quad)


def _gamma_permutation(n_sites: int, perm: dict, signs: dict | None = None) -> np.ndarray:
    """Fock-space image of a signed mode permutation (vacuum maps to vacuum).

    Each occupied mode mu is transported to perm[mu] with amplitude
    signs[mu]; reordering the transported modes back to ascending register
    order contributes the fermionic parity of the permutation restricted to
    the occupied set.
    """
    n_qubits = 2 * n_sites
    dim = 1 << n_qubits
    signs = signs or {}
    mat = np.zeros((dim, dim), dtype=complex)
    for source in range(dim):
        occupied = [mu for mu in range(n_qubits) if (source >> mu) & 1]
        images = [perm[mu] for mu in occupied]
        amp = 1.0
        for mu in occupied:
            amp *= signs.get(mu, 1.0)
        inversions = 0
        for a in range(len(images)):
            for b in range(a + 1, len(images)):
                if images[a] > images[b]:
                    inversions += 1
        target = 0
        for mu in images:
            target |= 1 << mu
        mat[target, source] = amp * (-1.0) ** inversions
    return mat


def _shift_step(n_sites: int, boundary: str) -> np.ndarray:
    """Second-quantised chirality shift with the chosen boundary transport."""
    perm = {}
    for n in range(n_sites):
        perm[qubit_index(n, "r", n_sites)] = qubit_index(n + 1, "r", n_sites)
        perm[qubit_index(n, "l", n_sites)] = qubit_index(n - 1, "l", n_sites)
    signs = None
    if boundary == ANTIPERIODIC:
        signs = {
            qubit_index(n_sites - 1, "r", n_sites): -1.0,  # r wrapping N-1 -> 0
            qubit_index(0, "l", n_sites): -1.0,            # l wrapping 0 -> N-1
        }
    elif boundary != PERIODIC:
        raise DomainError(f"unknown boundary {boundary!r}")
    return _gamma_permutation(n_sites, perm, signs)


def qca_reference_unitary(
    model: str,
    n_sites: int,
    params: WalkParams,
    boundary: str = PERIODIC,
) -> np.ndarray:
    """One second-quantised step, built without any gate decomposition.

    The mass mixing is the exponential of the quadratic form assembled from
    dense Jordan-Wigner operators; the shift is the Fock-space image of the
    signed mode permutation; the tilted shifts conjugate the plain shift by
    the exponential of the internal x-rotation quadratic form.
    """
    model = _check_model(params, model)
    if n_sites > MAX_REFERENCE_SITES:
        raise DomainError(f"reference construction capped at N = {MAX_REFERENCE_SITES}")
    mass_step = _quadratic_step(n_sites, params.m_dt)
    shift = _shift_step(n_sites, boundary)
    if model == DIRAC:
        return mass_step @ shift
    rot = _quadratic_step(n_sites, params.theta / 2)
    tilt_plus = rot @ shift @ rot.conj().T
    tilt_minus = rot.conj().T @ shift @ rot
    return mass_step @ tilt_minus @ tilt_plus


# ---------------------------------------------------------------------------
# sector-wise equivalence
# ---------------------------------------------------------------------------

def parity_sectors(n_qubits: int):
    """(even indices, odd indices) by total occupation parity."""
    idx = np.arange(1 << n_qubits)
    parity = np.zeros(1 << n_qubits, dtype=int)
    for q in range(n_qubits):
        parity ^= (idx >> q) & 1
    return idx[parity == 0], idx[parity == 1]


def _phase_aligned_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """max |a e^{i phi} - b| minimised over the single global phase phi."""
    overlap = np.trace(a.conj().T @ b)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
    return float(np.max(np.abs(a * phase - b)))


@dataclass(frozen=True)
class EquivalenceReport:
    model: str
    n_sites: int
    deviation_odd: float
    deviation_even: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviation_odd, self.deviation_even)


def equivalence_report(model: str, n_sites: int, params: WalkParams) -> EquivalenceReport:
    """Entrywise deviation between the gate circuit and the reference step.

    Compared per fermion-parity sector and up to one global phase per
    sector: the odd sector against the periodic reference, the even sector
    against the antiperiodic one (the bare cyclic closure gate transports
    across the boundary with the opposite sign there).
    """
    model = _check_model(params, model)
    if n_sites > MAX_EQUIVALENCE_SITES:
        raise DomainError(f"equivalence check capped at N = {MAX_EQUIVALENCE_SITES}")
    circuit = build_circuit(model, n_sites, params)
    u_circuit = circuit_unitary(circuit, n_sites)
    even, odd = parity_sectors(2 * n_sites)
    u_periodic = qca_reference_unitary(model, n_sites, params, PERIODIC)
    u_anti = qca_reference_unitary(model, n_sites, params, ANTIPERIODIC)
    dev_odd = _phase_aligned_deviation(
        u_circuit[np.ix_(odd, odd)], u_periodic[np.ix_(odd, odd)]
    )
    dev_even = _phase_aligned_deviation(
        u_circuit[np.ix_(even, even)], u_anti[np.ix_(even, even)]
    )
    return EquivalenceReport(model, n_sites, dev_odd, dev_even)


def single_excitation_block(u: np.ndarray, n_sites: int) -> np.ndarray:
    """2N x 2N block of a register unitary on the one-excitation basis.

    Basis ordering follows register positions: (0,l), (0,r), (1,l), ...
    """
    rows = [1 << mu for mu in range(2 * n_sites)]
    return u[np.ix_(rows, rows)]
