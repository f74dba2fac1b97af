"""Mode-occupation bookkeeping for the second-quantised walk.

The free many-body step is quadratic in the field operators, so it is
diagonal in the Bloch band basis: each momentum p on a finite grid carries
one positive-band and one negative-band mode.  A sea state is then just a
pair of boolean occupation tables, and free evolution multiplies it by a
global phase without changing any occupation.  Exponentially large Fock
vectors are only ever needed for the qubit-circuit cross-checks, which live
in :mod:`diracwalk.circuits`.

Energy bookkeeping is band-resolved: the negative band at momentum p has
energy -arccos(cos(E dt))/dt in [-pi/dt, 0), even at the branch fold where
the folded single-value convention would report +pi/dt.  With that
convention the Dirac sea of the massless walk sums to -sum_k |p_k| c on the
grid.  Energy *differences* of event lists are folded back into
(-pi/dt, pi/dt], which is where the pair-creation sign flip at the fold
boundary comes from.

Creating an antiparticle with momentum p is the same physical event as
removing a filled negative-band mode at -p; ``antiparticle_relabel``
translates between the two descriptions and energy totals are invariant
under it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, OccupancyError
from .lattice import momentum_grid
from .spinor import fold_phase
from .walk1d import DIRAC, WalkParams, _check_model, dirac_spinors, dispersion

PLUS = "plus"
MINUS = "minus"
ANTI = "anti"

CREATE = "create"
ANNIHILATE = "annihilate"


@dataclass(frozen=True)
class FockLayout:
    """Momentum grid of a finite periodic lattice: N modes per band."""

    n_sites: int
    dx: float = 1.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise DomainError("need at least two sites")
        if self.dx <= 0:
            raise DomainError("dx must be positive")

    def momenta(self) -> np.ndarray:
        return momentum_grid(self.n_sites, self.dx)

    def index_of(self, p: float) -> int:
        """Grid index of momentum p (must match a grid point to ~1e-9/dx)."""
        grid = self.momenta()
        # fold into [grid[0], grid[0] + 2 pi / dx) before matching
        span = 2.0 * math.pi / self.dx
        folded = p - span * math.floor((p - grid[0]) / span)
        offsets = np.abs(grid - folded)
        offsets = np.minimum(offsets, np.abs(grid - folded + span))
        idx = int(np.argmin(offsets))
        if offsets[idx] > 1e-9 / self.dx:
            raise DomainError(f"momentum {p!r} is not on the grid")
        return idx

    def reflect_index(self, idx: int) -> int:
        """Index of -p for grid index idx (the zone edge maps to itself)."""
        return self.index_of(-float(self.momenta()[idx]))


@dataclass(frozen=True)
class ModeEvent:
    """Creation or annihilation of one band mode at one grid momentum."""

    band: str
    p: float
    kind: str

    def __post_init__(self):
        if self.band not in (PLUS, MINUS, ANTI):
            raise DomainError(f"unknown band {self.band!r}")
        if self.kind not in (CREATE, ANNIHILATE):
            raise DomainError(f"unknown kind {self.kind!r}")


def antiparticle_relabel(event: ModeEvent) -> ModeEvent:
    """Rewrite a negative-band event as an antiparticle event (and back).

    Creating a negative-band particle at p is annihilating an antiparticle
    at -p and vice versa; applying the relabel twice is the identity.
    Positive-band events have no antiparticle reading.
    """
    if event.band == PLUS:
        raise DomainError("only negative-band events have an antiparticle reading")
    other = ANTI if event.band == MINUS else MINUS
    flipped = CREATE if event.kind == ANNIHILATE else ANNIHILATE
    return ModeEvent(other, -event.p, flipped)


def band_energy(p: float, params: WalkParams, band: str, model: str | None = None) -> float:
    """Band-resolved quasi-energy of one mode (see module docstring)."""
    model = _check_model(params, model)
    bloch = dispersion(p, params, model)
    if band == PLUS:
        return bloch.E_plus
    if band == MINUS:
        return -bloch.E_plus  # -arccos branch, equals E_minus away from the fold
    if band == ANTI:
        anti = dispersion(-p, params, model)
        return anti.E_plus  # removing the filled partner mode costs |E_minus(-p)|
    raise DomainError(f"unknown band {band!r}")


@dataclass(frozen=True)
class ModeBasis:
    """Columns are the (s_plus, s_minus) spinors of the Bloch matrix at p."""

    p: float
    matrix: np.ndarray
    degenerate: bool = False


def mode_basis(p: float, params: WalkParams, model: str | None = None) -> ModeBasis:
    bloch = dispersion(p, params, model)
    matrix = np.column_stack([bloch.s_plus, bloch.s_minus])
    return ModeBasis(p=p, matrix=matrix, degenerate=bloch.degenerate)


@dataclass(frozen=True)
class SeaState:
    """Occupation tables over a momentum grid, one flag per band and mode."""

    layout: FockLayout
    plus_occ: tuple
    minus_occ: tuple

    @classmethod
    def bare_vacuum(cls, layout: FockLayout) -> "SeaState":
        n = layout.n_sites
        return cls(layout, (False,) * n, (False,) * n)

    @classmethod
    def dirac_vacuum(cls, layout: FockLayout) -> "SeaState":
        """All negative-band modes filled, all positive-band modes empty."""
        n = layout.n_sites
        return cls(layout, (False,) * n, (True,) * n)

    def occupied_count(self) -> int:
        return sum(self.plus_occ) + sum(self.minus_occ)

    def _tables(self):
        return {PLUS: list(self.plus_occ), MINUS: list(self.minus_occ)}

    def apply_events(self, events) -> "SeaState":
        """New sea with the events applied in order; occupancy is enforced."""
        tables = self._tables()
        for event in events:
            band, idx, delta = _occupancy_change(event, self.layout)
            occupied = tables[band][idx]
            if delta > 0 and occupied:
                raise OccupancyError(f"mode ({band}, index {idx}) is already occupied")
            if delta < 0 and not occupied:
                raise OccupancyError(f"mode ({band}, index {idx}) is empty")
            tables[band][idx] = not occupied
        return replace(
            self, plus_occ=tuple(tables[PLUS]), minus_occ=tuple(tables[MINUS])
        )


def _occupancy_change(event: ModeEvent, layout: FockLayout):
    """(band, grid index, +-1) acting on the physical occupation tables."""
    if event.band == ANTI:
        physical = antiparticle_relabel(event)
    else:
        physical = event
    idx = layout.index_of(physical.p)
    delta = +1 if physical.kind == CREATE else -1
    return physical.band, idx, delta


def _physical_mode(event: ModeEvent, dx: float):
    """((band, folded momentum key), occupancy delta) of an event."""
    physical = antiparticle_relabel(event) if event.band == ANTI else event
    folded = float(fold_phase(physical.p * dx)) / dx
    delta = +1 if physical.kind == CREATE else -1
    return (physical.band, round(folded, 9)), delta


def modular_delta_e(
    events,
    params: WalkParams,
    model: str | None = None,
    sea: SeaState | None = None,
) -> float:
    """Folded total energy change of a list of mode events.

    Creations add the mode energy, annihilations subtract it, and the total
    is folded into (-pi/dt, pi/dt].  When ``sea`` is given the events are
    validated against it in order; otherwise only internal consistency is
    required (per-mode occupancy may not change by more than one in either
    direction, whatever the unknown starting occupation).
    """
    events = list(events)
    model = _check_model(params, model)
    if sea is not None:
        sea.apply_events(events)  # raises OccupancyError on inconsistency
    else:
        running: dict = {}
        for event in events:
            key, delta = _physical_mode(event, params.dx)
            lo, hi, cur = running.get(key, (0, 0, 0))
            cur += delta
            lo, hi = min(lo, cur), max(hi, cur)
            if hi - lo > 1:
                raise OccupancyError(
                    f"events revisit mode {key} inconsistently with any occupation"
                )
            running[key] = (lo, hi, cur)
    total_dt = 0.0
    for event in events:
        sign = +1.0 if event.kind == CREATE else -1.0
        total_dt += sign * band_energy(event.p, params, event.band, model) * params.dt
    return float(fold_phase(total_dt)) / params.dt


def sea_energy(sea: SeaState, params: WalkParams, model: str | None = None) -> float:
    """Raw sum of band-resolved energies over occupied modes (no folding)."""
    model = _check_model(params, model)
    momenta = sea.layout.momenta()
    total = 0.0
    for idx, p in enumerate(momenta):
        if sea.plus_occ[idx]:
            total += band_energy(float(p), params, PLUS, model)
        if sea.minus_occ[idx]:
            total += band_energy(float(p), params, MINUS, model)
    return total


def step_sea(sea: SeaState, params: WalkParams, model: str | None = None):
    """One free step: occupations are unchanged, a global phase is returned.

    The step is diagonal in the band basis, so an occupation eigenstate is
    an eigenstate of the evolution with phase exp(-i dt * sum of occupied
    mode energies).
    """
    phase = cmath.exp(-1j * sea_energy(sea, params, model) * params.dt)
    return sea, phase


@dataclass(frozen=True)
class SpinorLimitReport:
    """Squared overlaps between band spinors and the continuum pair.

    ``low_plus``/``low_minus`` compare (s_plus, s_minus) at momentum q with
    (u_q, v_q); ``edge_plus``/``edge_minus`` compare the bands at pi/dx + q
    with the swapped pair (v_q, u_q).  All four tend to 1 as q dx and
    m c^2 dt tend to zero, and are exactly 1 for the massless walk.
    """

    low_plus: float
    low_minus: float
    edge_plus: float
    edge_minus: float


def sigma_spinor_limits(p: float, params: WalkParams) -> SpinorLimitReport:
    if params.theta is not None:
        raise DomainError("continuum spinor limits are defined for the Dirac walk")
    u, v = dirac_spinors(p, params)  # raises DegenerateModeError at m=0, p=0
    low = dispersion(p, params, DIRAC)
    edge = dispersion(p + params.zone_edge(), params, DIRAC)
    return SpinorLimitReport(
        low_plus=float(abs(np.vdot(u, low.s_plus)) ** 2),
        low_minus=float(abs(np.vdot(v, low.s_minus)) ** 2),
        edge_plus=float(abs(np.vdot(v, edge.s_plus)) ** 2),
        edge_minus=float(abs(np.vdot(u, edge.s_minus)) ** 2),
    )


# ---------------------------------------------------------------------------
# one-particle sector of the many-body step, built from conjugation rules
# ---------------------------------------------------------------------------

def one_particle_unitary(n_sites: int, params: WalkParams, model: str | None = None) -> np.ndarray:
    """2N x 2N matrix of the many-body step restricted to one excitation.

    Basis ordering is site-major with components (r, l): index 2n is the
    right mover at site n.  Built directly from the operator transport
    rules (r movers shift right, l movers shift left, the mass term mixes
    them sitewise), independently of the Bloch construction.
    """
    model = _check_model(params, model)
    n = n_sites
    dim = 2 * n
    shift = np.zeros((dim, dim), dtype=complex)
    for site in range(n):
        shift[2 * ((site + 1) % n), 2 * site] = 1.0          # r: site -> site+1
        shift[2 * ((site - 1) % n) + 1, 2 * site + 1] = 1.0  # l: site -> site-1
    m_dt = params.m_dt
    coin2 = np.array(
        [[math.cos(m_dt), -1j * math.sin(m_dt)], [-1j * math.sin(m_dt), math.cos(m_dt)]]
    )
    coin = np.kron(np.eye(n), coin2)
    if model == DIRAC:
        return coin @ shift
    theta = params.theta
    half = theta / 2.0
    rot2 = np.array(
        [[math.cos(half), -1j * math.sin(half)], [-1j * math.sin(half), math.cos(half)]]
    )  # e^{-i theta sigma_x / 2}
    rot = np.kron(np.eye(n), rot2)
    rot_dag = rot.conj().T
    # shift along the -theta axis first, then the +theta axis
    return coin @ (rot_dag @ shift @ rot) @ (rot @ shift @ rot_dag)


def one_particle_blocks(n_sites: int, params: WalkParams, model: str | None = None):
    """Per-momentum 2x2 blocks of the one-particle step after a DFT.

    Returns (momenta, blocks) where blocks[k] should equal the Bloch matrix
    at momenta[k]; this is the executable statement that the walk is the
    one-excitation sector of the many-body model.
    """
    model = _check_model(params, model)
    n = n_sites
    u = one_particle_unitary(n, params, model)
    momenta = momentum_grid(n, params.dx)
    fourier = np.zeros((2 * n, 2 * n), dtype=complex)
    sites = np.arange(n)
    for k, p in enumerate(momenta):
        row = np.exp(-1j * p * sites * params.dx) / math.sqrt(n)
        fourier[2 * k, 0::2] = row
        fourier[2 * k + 1, 1::2] = row
    transformed = fourier @ u @ fourier.conj().T
    blocks = [
        transformed[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] for k in range(n)
    ]
    return momenta, blocks
