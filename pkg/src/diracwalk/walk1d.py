"""Momentum-space analysis of the 1+1-D Dirac walk and its gapped variant.

Two single-particle models on a 1-D lattice with internal components (r, l):

* the Dirac walk, one step = mass coin after a chirality shift, with the
  time step fixed to dt = dx/c;
* the modified walk, one step = mass coin after two shifts along tilted
  spin axes (tilt angle theta), with dt = 2 cos(theta) dx / c.

For a momentum eigenstate the step reduces to a 2x2 Bloch unitary U(p);
quasi-energies are defined through its eigenvalues e^{-i E dt} restricted to
the branch (-pi/dt, pi/dt].  All internal arithmetic uses the dimensionless
combinations P = p*dx and M = m*c^2*dt, so results are unit-scale free.

The modified walk's trace admits the closed form

    cos(E dt) = cos(M) cos^2(P) + sin^2(P) cos(M + 2 phi),  phi = pi/2 - theta,

which is linear in cos^2(P); band extrema therefore sit at P in
{0, +-pi/2, +-pi}, and choosing theta with M + 2 phi inside (-pi/2, pi/2)
keeps |E| dt below pi/2 for every momentum (the spectral gap at the branch
fold).  Both facts are used by the certificate and scan routines below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeError, DomainError, InfeasibleError
from .spinor import ID2, _axis_eigenvectors, fold_phase, su2_exp, su2_split

_FIX_TOL = 1e-12
_DEGEN_TOL = 1e-14

DIRAC = "dirac"
MODIFIED = "modified"


@dataclass(frozen=True)
class WalkParams:
    """Physical constants of a walk: mass, light speed, lattice steps, tilt.

    ``theta is None`` selects the Dirac walk (dt = dx/c must hold exactly);
    a tilt angle in [0, pi/2) selects the modified walk and requires
    dt = 2 cos(theta) dx / c.  Use the ``dirac`` / ``modified`` constructors
    to build dimensionless parameter sets (dx = c = 1) directly from m c^2 dt.
    """

    mass: float
    c: float = 1.0
    dx: float = 1.0
    dt: float = 1.0
    theta: float | None = None

    def __post_init__(self):
        if self.dx <= 0 or self.dt <= 0 or self.c <= 0:
            raise DomainError("dx, dt and c must all be positive")
        if self.mass < 0:
            raise DomainError("mass must be non-negative")
        if self.theta is None:
            target = self.dx / self.c
            if abs(self.dt - target) > _FIX_TOL * target:
                raise DomainError("Dirac walk requires dt = dx / c")
        else:
            if not 0.0 <= self.theta < math.pi / 2:
                raise DomainError("theta must lie in [0, pi/2)")
            target = 2.0 * math.cos(self.theta) * self.dx / self.c
            if abs(self.dt - target) > _FIX_TOL * target:
                raise DomainError("modified walk requires dt = 2 cos(theta) dx / c")

    @classmethod
    def dirac(cls, m_dt: float) -> "WalkParams":
        """Dimensionless Dirac-walk parameters with m c^2 dt = m_dt."""
        return cls(mass=m_dt, c=1.0, dx=1.0, dt=1.0, theta=None)

    @classmethod
    def modified(cls, m_dt: float, theta: float) -> "WalkParams":
        """Dimensionless modified-walk parameters with m c^2 dt = m_dt."""
        if not 0.0 <= theta < math.pi / 2:
            raise DomainError("theta must lie in [0, pi/2)")
        dt = 2.0 * math.cos(theta)
        return cls(mass=m_dt / dt, c=1.0, dx=1.0, dt=dt, theta=theta)

    @property
    def m_dt(self) -> float:
        """Dimensionless mass m c^2 dt."""
        return self.mass * self.c * self.c * self.dt

    @property
    def model(self) -> str:
        return DIRAC if self.theta is None else MODIFIED

    def p_dx(self, p: float) -> float:
        return p * self.dx

    def zone_edge(self) -> float:
        """Brillouin-zone edge momentum pi / dx."""
        return math.pi / self.dx


def _check_model(params: WalkParams, model: str | None) -> str:
    if model is None:
        return params.model
    if model not in (DIRAC, MODIFIED):
        raise DomainError(f"unknown model {model!r}")
    if model != params.model:
        raise DomainError(f"params describe the {params.model} walk, not {model}")
    return model


@dataclass
class BlochResult:
    """Eigenpairs of a Bloch unitary at one momentum.

    Energies are on the principal branch with the labelling E_plus >= 0 and
    E_minus < 0; at an exact band degeneracy (crossing at E = 0 or at the
    branch fold) ``degenerate`` is set and the spinors span the eigenspace
    in an arbitrary orthonormal gauge.
    """

    p: float
    E_plus: float
    E_minus: float
    s_plus: np.ndarray
    s_minus: np.ndarray
    degenerate: bool = False


def u_dirac(p: float, params: WalkParams) -> np.ndarray:
    """Bloch matrix of the Dirac walk: e^{-i M sigma_x} e^{-i P sigma_z}."""
    if params.theta is not None:
        raise DomainError("u_dirac requires Dirac-walk params (theta unset)")
    P = params.p_dx(p)
    return su2_exp((1.0, 0.0, 0.0), -params.m_dt) @ su2_exp((0.0, 0.0, 1.0), -P)


def _tilted_shift(P: float, theta: float) -> np.ndarray:
    """exp(-i P (cos(theta) sigma_z + sin(theta) sigma_y)) in closed form."""
    axis = (0.0, math.sin(theta), math.cos(theta))
    return su2_exp(axis, -P)


def u_mod(p: float, params: WalkParams) -> np.ndarray:
    """Bloch matrix of the modified walk.

    Product of the mass coin with two shifts along the spin axes tilted by
    +theta and -theta; the -theta shift acts first.
    """
    if params.theta is None:
        raise DomainError("u_mod requires modified-walk params (theta set)")
    P = params.p_dx(p)
    coin = su2_exp((1.0, 0.0, 0.0), -params.m_dt)
    return coin @ _tilted_shift(P, params.theta) @ _tilted_shift(P, -params.theta)


def bloch_matrix(p: float, params: WalkParams, model: str | None = None) -> np.ndarray:
    model = _check_model(params, model)
    return u_dirac(p, params) if model == DIRAC else u_mod(p, params)


def dispersion(p: float, params: WalkParams, model: str | None = None) -> BlochResult:
    """Quasi-energies and band spinors at momentum p.

    Accepts any real p (the Bloch matrix is 2 pi / dx periodic).  The
    massless Dirac walk is handled analytically so its linear dispersion is
    exact, not a roundtrip through arccos(cos(P)).
    """
    model = _check_model(params, model)

    if model == DIRAC and params.mass == 0.0:
        P = params.p_dx(p)
        if not -math.pi < P <= math.pi:  # fold only when outside the zone
            P = float(fold_phase(P))
        alpha = abs(P)
        if alpha <= _DEGEN_TOL or abs(alpha - math.pi) <= _DEGEN_TOL:
            e = alpha / params.dt
            return BlochResult(p, e, -e, ID2[:, 0].copy(), ID2[:, 1].copy(), True)
        if P > 0:
            s_plus, s_minus = ID2[:, 0].copy(), ID2[:, 1].copy()
        else:
            s_plus, s_minus = ID2[:, 1].copy(), ID2[:, 0].copy()
        return BlochResult(p, alpha / params.dt, -alpha / params.dt, s_plus, s_minus)

    u = bloch_matrix(p, params, model)
    _, r, n = su2_split(u)
    mag = float(np.sqrt(np.dot(n, n)))
    alpha = math.atan2(mag, r)  # |E| dt in [0, pi]
    if mag <= _DEGEN_TOL:
        e = alpha / params.dt
        return BlochResult(p, e, -e, ID2[:, 0].copy(), ID2[:, 1].copy(), True)
    v_plus, v_minus = _axis_eigenvectors(n)
    # n.sigma eigenvalue +1 pairs with e^{-i alpha}, the E >= 0 branch
    return BlochResult(p, alpha / params.dt, -alpha / params.dt, v_plus, v_minus)


def continuum_energy_dt(p: float, params: WalkParams) -> float:
    """E dt of the continuum relativistic dispersion sqrt(p^2 c^2 + m^2 c^4)."""
    return float(np.hypot(p * params.c * params.dt, params.m_dt))


def dirac_spinors(p: float, params: WalkParams):
    """Continuum positive/negative-energy spinors (u, v) in the (r, l) basis.

    u_p = ( sqrt(E+pc),  sqrt(E-pc)) / sqrt(2E)
    v_p = (-sqrt(E-pc),  sqrt(E+pc)) / sqrt(2E)

    with E = sqrt(p^2 c^2 + m^2 c^4).  These are the orthonormal +-E
    eigenvectors of p c sigma_z + m c^2 sigma_x; v_p here carries momentum p
    (the momentum-reflected convention some mode expansions use is v(-p)).
    Degenerate at m = 0, p = 0.
    """
    e_dt = continuum_energy_dt(p, params)
    if e_dt == 0.0:
        raise DegenerateModeError("continuum spinors are degenerate at m = 0, p = 0")
    pc_dt = p * params.c * params.dt
    a = math.sqrt(max(e_dt + pc_dt, 0.0))
    b = math.sqrt(max(e_dt - pc_dt, 0.0))
    norm = math.sqrt(2.0 * e_dt)
    u = np.array([a, b], dtype=complex) / norm
    v = np.array([-b, a], dtype=complex) / norm
    return u, v


def cos_energy_closed_form(p: float, params: WalkParams) -> float:
    """cos(E dt) of the modified walk from the closed form (see module doc)."""
    if params.theta is None:
        raise DomainError("closed form applies to the modified walk only")
    P = params.p_dx(p)
    phi = math.pi / 2 - params.theta
    cP2 = math.cos(P) ** 2
    return math.cos(params.m_dt) * cP2 + (1.0 - cP2) * math.cos(params.m_dt + 2 * phi)


# ---------------------------------------------------------------------------
# vectorised kernels (scans, certificates, CLI)
# ---------------------------------------------------------------------------

def _coin_batch(m_dt: float, shape) -> np.ndarray:
    coin = np.array(
        [[math.cos(m_dt), -1j * math.sin(m_dt)], [-1j * math.sin(m_dt), math.cos(m_dt)]]
    )
    return np.broadcast_to(coin, shape + (2, 2))


def u_dirac_batch(P: np.ndarray, m_dt: float) -> np.ndarray:
    """Stacked Dirac Bloch matrices for an array of P = p dx values."""
    P = np.asarray(P, dtype=float)
    shift = np.zeros(P.shape + (2, 2), dtype=complex)
    shift[..., 0, 0] = np.exp(-1j * P)
    shift[..., 1, 1] = np.exp(1j * P)
    return _coin_batch(m_dt, P.shape) @ shift


def u_mod_batch(P: np.ndarray, m_dt: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Stacked modified-walk Bloch matrices; arguments broadcast together."""
    P, m_dt, theta = np.broadcast_arrays(
        np.asarray(P, dtype=float), np.asarray(m_dt, dtype=float), np.asarray(theta, dtype=float)
    )
    shape = P.shape
    cP, sP = np.cos(P), np.sin(P)
    cT, sT = np.cos(theta), np.sin(theta)

    def tilted(sign):
        out = np.zeros(shape + (2, 2), dtype=complex)
        out[..., 0, 0] = cP - 1j * sP * cT
        out[..., 1, 1] = cP + 1j * sP * cT
        off = -sP * sign * sT  # (0, 1) entry of -i sin(P) sin(theta) sigma_y
        out[..., 0, 1] = off
        out[..., 1, 0] = -off
        return out

    coin = np.zeros(shape + (2, 2), dtype=complex)
    cM, sM = np.cos(m_dt), np.sin(m_dt)
    coin[..., 0, 0] = cM
    coin[..., 1, 1] = cM
    coin[..., 0, 1] = -1j * sM
    coin[..., 1, 0] = -1j * sM
    return coin @ tilted(+1.0) @ tilted(-1.0)


def cos_energy_closed_form_batch(P, m_dt, theta) -> np.ndarray:
    P, m_dt, theta = np.broadcast_arrays(
        np.asarray(P, dtype=float), np.asarray(m_dt, dtype=float), np.asarray(theta, dtype=float)
    )
    phi = math.pi / 2 - theta
    cP2 = np.cos(P) ** 2
    return np.cos(m_dt) * cP2 + (1.0 - cP2) * np.cos(m_dt + 2 * phi)


def _cos_e_dt_scan(P: np.ndarray, params: WalkParams, model: str) -> np.ndarray:
    if model == DIRAC:
        return math.cos(params.m_dt) * np.cos(P)
    return cos_energy_closed_form_batch(P, params.m_dt, params.theta)


def momentum_grid_1d(grid_size: int, dx: float = 1.0) -> np.ndarray:
    """Uniform momentum grid over [-pi/dx, pi/dx), zone edge included at the left."""
    if grid_size < 1:
        raise DomainError("grid size must be at least 1")
    k = np.arange(grid_size)
    return (-math.pi + 2.0 * math.pi * k / grid_size) / dx


def dispersion_scan(params: WalkParams, grid_size: int, model: str | None = None):
    """(p, E_plus dt, E_minus dt) arrays over a uniform Brillouin-zone grid."""
    model = _check_model(params, model)
    p = momentum_grid_1d(grid_size, params.dx)
    P = p * params.dx  # already inside (-pi, pi], no folding needed
    if model == DIRAC and params.mass == 0.0:
        e_dt = np.abs(P)
    else:
        e_dt = np.arccos(np.clip(_cos_e_dt_scan(P, params, model), -1.0, 1.0))
    return p, e_dt, -e_dt


@dataclass(frozen=True)
class GapCertificate:
    max_abs_energy: float
    gapped: bool
    grid_size: int


def gap_certificate(params: WalkParams, grid_size: int) -> GapCertificate:
    """Scan max |E| over the zone and decide whether |E| dt < pi/2 everywhere.

    The closed form is linear in cos^2(P), so the extrema of |E| always sit
    at P in {0, +-pi/2, +-pi}; those candidates are appended to the uniform
    grid, which therefore only adds confidence, never correctness.
    """
    if params.theta is None:
        raise DomainError("gap certificate applies to the modified walk only")
    if grid_size < 64:
        raise DomainError("grid_size must be at least 64")
    p = momentum_grid_1d(grid_size, params.dx)
    edge = params.zone_edge()
    candidates = np.array([0.0, 0.5 * edge, -0.5 * edge, edge, -edge])
    P = np.concatenate([p, candidates]) * params.dx
    cos_e = np.clip(_cos_e_dt_scan(P, params, MODIFIED), -1.0, 1.0)
    max_e_dt = float(np.max(np.arccos(cos_e)))
    return GapCertificate(max_e_dt / params.dt, max_e_dt < math.pi / 2, grid_size)


def find_theta(m_dt: float, margin: float = 0.0) -> float:
    """A tilt angle guaranteeing the spectral gap for the given mass.

    The closed form keeps cos(E dt) positive whenever both cos(M) > 0 and
    cos(M + 2 phi) > 0 with phi = pi/2 - theta, i.e. for
    theta > pi/4 + M/2.  ``margin`` shrinks the admissible interval by
    requiring M + 2 phi <= pi/2 - margin; the midpoint of what remains is
    returned so both ends keep slack.
    """
    if not 0.0 <= m_dt < math.pi / 2:
        raise DomainError("gap construction requires 0 <= m c^2 dt < pi/2")
    if margin < 0.0:
        raise DomainError("margin must be non-negative")
    lo = math.pi / 4 + m_dt / 2 + margin / 2
    hi = math.pi / 2
    if lo >= hi:
        raise InfeasibleError(
            f"no tilt angle satisfies margin {margin!r} at m c^2 dt = {m_dt!r}"
        )
    return 0.5 * (lo + hi)


def boundary_swap_fidelity(p: float, params: WalkParams):
    """Band-spinor overlaps against the continuum pair at the zone edge.

    Near the zone edge the walk's positive-energy spinor approaches the
    continuum negative-energy spinor v_p and vice versa.  Returns
    (|<v_p | s_plus(pi/dx + p)>|^2, |<u_p | s_minus(pi/dx + p)>|^2).
    """
    u, v = dirac_spinors(p, params)
    edge = dispersion(p + params.zone_edge(), params)
    f_plus = abs(np.vdot(v, edge.s_plus)) ** 2
    f_minus = abs(np.vdot(u, edge.s_minus)) ** 2
    return float(f_plus), float(f_minus)


def continuum_deviation(
    params: WalkParams,
    p_max: float,
    model: str | None = None,
    grid_size: int = 513,
) -> float:
    """max |E_plus(p) - sqrt(p^2 c^2 + m^2 c^4)| over |p| <= p_max.

    Exactly zero for the massless Dirac walk, whose lattice dispersion is
    linear everywhere in the zone.
    """
    model = _check_model(params, model)
    if p_max * params.dx > math.pi:
        raise DomainError("p_max must stay inside the Brillouin zone")
    p = np.linspace(-p_max, p_max, grid_size)
    P = p * params.dx
    if model == DIRAC and params.mass == 0.0:
        e_dt = np.abs(P)
    else:
        e_dt = np.arccos(np.clip(_cos_e_dt_scan(P, params, model), -1.0, 1.0))
    target_dt = np.hypot(p * params.c * params.dt, params.m_dt)
    return float(np.max(np.abs(e_dt - target_dt))) / params.dt


def count_energy_solutions(
    params: WalkParams, energy_dt: float, grid_size: int = 8192
) -> int:
    """Number of momenta in the zone with E_plus(p) dt equal to energy_dt.

    Counted as strict sign changes of E_plus(p) dt - energy_dt around the
    periodic grid, so the value is reliable for energies strictly between
    band extrema (away from turning points).
    """
    if params.theta is None:
        model = DIRAC
    else:
        model = MODIFIED
    p = momentum_grid_1d(grid_size, params.dx)
    P = p * params.dx
    e_dt = np.arccos(np.clip(_cos_e_dt_scan(P, params, model), -1.0, 1.0))
    f = e_dt - energy_dt
    f_loop = np.append(f, f[0])
    signs = np.sign(f_loop)
    return int(np.sum(signs[:-1] * signs[1:] < 0) + np.sum(f == 0.0))
