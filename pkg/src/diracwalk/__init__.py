"""Discrete-spacetime Dirac walk toolkit.

Single-particle quantum walks on 1-D and 3-D lattices, their quasi-energy
band structure on the circle, occupation-level Dirac-sea bookkeeping with
modular energy arithmetic, and exact qubit-circuit realisations of the
second-quantised step, all cross-verified against each other.
"""

from .errors import (
    DegenerateModeError,
    DomainError,
    InfeasibleError,
    NumericalCheckError,
    OccupancyError,
)
from .spinor import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    eig_unitary,
    fold_phase,
    principal_energy,
    rotated_sigma,
    su2_exp,
)
from .walk1d import (
    DIRAC,
    MODIFIED,
    BlochResult,
    WalkParams,
    boundary_swap_fidelity,
    continuum_deviation,
    cos_energy_closed_form,
    count_energy_solutions,
    dirac_spinors,
    dispersion,
    dispersion_scan,
    find_theta,
    gap_certificate,
    u_dirac,
    u_mod,
)
from .lattice import LatticeState, dft, idft, momentum_grid, step, step_dirac, step_mod, support
from .fock import (
    ANNIHILATE,
    ANTI,
    CREATE,
    MINUS,
    PLUS,
    FockLayout,
    ModeBasis,
    ModeEvent,
    SeaState,
    antiparticle_relabel,
    band_energy,
    mode_basis,
    modular_delta_e,
    one_particle_blocks,
    sea_energy,
    sigma_spinor_limits,
    step_sea,
)
from .circuits import (
    EquivalenceReport,
    GateSpec,
    RegisterState,
    apply_circuit,
    build_circuit,
    circuit_unitary,
    equivalence_report,
    gate_matrix,
    jw_field_operator,
    qca_reference_unitary,
)
from .walk3d import (
    Bloch3Result,
    GapScan3D,
    PointClassification,
    classify_point,
    dispersion3,
    gap_scan_3d,
    u_3d,
    u_3d_mod,
)

__version__ = "0.1.0"
