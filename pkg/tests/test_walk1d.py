"""Tests for the 1+1-D momentum-space analysis."""

import math

import numpy as np
import pytest

from diracwalk.errors import DegenerateModeError, DomainError, InfeasibleError
from diracwalk.spinor import SIGMA_X, SIGMA_Z, su2_exp, unitarity_defect
from diracwalk.walk1d import (
    DIRAC,
    MODIFIED,
    WalkParams,
    boundary_swap_fidelity,
    continuum_deviation,
    continuum_energy_dt,
    cos_energy_closed_form,
    cos_energy_closed_form_batch,
    count_energy_solutions,
    dirac_spinors,
    dispersion,
    dispersion_scan,
    find_theta,
    gap_certificate,
    u_dirac,
    u_dirac_batch,
    u_mod,
    u_mod_batch,
)

RNG = np.random.default_rng(7)


def eig_oracle(u):
    """Independent eigensolver: plain numpy eig with energy sorting."""
    vals, vecs = np.linalg.eig(u)
    e_dt = np.pi - np.mod(np.pi + np.angle(vals), 2 * np.pi)  # E dt = -angle(val)
    order = np.argsort(e_dt)
    return e_dt[order], vecs[:, order]


class TestParams:
    def test_dirac_constructor(self):
        p = WalkParams.dirac(0.2)
        assert p.m_dt == pytest.approx(0.2) and p.theta is None
        assert p.model == DIRAC

    def test_modified_constructor(self):
        p = WalkParams.modified(0.2, 3 * math.pi / 8)
        assert p.m_dt == pytest.approx(0.2)
        assert p.dt == pytest.approx(2 * math.cos(3 * math.pi / 8))
        assert p.model == MODIFIED

    def test_time_step_fixing_enforced(self):
        with pytest.raises(DomainError):
            WalkParams(mass=0.1, c=1.0, dx=1.0, dt=0.9, theta=None)
        with pytest.raises(DomainError):
            WalkParams(mass=0.1, c=1.0, dx=1.0, dt=1.0, theta=0.3)
        with pytest.raises(DomainError):
            WalkParams.modified(0.2, math.pi / 2)
        with pytest.raises(DomainError):
            WalkParams(mass=-0.1, c=1.0, dx=1.0, dt=1.0)


class TestBlochMatrices:
    def test_dirac_zero_momentum(self):
        p = WalkParams.dirac(0.2)
        assert np.allclose(u_dirac(0.0, p), su2_exp((1, 0, 0), -0.2), atol=1e-15)

    def test_dirac_massless_is_diagonal(self):
        p = WalkParams.dirac(0.0)
        expected = np.diag([np.exp(-0.3j), np.exp(0.3j)])
        assert np.allclose(u_dirac(0.3, p), expected, atol=1e-15)

    def test_dirac_zone_edge_sign(self):
        # shifting the momentum by the zone width multiplies U by -1
        p = WalkParams.dirac(0.37)
        assert np.allclose(u_dirac(math.pi, p), -su2_exp((1, 0, 0), -0.37), atol=1e-13)

    def test_mod_zero_momentum_is_coin(self):
        p = WalkParams.modified(0.2, math.pi / 8)
        assert np.allclose(u_mod(0.0, p), su2_exp((1, 0, 0), -0.2), atol=1e-15)

    def test_mod_zero_tilt_is_double_shift(self):
        p = WalkParams.modified(0.2, 0.0)
        momentum = 0.41
        expected = (
            su2_exp((1, 0, 0), -0.2)
            @ su2_exp((0, 0, 1), -momentum)
            @ su2_exp((0, 0, 1), -momentum)
        )
        assert np.allclose(u_mod(momentum, p), expected, atol=1e-14)

    def test_mod_massless_trace(self):
        theta = math.pi / 8
        phi = math.pi / 2 - theta
        p = WalkParams.modified(0.0, theta)
        got = np.trace(u_mod(0.3, p)).real / 2
        expected = math.cos(0.3) ** 2 + math.sin(0.3) ** 2 * math.cos(2 * phi)
        assert got == pytest.approx(expected, abs=1e-14)

    def test_unitarity_random(self):
        pd = WalkParams.dirac(0.37)
        pm = WalkParams.modified(0.61, 1.1)
        for momentum in RNG.uniform(-math.pi, math.pi, size=1000):
            assert unitarity_defect(u_dirac(momentum, pd)) <= 1e-12
            assert unitarity_defect(u_mod(momentum, pm)) <= 1e-12

    def test_periodicity(self):
        p = WalkParams.dirac(0.29)
        for momentum in RNG.uniform(-math.pi, math.pi, size=50):
            lhs = u_dirac(momentum + 2 * math.pi, p)
            assert np.max(np.abs(lhs - u_dirac(momentum, p))) <= 1e-12

    def test_batched_builders_match_scalar(self):
        moms = RNG.uniform(-math.pi, math.pi, size=64)
        pd = WalkParams.dirac(0.23)
        batch = u_dirac_batch(moms, 0.23)
        for i, momentum in enumerate(moms):
            assert np.allclose(batch[i], u_dirac(momentum, pd), atol=1e-14)
        pm = WalkParams.modified(0.41, 0.9)
        batch = u_mod_batch(moms, 0.41, 0.9)
        for i, momentum in enumerate(moms):
            assert np.allclose(batch[i], u_mod(momentum, pm), atol=1e-14)


class TestDispersion:
    def test_zero_momentum_massive(self):
        b = dispersion(0.0, WalkParams.dirac(0.2))
        assert b.E_plus == pytest.approx(0.2, abs=1e-14)
        assert b.E_minus == pytest.approx(-0.2, abs=1e-14)
        assert np.allclose(b.s_plus, np.array([1, 1]) / math.sqrt(2), atol=1e-12)
        assert np.allclose(b.s_minus, np.array([1, -1]) / math.sqrt(2), atol=1e-12)

    def test_massless_linear(self):
        b = dispersion(0.3, WalkParams.dirac(0.0))
        assert b.E_plus == 0.3 and b.E_minus == -0.3

    def test_quarter_zone_crossing(self):
        # cos(E dt) = cos(m dt) cos(p dx) vanishes at p dx = pi/2
        params = WalkParams.dirac(0.2)
        b = dispersion(math.pi / 2, params)
        e_oracle, _ = eig_oracle(u_dirac(math.pi / 2, params))
        assert b.E_plus == pytest.approx(math.pi / 2, abs=1e-12)
        assert b.E_plus == pytest.approx(float(e_oracle[1]), abs=1e-12)

    def test_modified_band_bound(self):
        params = WalkParams.modified(0.2, 3 * math.pi / 8)
        _, e_plus_dt, _ = dispersion_scan(params, 2048)
        assert np.max(np.abs(e_plus_dt)) < math.pi / 2

    def test_eigen_relations_random(self):
        pd = WalkParams.dirac(0.35)
        pm = WalkParams.modified(0.45, 1.0)
        for params in (pd, pm):
            for momentum in RNG.uniform(-math.pi, math.pi, size=200):
                b = dispersion(momentum, params)
                if b.degenerate:
                    continue
                u = u_dirac(momentum, params) if params.theta is None else u_mod(momentum, params)
                for energy, vec in ((b.E_plus, b.s_plus), (b.E_minus, b.s_minus)):
                    phase = np.exp(-1j * energy * params.dt)
                    assert np.max(np.abs(u @ vec - phase * vec)) <= 1e-10
                assert abs(np.vdot(b.s_plus, b.s_minus)) <= 1e-10
                assert b.E_plus >= 0 and b.E_minus < 0
                assert b.E_minus == pytest.approx(-b.E_plus, abs=1e-12)

    def test_trace_identity_dirac(self):
        params = WalkParams.dirac(0.52)
        for momentum in RNG.uniform(-math.pi, math.pi, size=200):
            got = np.trace(u_dirac(momentum, params)).real / 2
            assert got == pytest.approx(
                math.cos(0.52) * math.cos(momentum), abs=1e-12
            )

    def test_degenerate_fold_flagged(self):
        b = dispersion(math.pi, WalkParams.dirac(0.0))
        assert b.degenerate and b.E_plus == pytest.approx(math.pi)

    def test_model_mismatch_rejected(self):
        with pytest.raises(DomainError):
            dispersion(0.1, WalkParams.dirac(0.2), MODIFIED)


class TestDiracSpinors:
    def test_rest_frame(self):
        u, v = dirac_spinors(0.0, WalkParams.dirac(0.2))
        assert np.allclose(u, np.array([1, 1]) / math.sqrt(2), atol=1e-14)
        assert np.allclose(v, np.array([-1, 1]) / math.sqrt(2), atol=1e-14)

    def test_massless_chirality(self):
        u, v = dirac_spinors(0.5, WalkParams.dirac(0.0))
        assert np.allclose(u, [1, 0], atol=1e-14)
        assert np.allclose(v, [0, 1], atol=1e-14)

    def test_against_hamiltonian_oracle(self):
        # mc^2 = 1, pc = 0.75: E = 1.25, u = (sqrt(2), sqrt(0.5)) / sqrt(2.5)
        params = WalkParams.dirac(1.0)
        momentum = 0.75
        u, v = dirac_spinors(momentum, params)
        assert continuum_energy_dt(momentum, params) == pytest.approx(1.25)
        expected_u = np.array([math.sqrt(2.0), math.sqrt(0.5)]) / math.sqrt(2.5)
        assert np.allclose(u, expected_u, atol=1e-14)
        # oracle: diagonalise the continuum Hamiltonian pc sigma_z + mc^2 sigma_x
        ham = momentum * SIGMA_Z + 1.0 * SIGMA_X
        vals, vecs = np.linalg.eigh(ham)
        v_oracle = vecs[:, 0] * np.sign(vecs[np.argmax(np.abs(vecs[:, 0]) > 0), 0].real or 1)
        u_oracle = vecs[:, 1]
        assert abs(abs(np.vdot(u, u_oracle)) - 1) <= 1e-12
        assert abs(abs(np.vdot(v, v_oracle)) - 1) <= 1e-12
        assert abs(np.vdot(u, v)) <= 1e-14
        assert np.linalg.norm(u) == pytest.approx(1.0) and np.linalg.norm(v) == pytest.approx(1.0)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateModeError):
            dirac_spinors(0.0, WalkParams.dirac(0.0))


class TestClosedForm:
    def test_zero_momentum(self):
        params = WalkParams.modified(0.3, 0.7)
        assert cos_energy_closed_form(0.0, params) == pytest.approx(math.cos(0.3), abs=1e-15)

    def test_quarter_zone(self):
        params = WalkParams.modified(0.3, 0.7)
        phi = math.pi / 2 - 0.7
        assert cos_energy_closed_form(math.pi / 2, params) == pytest.approx(
            math.cos(0.3 + 2 * phi), abs=1e-14
        )

    def test_matches_trace_everywhere(self):
        for _ in range(500):
            m_dt = RNG.uniform(0, math.pi / 2)
            theta = RNG.uniform(0, math.pi / 2 - 1e-9)
            momentum = RNG.uniform(-math.pi, math.pi)
            params = WalkParams.modified(m_dt, theta)
            got = np.trace(u_mod(momentum, params)).real / 2
            assert abs(got - cos_energy_closed_form(momentum, params)) <= 1e-12

    def test_batch_matches_scalar(self):
        moms = RNG.uniform(-math.pi, math.pi, size=32)
        params = WalkParams.modified(0.2, 1.1)
        batch = cos_energy_closed_form_batch(moms, 0.2, 1.1)
        for i, momentum in enumerate(moms):
            assert batch[i] == pytest.approx(cos_energy_closed_form(momentum, params), abs=1e-14)


class TestGapCertificate:
    def test_reference_angle_is_gapped(self):
        params = WalkParams.modified(0.2, 3 * math.pi / 8)
        cert = gap_certificate(params, 4096)
        assert cert.gapped
        assert cert.max_abs_energy * params.dt < math.pi / 2

    def test_untilted_walk_is_not_gapped(self):
        # closed form at theta = 0 reduces to cos(m dt) cos(2 p dx), whose
        # arccos peaks at pi - m dt
        params = WalkParams.modified(0.2, 0.0)
        cert = gap_certificate(params, 512)
        assert not cert.gapped
        assert cert.max_abs_energy * params.dt == pytest.approx(math.pi - 0.2, abs=1e-12)

    def test_massless_tilt_threshold(self):
        # pi/4 is exactly marginal for a massless walk: the band maximum
        # touches pi/2 there, and any tilt strictly above it opens the gap
        params = WalkParams.modified(0.0, math.pi / 4)
        marginal = gap_certificate(params, 512)
        assert not marginal.gapped
        assert marginal.max_abs_energy * params.dt == pytest.approx(math.pi / 2, abs=1e-12)
        assert gap_certificate(WalkParams.modified(0.0, math.pi / 4 + 0.02), 512).gapped

    def test_small_grid_rejected(self):
        with pytest.raises(DomainError):
            gap_certificate(WalkParams.modified(0.2, 1.2), 32)


class TestFindTheta:
    def test_basic_interval(self):
        theta = find_theta(0.2)
        assert math.pi / 4 + 0.1 < theta < math.pi / 2
        assert gap_certificate(WalkParams.modified(0.2, theta), 512).gapped

    def test_reference_angle_feasible(self):
        # 3 pi / 8 clears the feasibility threshold pi/4 + 0.1 at m dt = 0.2
        assert 3 * math.pi / 8 > math.pi / 4 + 0.2 / 2

    def test_massless_case(self):
        theta = find_theta(0.0)
        assert theta > math.pi / 4
        assert gap_certificate(WalkParams.modified(0.0, theta), 512).gapped

    def test_out_of_hypothesis(self):
        with pytest.raises(DomainError):
            find_theta(math.pi / 2)

    def test_infeasible_margin(self):
        with pytest.raises(InfeasibleError):
            find_theta(0.4, margin=math.pi / 2 - 0.4)


class TestBoundarySwap:
    def test_massless_exact_swap(self):
        f_plus, f_minus = boundary_swap_fidelity(0.05, WalkParams.dirac(0.0))
        assert f_plus == pytest.approx(1.0, abs=1e-12)
        assert f_minus == pytest.approx(1.0, abs=1e-12)

    def test_small_mass_small_momentum(self):
        f_plus, f_minus = boundary_swap_fidelity(0.05, WalkParams.dirac(0.05))
        assert f_plus >= 0.99 and f_minus >= 0.99

    def test_energy_reflection(self):
        params = WalkParams.dirac(0.05)
        for momentum in (0.01, 0.03, 0.05):
            shifted = dispersion(math.pi + momentum, params)
            target = math.pi - continuum_energy_dt(momentum, params)
            assert abs(shifted.E_plus - target) <= 1e-2

    def test_oracle_cross_check(self):
        # same fidelity via a plain numpy diagonalisation of U(pi/dx + p)
        params = WalkParams.dirac(0.05)
        momentum = 0.04
        _, v = dirac_spinors(momentum, params)
        e_dt, vecs = eig_oracle(u_dirac(math.pi + momentum, params))
        f_plus_oracle = abs(np.vdot(v, vecs[:, 1])) ** 2
        f_plus, _ = boundary_swap_fidelity(momentum, params)
        assert f_plus == pytest.approx(f_plus_oracle, abs=1e-10)


class TestContinuumDeviation:
    def test_massless_exact(self):
        assert continuum_deviation(WalkParams.dirac(0.0), 0.3) == 0.0

    def test_dirac_quadratic_error(self):
        assert continuum_deviation(WalkParams.dirac(0.1), 0.1) <= 1e-2

    def test_modified_quadratic_error(self):
        params = WalkParams.modified(0.1, 3 * math.pi / 8)
        assert continuum_deviation(params, 0.1 / params.dx) <= 2e-2 / params.dt


class TestDoublingCount:
    def test_four_solutions_generic_energy(self):
        params = WalkParams.modified(0.2, math.pi / 8)
        assert count_energy_solutions(params, 1.0) == 4

    def test_dirac_has_two(self):
        assert count_energy_solutions(WalkParams.dirac(0.2), 0.9) == 2
