"""Tests for the qubit-circuit layer and its second-quantised reference."""

import math

import numpy as np
import pytest

from diracwalk.circuits import (
    ANTIPERIODIC,
    PERIODIC,
    GateSpec,
    RegisterState,
    apply_circuit,
    build_circuit,
    circuit_unitary,
    equivalence_report,
    gate_matrix,
    jw_field_operator,
    parity_sectors,
    qca_reference_unitary,
    qubit_index,
    single_excitation_block,
)
from diracwalk.errors import DomainError
from diracwalk.lattice import momentum_grid
from diracwalk.spinor import unitarity_defect
from diracwalk.walk1d import WalkParams, u_dirac, u_mod

RNG = np.random.default_rng(31)


def anticommutator(a, b):
    return a @ b + b @ a


def basis_vec(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


class TestGateMatrices:
    def test_swap_action(self):
        s = gate_matrix("S")
        assert np.allclose(s @ basis_vec(4, 0b01), basis_vec(4, 0b10))
        assert np.allclose(s @ basis_vec(4, 0b10), basis_vec(4, 0b01))
        assert np.allclose(s @ basis_vec(4, 0b11), -basis_vec(4, 0b11))

    def test_mass_gate_action(self):
        m_dt = 0.37
        w = gate_matrix("Wprime", m_dt=m_dt)
        out = w @ basis_vec(4, 0b01)
        assert out[0b01] == pytest.approx(math.cos(m_dt))
        assert out[0b10] == pytest.approx(-1j * math.sin(m_dt))
        assert w[3, 3] == -1

    def test_zero_angle_degenerations(self):
        assert np.allclose(gate_matrix("Rtheta", theta=0.0), np.eye(4))
        assert np.allclose(
            gate_matrix("Wdoubleprime", m_dt=0.2, theta=0.0),
            gate_matrix("Wprime", m_dt=0.2),
        )

    def test_rx_swap_relations(self):
        # zero angle leaves the bare fermionic swap; the middle block is the
        # mass gate's with its columns exchanged
        assert np.allclose(gate_matrix("RxSwap", theta=0.0), gate_matrix("S"))
        m_dt = 0.29
        w = gate_matrix("Wprime", m_dt=m_dt)
        g = gate_matrix("RxSwap", theta=2 * m_dt)
        swap_mid = np.eye(4)[[0, 2, 1, 3]]
        assert np.allclose(g, w @ swap_mid, atol=1e-14)

    def test_all_unitary(self):
        for kind in ("S", "Wprime", "Rtheta", "Wdoubleprime", "RxSwap"):
            assert unitarity_defect(gate_matrix(kind, m_dt=0.4, theta=0.7)) <= 1e-14

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            gate_matrix("Hadamard")


class TestJordanWigner:
    @pytest.mark.parametrize("n_sites", [2, 3])
    def test_car_algebra(self, n_sites):
        creators = [
            jw_field_operator(n, a, n_sites)
            for n in range(n_sites)
            for a in ("l", "r")
        ]
        dim = creators[0].shape[0]
        for i, ci in enumerate(creators):
            for j, cj in enumerate(creators):
                assert np.max(np.abs(anticommutator(ci, cj))) <= 1e-14
                expected = np.eye(dim) if i == j else np.zeros((dim, dim))
                assert (
                    np.max(np.abs(anticommutator(ci.conj().T, cj) - expected)) <= 1e-13
                )

    def test_first_mode_has_empty_string(self):
        n_sites = 3
        vac = basis_vec(1 << (2 * n_sites), 0)
        out = jw_field_operator(0, "r", n_sites) @ vac
        target = 1 << qubit_index(0, "r", n_sites)
        assert out[target] == pytest.approx(1.0)
        assert np.linalg.norm(out) == pytest.approx(1.0)

    def test_string_sign(self):
        # creating above an occupied lower mode picks up the string sign
        n_sites = 2
        state = jw_field_operator(0, "l", n_sites) @ basis_vec(16, 0)
        out = jw_field_operator(1, "l", n_sites) @ state
        occupied = (1 << 0) | (1 << 2)
        assert out[occupied] == pytest.approx(-1.0)  # one Z below gives -1


class TestBuildCircuit:
    def test_dirac_gate_count(self):
        params = WalkParams.dirac(0.2)
        circuit = build_circuit("dirac", 2, params)
        kinds = [g.kind for g in circuit]
        assert kinds.count("S") == 2 and kinds.count("RxSwap") == 2
        assert len(circuit) == 4

    def test_modified_layer_structure(self):
        params = WalkParams.modified(0.2, 0.9)
        circuit = build_circuit("modified", 4, params)
        kinds = [g.kind for g in circuit]
        assert kinds[:4] == ["Rtheta"] * 4
        assert kinds.count("S") == 8
        assert kinds.count("RxSwap") == 8

    def test_massless_swap_network_shifts(self):
        # with no mass the step is a pure fermionic-swap network; on single
        # excitations it must act as the bare chirality shift
        n_sites = 4
        params = WalkParams.dirac(0.0)
        circuit = build_circuit("dirac", n_sites, params)
        u = circuit_unitary(circuit, n_sites)
        for n in range(n_sites):
            src = 1 << qubit_index(n, "r", n_sites)
            dst = 1 << qubit_index(n + 1, "r", n_sites)
            assert u[dst, src] == pytest.approx(1.0)
            src = 1 << qubit_index(n, "l", n_sites)
            dst = 1 << qubit_index(n - 1, "l", n_sites)
            assert u[dst, src] == pytest.approx(1.0)

    def test_zero_tilt_is_dirac_plus_extra_shift(self):
        m_dt = 0.2
        n_sites = 2
        mod = circuit_unitary(
            build_circuit("modified", n_sites, WalkParams.modified(m_dt, 0.0)), n_sites
        )
        dirac = circuit_unitary(
            build_circuit("dirac", n_sites, WalkParams.dirac(m_dt)), n_sites
        )
        shift_net = circuit_unitary(
            build_circuit("dirac", n_sites, WalkParams.dirac(0.0)), n_sites
        )
        assert np.max(np.abs(mod - dirac @ shift_net)) <= 1e-12

    def test_odd_sites_rejected(self):
        with pytest.raises(DomainError):
            build_circuit("dirac", 3, WalkParams.dirac(0.1))


class TestApplyCircuit:
    def test_identity_circuit(self):
        state = RegisterState.vacuum(2)
        assert np.array_equal(apply_circuit(state, []).vector, state.vector)

    def test_single_swap(self):
        state = RegisterState.basis(2, [qubit_index(1, "l", 2)])
        gate = GateSpec("S", (qubit_index(0, "r", 2), qubit_index(1, "l", 2)), 0.0, gate_matrix("S"))
        out = apply_circuit(state, [gate])
        expected = RegisterState.basis(2, [qubit_index(0, "r", 2)])
        assert np.array_equal(out.vector, expected.vector)

    def test_norm_preserved_random_circuit(self):
        n_sites = 3
        vec = RNG.normal(size=1 << 6) + 1j * RNG.normal(size=1 << 6)
        state = RegisterState(n_sites, vec / np.linalg.norm(vec))
        gates = []
        for _ in range(100):
            q0, q1 = RNG.choice(6, size=2, replace=False)
            kind = RNG.choice(["S", "Wprime", "Rtheta", "RxSwap"])
            gates.append(
                GateSpec(kind, (int(q0), int(q1)), 0.5, gate_matrix(kind, m_dt=0.3, theta=0.5))
            )
        out = apply_circuit(state, gates)
        assert abs(out.norm() - 1.0) <= 1e-12

    def test_bad_qubit_rejected(self):
        state = RegisterState.vacuum(2)
        gate = GateSpec("S", (0, 9), 0.0, gate_matrix("S"))
        with pytest.raises(DomainError):
            apply_circuit(state, [gate])

    def test_register_cap(self):
        with pytest.raises(DomainError):
            RegisterState.vacuum(8)


class TestReferenceUnitary:
    def test_shift_conjugation(self):
        n_sites = 3
        params = WalkParams.dirac(0.0)
        t = qca_reference_unitary("dirac", n_sites, params)
        for n in range(n_sites):
            lhs = t @ jw_field_operator(n, "r", n_sites) @ t.conj().T
            rhs = jw_field_operator((n + 1) % n_sites, "r", n_sites)
            assert np.max(np.abs(lhs - rhs)) <= 1e-12
            lhs = t @ jw_field_operator(n, "l", n_sites) @ t.conj().T
            rhs = jw_field_operator((n - 1) % n_sites, "l", n_sites)
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_mass_mixing_conjugation(self):
        n_sites = 2
        m_dt = 0.41
        params = WalkParams.dirac(m_dt)
        # isolate the mass factor by comparing against the massless shift
        u = qca_reference_unitary("dirac", n_sites, params)
        t = qca_reference_unitary("dirac", n_sites, WalkParams.dirac(0.0))
        w = u @ t.conj().T
        ann_r = jw_field_operator(0, "r", n_sites).conj().T
        ann_l = jw_field_operator(0, "l", n_sites).conj().T
        lhs = w @ ann_r @ w.conj().T
        rhs = math.cos(m_dt) * ann_r + 1j * math.sin(m_dt) * ann_l
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_vacuum_invariance(self):
        params = WalkParams.modified(0.3, 1.0)
        u = qca_reference_unitary("modified", 2, params)
        vac = basis_vec(u.shape[0], 0)
        overlap = np.vdot(vac, u @ vac)
        assert abs(abs(overlap) - 1.0) <= 1e-12

    def test_single_particle_blocks(self):
        n_sites = 4
        params = WalkParams.dirac(0.2)
        u = qca_reference_unitary("dirac", n_sites, params)
        block = single_excitation_block(u, n_sites)
        momenta = momentum_grid(n_sites)
        fourier = np.zeros((2 * n_sites, 2 * n_sites), dtype=complex)
        sites = np.arange(n_sites)
        for k, p in enumerate(momenta):
            row = np.exp(-1j * p * sites) / math.sqrt(n_sites)
            fourier[2 * k, 0::2] = row      # l rows (register order)
            fourier[2 * k + 1, 1::2] = row  # r rows
        m = fourier @ block @ fourier.conj().T
        for k, p in enumerate(momenta):
            got = m[2 * k : 2 * k + 2, 2 * k : 2 * k + 2]
            expected = u_dirac(p, params)[::-1, ::-1]  # (l, r) ordering here
            assert np.max(np.abs(got - expected)) <= 1e-10

    def test_size_cap(self):
        with pytest.raises(DomainError):
            qca_reference_unitary("dirac", 6, WalkParams.dirac(0.1))


class TestEquivalence:
    def test_massless_two_sites(self):
        report = equivalence_report("dirac", 2, WalkParams.dirac(0.0))
        assert report.max_deviation <= 1e-12

    def test_massive_two_sites(self):
        report = equivalence_report("dirac", 2, WalkParams.dirac(0.2))
        assert report.max_deviation <= 1e-12

    def test_modified_two_sites(self):
        params = WalkParams.modified(0.2, 3 * math.pi / 8)
        report = equivalence_report("modified", 2, params)
        assert report.max_deviation <= 1e-12

    def test_even_sector_needs_antiperiodic(self):
        # the bare closure gate flips the boundary transport sign in the
        # even-parity sector: the periodic reference disagrees there by O(1)
        n_sites = 2
        params = WalkParams.dirac(0.3)
        circuit_u = circuit_unitary(build_circuit("dirac", n_sites, params), n_sites)
        even, odd = parity_sectors(2 * n_sites)
        periodic = qca_reference_unitary("dirac", n_sites, params, PERIODIC)
        anti = qca_reference_unitary("dirac", n_sites, params, ANTIPERIODIC)
        sub = np.ix_(even, even)
        assert np.max(np.abs(circuit_u[sub] - anti[sub])) <= 1e-12
        assert np.max(np.abs(circuit_u[sub] - periodic[sub])) > 0.5
        sub = np.ix_(odd, odd)
        assert np.max(np.abs(circuit_u[sub] - periodic[sub])) <= 1e-12

    def test_size_cap(self):
        with pytest.raises(DomainError):
            equivalence_report("dirac", 6, WalkParams.dirac(0.1))


class TestCircuitProperties:
    def test_particle_number_conserved(self):
        n_sites = 2
        params = WalkParams.modified(0.4, 0.8)
        u = circuit_unitary(build_circuit("modified", n_sites, params), n_sites)
        dim = u.shape[0]
        counts = np.array([bin(i).count("1") for i in range(dim)])
        for total in range(2 * n_sites + 1):
            inside = counts == total
            leak = u[np.ix_(~inside, inside)]
            assert np.max(np.abs(leak)) <= 1e-12

    def test_vacuum_invariant_up_to_phase(self):
        n_sites = 4
        params = WalkParams.dirac(0.7)
        u = circuit_unitary(build_circuit("dirac", n_sites, params), n_sites)
        vac = basis_vec(u.shape[0], 0)
        assert abs(abs(np.vdot(vac, u @ vac)) - 1.0) <= 1e-12

    def test_single_excitation_blocks_match_bloch(self):
        n_sites = 4
        params = WalkParams.modified(0.2, 1.1)
        u = circuit_unitary(build_circuit("modified", n_sites, params), n_sites)
        block = single_excitation_block(u, n_sites)
        momenta = momentum_grid(n_sites)
        sites = np.arange(n_sites)
        fourier = np.zeros((2 * n_sites, 2 * n_sites), dtype=complex)
        for k, p in enumerate(momenta):
            row = np.exp(-1j * p * sites) / math.sqrt(n_sites)
            fourier[2 * k, 0::2] = row
            fourier[2 * k + 1, 1::2] = row
        m = fourier @ block @ fourier.conj().T
        for k, p in enumerate(momenta):
            got = m[2 * k : 2 * k + 2, 2 * k : 2 * k + 2]
            expected = u_mod(p, params)[::-1, ::-1]
            assert np.max(np.abs(got - expected)) <= 1e-10
