import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdcat import observables as obs
from cdcat.spectrum import GroundSubspace, ground_subspace
from cdcat.spin_ops import basis_state, build_sx, build_sz2, cat_state, coherent_x_state

from conftest import random_state


def h_final(N, J=1.0):
    return (-2 * J / N) * build_sz2(N)


def test_coherent_state_is_x_polarized():
    N = 40
    psi = coherent_x_state(N)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-13)
    assert build_sx(N).expect(psi) == pytest.approx(N / 2, abs=1e-10)


class TestFidelity:
    def test_ground_state_and_orthogonal(self):
        N = 30
        h = (-2 / N) * build_sz2(N) + (-4.0) * build_sx(N)
        sub = ground_subspace(h, 2.0)
        assert obs.fidelity_to_subspace(sub.vectors[:, 0], sub) == pytest.approx(1.0, abs=1e-12)
        odd = basis_state(N, 15) - basis_state(N, -15)
        odd /= np.linalg.norm(odd)
        assert obs.fidelity_to_subspace(odd, sub) == pytest.approx(0.0, abs=1e-12)

    def test_two_dim_superposition(self):
        N = 30
        sub = ground_subspace(h_final(N) + (-1.0) * build_sx(N), 0.5)
        psi = (sub.vectors[:, 0] + sub.vectors[:, 1]) / math.sqrt(2)
        assert obs.fidelity_to_subspace(psi, sub) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
    def test_invariant_under_basis_remixing(self, seed, theta, phi):
        rng = np.random.default_rng(seed)
        N = 16
        sub = ground_subspace(h_final(N) + (-0.6) * build_sx(N), 0.3)
        u = np.array([[math.cos(theta), -np.exp(1j * phi) * math.sin(theta)],
                      [np.exp(-1j * phi) * math.sin(theta), math.cos(theta)]])
        mixed = GroundSubspace(sub.vectors @ u, sub.energies)
        psi = random_state(rng, N)
        assert obs.fidelity_to_subspace(psi, mixed) == pytest.approx(
            obs.fidelity_to_subspace(psi, sub), abs=1e-12)
        assert 0.0 <= obs.fidelity_to_subspace(psi, sub) <= 1.0


class TestResidualEnergy:
    def test_examples(self):
        N = 50
        assert obs.residual_energy(basis_state(N, 25), h_final(N), 1.0, N) == pytest.approx(0.0, abs=1e-12)
        assert obs.residual_energy(basis_state(N, 0), h_final(N), 1.0, N) == pytest.approx(N / 2)
        assert obs.residual_energy(cat_state(N), h_final(N), 1.0, N) == pytest.approx(0.0, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 120))
    def test_nonnegative(self, seed, N):
        psi = random_state(np.random.default_rng(seed), N)
        assert obs.residual_energy(psi, h_final(N), 1.0, N) >= -1e-9 * N


class TestMagnetization:
    def test_cat(self):
        assert obs.order_parameter(cat_state(20), 20) == pytest.approx(1.0, abs=1e-14)
        assert obs.incomplete_magnetization(cat_state(20), 20) == pytest.approx(0.0, abs=1e-14)

    def test_m_zero(self):
        assert obs.order_parameter(basis_state(20, 0), 20) == 0.0
        assert obs.incomplete_magnetization(basis_state(20, 0), 20) == 1.0

    @pytest.mark.parametrize("N", [4, 25, 100, 1000])
    def test_coherent_state(self, N):
        # <S_z^2> = S/2 for an x-polarized coherent state
        assert obs.order_parameter(coherent_x_state(N), N) == pytest.approx(math.sqrt(1 / N), rel=1e-10)

    def test_coherent_state_n100(self):
        assert obs.incomplete_magnetization(coherent_x_state(100), 100) == pytest.approx(0.9, rel=1e-10)


class TestQfi:
    @pytest.mark.parametrize("N", [1, 2, 10, 100, 1000])
    def test_anchors(self, N):
        assert obs.qfi(cat_state(N)) == pytest.approx(N**2, rel=1e-9)
        assert obs.qfi(coherent_x_state(N)) == pytest.approx(N, rel=1e-9)
        assert obs.qfi(basis_state(N, N / 2 - 1)) == pytest.approx(0.0, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 200))
    def test_bounds(self, seed, N):
        psi = random_state(np.random.default_rng(seed), N)
        q = obs.qfi(psi)
        assert -1e-9 <= q <= N**2 * (1 + 1e-12)

    def test_reference_lines(self):
        assert obs.dicke_qfi(100) == 5100
        assert obs.standard_quantum_limit(100) == 100
        assert obs.heisenberg_limit(100) == 10_000
        assert obs.is_entangled(101.0, 100) and not obs.is_entangled(100.0, 100)


def test_diagnostics_row():
    smp = obs.DiagnosticsSample(0.5, 0.5, 0.9, -3.0, 1.0, 0.7, 0.3, 12.0)
    assert smp.row() == [0.5, 0.5, 0.9, -3.0, 1.0, 0.7, 0.3, 12.0]
    assert obs.DiagnosticsSample.COLUMNS[0] == "t"
