import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdcat.spin_ops import (
    SpinOperator,
    build_cd_term,
    build_sx,
    build_sy,
    build_sz,
    build_sz2,
    m_values,
)

from conftest import dense_spin, reflection


def test_sz_small():
    np.testing.assert_array_equal(build_sz(2).diag, [-1, 0, 1])
    np.testing.assert_array_equal(build_sz(1).diag, [-0.5, 0.5])
    assert build_sz(2).bandwidth == 0


def test_sz_large_max_entry():
    assert build_sz(1000).diag.max() == 500
    assert build_sz(1000).dim == 1001


@pytest.mark.parametrize("bad", [0, -3])
def test_rejects_nonpositive_n(bad):
    with pytest.raises(ValueError):
        build_sz(bad)


def test_rejects_non_integer_n():
    with pytest.raises(TypeError):
        build_sx(2.5)


def test_sx_entries():
    np.testing.assert_allclose(build_sx(1).off, [0.5])
    np.testing.assert_allclose(build_sx(2).off, [1 / np.sqrt(2)] * 2, rtol=1e-15)
    # <m=1|S_x|m=0> for S=2; index of m=0 is 2
    assert build_sx(4).off[2] == pytest.approx(np.sqrt(6) / 2, rel=1e-15)
    assert build_sx(4).is_real


def test_sy_pauli():
    sy = build_sy(1).to_dense()
    np.testing.assert_allclose(sy, [[0, 0.5j], [-0.5j, 0]])


@pytest.mark.parametrize("N", [1, 2, 5, 6, 17, 64])
def test_matches_dense_oracle(N):
    sx, sy, sz = dense_spin(N)
    np.testing.assert_allclose(build_sx(N).to_dense(), sx, atol=1e-13)
    np.testing.assert_allclose(build_sy(N).to_dense(), sy, atol=1e-13)
    np.testing.assert_allclose(build_sz(N).to_dense(), sz, atol=1e-13)


def test_commutator_n6():
    sx, sy, sz = (op.to_dense() for op in (build_sx(6), build_sy(6), build_sz(6)))
    np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-12)


def test_casimir_n5():
    ops = [build_sx(5).to_dense(), build_sy(5).to_dense(), build_sz(5).to_dense()]
    cas = sum(o @ o for o in ops)
    np.testing.assert_allclose(cas, 8.75 * np.eye(6), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=64))
def test_algebra_properties(N):
    sx, sy, sz = (op.to_dense() for op in (build_sx(N), build_sy(N), build_sz(N)))
    S = N / 2
    cas = sx @ sx + sy @ sy + sz @ sz
    assert np.abs(cas - S * (S + 1) * np.eye(N + 1)).max() < 1e-10
    for a, b, c in ((sx, sy, sz), (sy, sz, sx), (sz, sx, sy)):
        assert np.abs(a @ b - b @ a - 1j * c).max() < 1e-10
    cd = build_cd_term(N).to_dense()
    assert np.abs(cd - (sy @ sz + sz @ sy) / N).max() < 1e-12


def test_cd_term_vanishes_for_spin_half():
    cd = build_cd_term(1)
    assert np.all(cd.to_dense() == 0)
    sx, sy, sz = dense_spin(1)
    np.testing.assert_allclose(sy @ sz + sz @ sy, 0, atol=1e-15)


def test_cd_term_structure_n100():
    cd = build_cd_term(100)
    dense = cd.to_dense()
    np.testing.assert_array_equal(dense, dense.conj().T)
    assert np.all(cd.diag == 0)
    assert np.all(cd.off.real == 0)


def test_cd_term_parity_n4():
    R = reflection(4)
    _, sy, sz = dense_spin(4)
    np.testing.assert_allclose(R @ sy @ R, -sy, atol=1e-14)
    np.testing.assert_allclose(R @ sz @ R, -sz, atol=1e-14)
    cd = build_cd_term(4).to_dense()
    np.testing.assert_allclose(R @ cd @ R, cd, atol=1e-14)


def test_assembled_hamiltonian_tridiagonal():
    N = 40
    h = (-2 / N) * build_sz2(N) + (-3.0) * build_sx(N) + 0.7 * build_cd_term(N)
    dense = h.to_dense()
    i, j = np.nonzero(dense)
    assert np.max(np.abs(i - j)) <= 1
    assert h.bandwidth == 1
    np.testing.assert_array_equal(dense, dense.conj().T)


def test_matvec_and_expect(rng):
    N = 9
    h = build_sx(N) + 0.3 * build_cd_term(N) + build_sz2(N)
    psi = rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1)
    np.testing.assert_allclose(h.matvec(psi), h.to_dense() @ psi, atol=1e-12)
    assert h.expect(psi) == pytest.approx(np.vdot(psi, h.to_dense() @ psi).real, rel=1e-12)


def test_operator_is_immutable():
    op = build_sz(3)
    with pytest.raises(ValueError):
        op.diag[0] = 5.0


def test_shape_validation():
    with pytest.raises(ValueError):
        SpinOperator(np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        build_sz(3) + build_sz(4)


def test_m_values_half_integer():
    np.testing.assert_array_equal(m_values(3), [-1.5, -0.5, 0.5, 1.5])
