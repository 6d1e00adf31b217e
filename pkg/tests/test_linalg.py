import numpy as np
import pytest

from dephaser.linalg import (
    DEFAULT_TOL,
    Tolerances,
    commutator,
    dagger,
    frobenius_distance,
    is_diagonal,
    kron,
    matmul,
    max_abs_diff,
    trace,
)

I2 = np.eye(2, dtype=complex)


def test_tolerances_defaults_and_validation():
    assert DEFAULT_TOL.atol_zero == 1e-10
    assert DEFAULT_TOL.atol_herm == 1e-10
    assert DEFAULT_TOL.rtol_rate == 1e-9
    with pytest.raises(ValueError):
        Tolerances(atol_zero=0.0)
    with pytest.raises(ValueError):
        Tolerances(rtol_rate=-1e-9)


def test_matmul_identity_and_involution():
    m = np.array([[1, 2j], [-2j, 3]], dtype=complex)
    np.testing.assert_array_equal(matmul(I2, m), m)
    sz = np.diag([1.0, -1.0]).astype(complex)
    np.testing.assert_array_equal(matmul(sz, sz), I2)


def test_matmul_diagonal_product():
    d = np.diag([1, 0, 0, -1]).astype(complex)
    np.testing.assert_array_equal(matmul(d, d), np.diag([1, 0, 0, 1]).astype(complex))


def test_matmul_dimension_mismatch():
    with pytest.raises(ValueError):
        matmul(I2, np.eye(3))


def test_dagger():
    herm = np.array([[1, 2 + 1j], [2 - 1j, 3]], dtype=complex)
    np.testing.assert_array_equal(dagger(herm), herm)
    raising = np.array([[0, 1], [0, 0]], dtype=complex)
    np.testing.assert_array_equal(dagger(raising), np.array([[0, 0], [1, 0]], dtype=complex))
    np.testing.assert_array_equal(dagger(np.diag([1j, 1])), np.diag([-1j, 1]))


def test_dagger_involution_exact():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    np.testing.assert_array_equal(dagger(dagger(m)), m)


def test_commutator():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert max_abs_diff(commutator(m, m), np.zeros((3, 3))) == 0
    assert max_abs_diff(commutator(np.eye(3), m), np.zeros((3, 3))) == 0

    h = np.diag([2.0, -1.0]).astype(complex)
    rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    c = commutator(h, rho)
    assert c[0, 1] == pytest.approx((2.0 - (-1.0)) * rho[0, 1])
    with pytest.raises(ValueError):
        commutator(h, np.eye(3))


def test_commutator_of_hermitians_is_traceless():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = 0.5 * (a + a.conj().T)
        rho = 0.5 * (b + b.conj().T)
        assert abs(trace(commutator(h, rho))) <= DEFAULT_TOL.atol_zero


def test_kron_convention():
    up = np.diag([1.0, 0.0]).astype(complex)
    np.testing.assert_array_equal(kron(up, I2), np.diag([1, 1, 0, 0]).astype(complex))
    np.testing.assert_array_equal(kron(I2, up), np.diag([1, 0, 1, 0]).astype(complex))
    np.testing.assert_array_equal(kron(I2, I2), np.eye(4, dtype=complex))


def test_kron_associativity():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2))
    c = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) <= DEFAULT_TOL.atol_zero


def test_is_diagonal():
    ok, witness = is_diagonal(np.diag([1, 0, 0, -1]))
    assert ok and witness is None
    ok, witness = is_diagonal(np.array([[0, 1], [1, 0]]))
    assert not ok
    assert witness == (0, 1, 1.0)
    # below the zero threshold by construction
    m = np.eye(2, dtype=complex)
    m[0, 1] = 1e-12
    ok, witness = is_diagonal(m)
    assert ok and witness is None


def test_is_diagonal_holds_for_any_eigenvalue_list():
    rng = np.random.default_rng(4)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    ok, _ = is_diagonal(np.diag(v))
    assert ok


def test_reductions():
    assert trace(np.eye(4)) == 4
    assert frobenius_distance(I2, I2) == 0
    assert max_abs_diff(np.diag([1.0, 0.0]), np.diag([0.0, 0.0])) == 1
    with pytest.raises(ValueError):
        frobenius_distance(I2, np.eye(3))
