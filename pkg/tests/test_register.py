import numpy as np
import pytest

from dephaser.linalg import DEFAULT_TOL, max_abs_diff
from dephaser.register import (
    BasisState,
    SpinFlipPath,
    bell_state,
    density_from_pure,
    ghz_chain,
    ghz_state,
    hamming_path,
    product_state,
    validate_density,
)

R = 1 / np.sqrt(2)


def test_basis_state_index_convention():
    # up -> 0, down -> 1, qubit 1 most significant
    assert BasisState((0, 1, 1)).index == 3
    assert str(BasisState((0, 1, 1))) == "udd"
    assert BasisState.from_string("ud d") == BasisState((0, 1, 1))
    assert BasisState.from_index(5, 3).bits == (1, 0, 1)


def test_index_bits_bijection_exhaustive():
    for n in range(1, 11):
        for idx in range(2**n):
            assert BasisState.from_index(idx, n).index == idx


def test_basis_state_validation():
    with pytest.raises(ValueError):
        BasisState(())
    with pytest.raises(ValueError):
        BasisState((0, 2))
    with pytest.raises(ValueError):
        BasisState.from_string("uxd")
    with pytest.raises(ValueError):
        BasisState.from_index(8, 3)


def test_ghz_state():
    psi2 = ghz_state(2)
    np.testing.assert_allclose(psi2, [R, 0, 0, R])  # the phi_plus Bell state
    np.testing.assert_allclose(ghz_state(1), [R, R])
    psi3 = ghz_state(3)
    assert np.flatnonzero(psi3).tolist() == [0, 7]
    with pytest.raises(ValueError):
        ghz_state(0)
    with pytest.raises(ValueError):
        ghz_state(11)


def test_bell_states():
    np.testing.assert_allclose(bell_state("phi_plus"), [R, 0, 0, R])
    np.testing.assert_allclose(bell_state("psi_minus"), [0, R, -R, 0])
    assert abs(np.vdot(bell_state("psi_plus"), bell_state("psi_minus"))) == 0
    with pytest.raises(ValueError):
        bell_state("sigma_plus")


def test_ghz_chain():
    assert ghz_chain(2).indices == (3, 1, 0)
    assert ghz_chain(1).indices == (1, 0)
    assert ghz_chain(3).indices == (7, 3, 1, 0)
    for n in range(1, 8):
        chain = ghz_chain(n)
        assert chain.n_links == n  # adjacency is enforced by the constructor


def test_spin_flip_path_adjacency():
    with pytest.raises(ValueError):
        SpinFlipPath((BasisState((0, 0)), BasisState((1, 1))))
    path = SpinFlipPath((BasisState((0, 0)), BasisState((0, 1))))
    assert path.n_links == 1


def test_hamming_path():
    p = hamming_path(BasisState.from_string("udu"), BasisState.from_string("ddd"))
    assert [str(s) for s in p] == ["udu", "ddu", "ddd"]
    same = hamming_path(BasisState((0, 1)), BasisState((0, 1)))
    assert len(same) == 1 and same.n_links == 0
    np2 = hamming_path(BasisState.from_string("dd"), BasisState.from_string("uu"))
    assert np2.indices == ghz_chain(2).indices[::-1]
    with pytest.raises(ValueError):
        hamming_path(BasisState((0,)), BasisState((0, 1)))


def test_hamming_path_length_is_popcount():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        a = BasisState.from_index(int(rng.integers(2**n)), n)
        b = BasisState.from_index(int(rng.integers(2**n)), n)
        p = hamming_path(a, b)
        assert p.n_links == bin(a.index ^ b.index).count("1")


def test_density_from_pure():
    np.testing.assert_allclose(density_from_pure([1, 0]), np.diag([1.0, 0.0]))
    rho = density_from_pure(bell_state("phi_plus"))
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    np.testing.assert_allclose(rho, expected, atol=1e-15)
    assert np.trace(rho).real == pytest.approx(1.0)
    with pytest.raises(ValueError):
        density_from_pure([1.0, 1.0])


def test_density_is_idempotent_projector():
    rng = np.random.default_rng(6)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    rho = density_from_pure(psi)
    assert max_abs_diff(rho @ rho, rho) <= DEFAULT_TOL.atol_zero


def test_validate_density():
    validate_density(density_from_pure(ghz_state(2)))
    with pytest.raises(ValueError):
        validate_density(np.diag([0.7, 0.7]))  # trace 1.4
    with pytest.raises(ValueError):
        validate_density(np.array([[0.5, 0.5], [-0.5, 0.5]]))  # not Hermitian


def test_product_state():
    np.testing.assert_allclose(product_state("du"), [0, 0, 1, 0])
    np.testing.assert_allclose(product_state(BasisState((0,))), [1, 0])
