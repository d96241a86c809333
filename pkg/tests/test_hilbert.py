import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeptosense import hilbert as hb
from zeptosense.errors import InvalidDimensionError, InvalidParameterError, InvalidStateError, TruncationWarning

import oracles


def test_annihilation_small():
    assert np.array_equal(hb.annihilation(2), [[0, 1], [0, 0]])
    assert hb.annihilation(3)[1, 2] == pytest.approx(np.sqrt(2), abs=0)
    assert np.array_equal(hb.creation(4), hb.annihilation(4).conj().T)


def test_annihilation_rejects_tiny():
    with pytest.raises(InvalidDimensionError):
        hb.annihilation(1)


def test_commutator_truncation_edge():
    a = hb.annihilation(50)
    c = a @ a.conj().T - a.conj().T @ a
    expected = np.ones(50)
    expected[-1] = -49
    assert np.allclose(np.diag(c), expected, atol=1e-12)
    assert np.allclose(c - np.diag(np.diag(c)), 0)


def test_coherent_vacuum_and_mean():
    assert np.allclose(hb.coherent_state(0, 10), hb.fock_state(0, 10))
    psi = hb.coherent_state(0.1, 20)
    assert abs(hb.expect(hb.number_op(20), psi) - 0.01) < 1e-10


def test_coherent_matches_displaced_vacuum():
    psi = hb.coherent_state(1.0, 50)
    phi = hb.displacement(1.0, 50) @ hb.fock_state(0, 50)
    assert abs(abs(np.vdot(psi, phi)) - 1) < 1e-12


def test_coherent_truncation_warns():
    with pytest.warns(TruncationWarning):
        hb.coherent_state(3.0, 10)


def test_thermal_state():
    assert np.allclose(hb.thermal_state(0, 5), np.diag([1, 0, 0, 0, 0]))
    rho = hb.thermal_state(0.1, 30)
    p = np.real(np.diag(rho))
    assert abs(p[1] / p[0] - 0.1 / 1.1) < 1e-12
    assert abs(np.arange(30) @ p - 0.1) < 1e-9
    with pytest.raises(InvalidParameterError):
        hb.thermal_state(-0.1, 10)


def test_displacement_identity_and_inverse():
    assert np.allclose(hb.displacement(0, 12), np.eye(12))
    D = hb.displacement(0.7 - 0.3j, 40)
    assert np.abs(D @ hb.displacement(-0.7 + 0.3j, 40) - np.eye(40)).max() < 1e-10
    assert np.abs(D @ D.conj().T - np.eye(40)).max() < 1e-10


def test_displacement_series_oracle():
    vac = hb.fock_state(0, 40)
    assert np.abs(hb.displacement(1.0, 40) @ vac - hb.coherent_state(1.0, 40)).max() < 1e-10
    ref = oracles.displacement_series(0.8 + 0.5j, 40)
    # the truncated generator differs from the padded one only near the edge
    assert np.abs(hb.displacement(0.8 + 0.5j, 40)[:20, :20] - ref[:20, :20]).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
)
def test_displacement_composition(a, b):
    dim = 40
    L = hb.displacement(a, dim) @ hb.displacement(b, dim)
    R = np.exp(1j * np.imag(a * np.conj(b))) * hb.displacement(a + b, dim)
    # the group law holds on the low-lying block; the truncation edge breaks it
    assert np.abs(L - R)[:8, :8].max() < 1e-9


def test_partial_trace_product(rng):
    ra, rb = oracles.random_density(3, rng), oracles.random_density(4, rng)
    rho = hb.tensor(ra, rb)
    assert np.abs(hb.partial_trace(rho, (3, 4), 0) - ra).max() < 1e-12
    assert np.abs(hb.partial_trace(rho, (3, 4), 1) - rb).max() < 1e-12


def test_partial_trace_preserves_trace(rng):
    rho = oracles.random_density(12, rng)
    red = hb.partial_trace(rho, (3, 4), 1)
    assert abs(np.trace(red) - 1) < 1e-12
    assert np.abs(red - red.conj().T).max() < 1e-12


def test_partial_trace_dim_mismatch(rng):
    with pytest.raises(InvalidDimensionError):
        hb.partial_trace(oracles.random_density(12, rng), (3, 5), 0)


def test_entangled_reduced_purity(rng):
    psi = rng.normal(size=12) + 1j * rng.normal(size=12)
    psi /= np.linalg.norm(psi)
    red = hb.partial_trace(hb.ket2dm(psi), (3, 4), 0)
    pur = hb.purity(red)
    assert pur < 1
    assert abs(pur - oracles.schmidt_purity(psi, (3, 4))) < 1e-12


def test_eig_hermitian():
    w, _ = hb.eig_hermitian(np.eye(4))
    assert np.allclose(w, 1)
    w, _ = hb.eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])


def test_eig_reconstruction(rng):
    M = oracles.random_hermitian(100, rng)
    w, V = hb.eig_hermitian(M)
    assert np.all(np.diff(w) >= 0)
    rec = V @ np.diag(w) @ V.conj().T
    assert np.linalg.norm(rec - M) / np.linalg.norm(M) < 1e-10
    off = V.conj().T @ M @ V
    assert np.abs(off - np.diag(np.diag(off))).max() < 1e-9 * np.linalg.norm(M, 2)


def test_fidelity_basics(rng):
    rho = oracles.random_density(6, rng)
    assert abs(hb.fidelity(rho, rho) - 1) < 1e-10
    e0, e1 = hb.fock_state(0, 4), hb.fock_state(1, 4)
    assert hb.fidelity(hb.ket2dm(e0), hb.ket2dm(e1)) < 1e-12
    assert hb.fidelity(e0, e1) < 1e-12


def test_fidelity_pure_shortcut(rng):
    psi = rng.normal(size=6) + 1j * rng.normal(size=6)
    psi /= np.linalg.norm(psi)
    sigma = oracles.random_density(6, rng)
    ref = np.sqrt(np.real(psi.conj() @ sigma @ psi))
    assert abs(hb.fidelity(hb.ket2dm(psi), sigma) - ref) < 1e-10
    assert abs(hb.fidelity(psi, sigma) - ref) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_fidelity_symmetric_and_bounded(seed, rank):
    rng = np.random.default_rng(seed)
    rho = oracles.random_density(5, rng, rank)
    sigma = oracles.random_density(5, rng)
    f1, f2 = hb.fidelity(rho, sigma), hb.fidelity(sigma, rho)
    assert abs(f1 - f2) < 1e-10
    assert 0 <= f1 <= 1 + 1e-9


def test_fidelity_rejects_nonpositive():
    bad = np.diag([1.5, -0.5])
    with pytest.raises(InvalidStateError):
        hb.fidelity(bad, np.eye(2) / 2)


def test_check_density_matrix(rng):
    hb.check_density_matrix(oracles.random_density(4, rng))
    with pytest.raises(InvalidStateError):
        hb.check_density_matrix(np.diag([0.6, 0.6]))
