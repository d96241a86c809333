import math
import warnings

import numpy as np
import pytest

from zeptosense import dynamics as dy
from zeptosense import hilbert as hb
from zeptosense.errors import CrossCheckFailure, InvalidParameterError, TruncationWarning

P = dy.SystemParams.scaled(dims=(16, 30))
T1 = 2 * math.pi


def test_scaling_law_calibration():
    law = P.table1().scaling
    q = P.table1()
    assert law.chi(q.omega) == pytest.approx(q.chi, rel=1e-12)
    assert law.S(q.omega) == pytest.approx(q.S, rel=1e-12)
    shifted = q.at_omega(4 * q.omega)
    assert shifted.chi == pytest.approx(q.chi / 2, rel=1e-12)


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        dy.SystemParams(omega=0.0, chi=1.0, S=1.0)
    with pytest.raises(InvalidParameterError):
        dy.SystemParams.scaled(n_beta=-1)


def test_table1_masses_disagree():
    m_chi, m_S = dy.SystemParams.table1().mass_consistency()
    assert m_chi > 0 and m_S > 0
    # the two constants cannot describe the same mirror
    assert max(m_chi, m_S) / min(m_chi, m_S) > 10


def test_propagator_identity_at_zero():
    U = dy.propagator(0.0, P)
    assert np.abs(U - np.eye(U.shape[0])).max() < 1e-12


def test_propagator_at_period_is_phase_only():
    dc, dm = P.dims
    U = dy.propagator(T1, P)
    l = np.arange(dc)
    phases = ((P.chi * l + P.S) / P.omega) ** 2 * 2 * math.pi
    ref = np.kron(np.diag(np.exp(1j * phases)), np.eye(dm))
    assert np.abs(U - ref).max() < 1e-10


def test_propagator_unitary():
    for t in (0.7, 2.0, 4.1):
        U = dy.propagator(t, P)
        assert np.abs(U @ U.conj().T - np.eye(U.shape[0])).max() < 1e-9


def test_propagator_solves_lab_hamiltonian():
    # closed form against exp(-iHt) on a space large enough for the edge to be irrelevant
    from zeptosense.channels import lab_hamiltonian

    q = dy.SystemParams.scaled(chi=0.1, S=0.2, dims=(4, 40))
    t = 1.3
    U = dy.propagator(t, q)
    exact = hb.expm_hermitian(lab_hamiltonian(q), t)
    low = np.concatenate([np.arange(k * 40, k * 40 + 10) for k in range(4)])
    assert np.abs(U[np.ix_(low, low)] - exact[np.ix_(low, low)]).max() < 1e-9


def test_truncation_warning():
    q = dy.SystemParams.scaled(chi=1.0, S=2.0, dims=(8, 6))
    with pytest.warns(TruncationWarning):
        dy.evolve_joint(dy.initial_state(q), 3.0, q)


def test_evolve_zero_time():
    rho0 = dy.initial_state(P)
    assert np.abs(dy.evolve_joint(rho0, 0.0, P) - rho0).max() < 1e-12


def test_evolution_preserves_state_properties():
    rho = dy.evolve_joint(dy.initial_state(P), 2.3, P)
    hb.check_density_matrix(rho)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_decoupling_times(n):
    rho0 = dy.initial_state(P)
    rho = dy.evolve_joint(rho0, n * T1, P)
    cav = hb.partial_trace(rho, P.dims, 0)
    mech = hb.partial_trace(rho, P.dims, 1)
    assert abs(hb.purity(cav) - 1) < 1e-8
    assert hb.infidelity(mech, hb.thermal_state(P.n_beta, P.dims[1])) < 1e-8
    Hm = np.kron(np.eye(P.dims[0]), hb.number_op(P.dims[1]))
    e0, e1 = hb.expect(Hm, rho0).real, hb.expect(Hm, rho).real
    assert abs(e1 - e0) < 1e-8 * e0


def test_photon_number_populations_conserved():
    rho0 = hb.partial_trace(dy.initial_state(P), P.dims, 0)
    for t in (0.5, 2.0, 5.0, 11.0):
        red = dy.reduced_cavity_analytic(t, P)
        assert np.abs(np.diag(red) - np.diag(rho0)).max() < 1e-10


def test_analytic_at_decoupling_is_pure_ket():
    for n in (1, 2):
        rho = dy.reduced_cavity_analytic(n * T1, P)
        psi = dy.cavity_ket(n * T1, P)
        assert hb.infidelity(psi, rho) < 1e-10


def test_variants_coincide_without_thermal_noise():
    q = P.with_(n_beta=0.0)
    a = dy.reduced_cavity_analytic(2.2, q, "printed")
    b = dy.reduced_cavity_analytic(2.2, q, "conventional")
    assert np.abs(a - b).max() < 1e-12


def test_thermal_factor_adjudication():
    q = P.with_(alpha=0.1)
    ts = np.linspace(0, 3 * T1, 31)
    winner, worst = dy.adjudicate_thermal_factor(q, ts)
    assert winner == "conventional" == dy.DEFAULT_THERMAL_FACTOR
    assert worst["conventional"] < 1e-8
    assert worst["printed"] > 100 * worst["conventional"]


def test_quadratures():
    assert np.abs(dy.quadrature_trajectory([0.0, 1.0, 2.0], P.with_(alpha=0.0))).max() == 0
    alpha = 0.3 - 0.2j
    x, p = dy.quadrature_trajectory([0.0], P.with_(alpha=alpha))[0]
    assert x == pytest.approx(math.sqrt(2) * alpha.real, abs=1e-12)
    assert p == pytest.approx(math.sqrt(2) * alpha.imag, abs=1e-12)


def test_quadrature_loop_closes_for_integer_phases():
    # chi = omega, S = 0: every Kerr phase at one period is a multiple of 2 pi
    q = dy.SystemParams.scaled(chi=1.0, S=0.0, alpha=0.2, dims=(12, 30))
    traj = dy.quadrature_trajectory([0.0, T1], q)
    assert np.abs(traj[1] - traj[0]).max() < 1e-6


def test_quadrature_generic_returns_pure_rotated():
    traj = dy.quadrature_trajectory([0.0, T1], P)
    assert abs(hb.purity(dy.reduced_cavity_analytic(T1, P)) - 1) < 1e-12
    assert np.abs(traj[1] - traj[0]).max() > 1e-6


def test_rotating_frame_flag_only_adds_phases():
    q = P.with_(omega_c=3.7)
    lab = dy.reduced_cavity_analytic(1.1, q, rotating_frame=False)
    rot = dy.reduced_cavity_analytic(1.1, q)
    assert np.abs(np.abs(lab) - np.abs(rot)).max() < 1e-14
    assert np.abs(lab - rot).max() > 1e-3


def test_stepper_crosscheck():
    rho0 = dy.initial_state(P)
    t = 1.5 * T1
    a = dy.stepper_crosscheck(rho0, t, P, 24)
    b = dy.stepper_crosscheck(rho0, t, P, 48)
    assert abs(a.max_infidelity - b.max_infidelity) < 1e-10 or a.max_infidelity < 1e-12
    # the joint states differ only at the mechanical truncation edge of
    # weakly populated photon blocks; the cavity marginal is unaffected
    one_shot = dy.evolve_joint(rho0, t, P)
    red = hb.partial_trace(a.state, P.dims, 0) - hb.partial_trace(one_shot, P.dims, 0)
    assert np.abs(red).max() < 1e-10
    assert a.max_infidelity < 1e-10


def test_stepper_crosscheck_raises_on_wrong_reference():
    with pytest.raises(CrossCheckFailure):
        dy.stepper_crosscheck(dy.initial_state(P), T1, P, 32, variant="printed", bound=1e-12)


def test_infidelity_oscillates_with_minima_at_decoupling():
    q = P.with_(alpha=0.1)
    ts = np.linspace(0, 2 * T1, 41)
    rho0 = dy.initial_state(q)
    inf = [hb.infidelity(dy.reduced_cavity_analytic(t, q, "printed"),
                         dy.reduced_cavity_numeric(t, q, rho0)) for t in ts]
    inf = np.array(inf)
    assert inf[20] < 1e-12 and inf[40] < 1e-12
    assert inf[10] > 1e-8 and inf[30] > 1e-8
