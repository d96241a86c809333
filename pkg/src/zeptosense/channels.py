"""Cavity photon loss: collision model and a Lindblad reference integrator.

The collision model alternates one closed-form propagator step with a
beam-splitter collision against a fresh vacuum ancilla that is traced
out afterwards. For beam-splitter angle phi_tau and step dt the limiting
master equation has loss rate gamma = phi_tau**2 / dt.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import dynamics, hilbert
from .errors import AncillaLeakageError, InvalidParameterError, StepSizeError

ANCILLA_LEAK_TOL = 1e-8


@dataclass(frozen=True)
class CollisionConfig:
    """Loss settings in units of the mechanical frequency.

    ``phi_tau`` is derived from gamma*dt unless given explicitly.
    """

    gamma_over_omega: float = 0.0
    steps_per_period: int = 49
    ancilla_dim: int = 3
    phi_tau: float = None

    def __post_init__(self):
        if self.gamma_over_omega < 0:
            raise InvalidParameterError("loss rate must be non-negative")
        if self.steps_per_period < 1:
            raise InvalidParameterError("need at least one step per period")
        if self.ancilla_dim < 2:
            raise InvalidParameterError("ancilla needs at least two levels")
        if self.phi_tau is None:
            object.__setattr__(self, "phi_tau", math.sqrt(self.gamma_over_omega * self.phase_step))
        if not 0 <= self.phi_tau <= math.pi / 4:
            raise InvalidParameterError(f"phi_tau={self.phi_tau} outside [0, pi/4]")

    @property
    def phase_step(self):
        """Mechanical phase omega*dt advanced per collision."""
        return 2 * math.pi / self.steps_per_period

    def dt(self, omega):
        return self.phase_step / omega

    def gamma(self, omega):
        return self.gamma_over_omega * omega


def beam_splitter(phi_tau, dim_cavity, ancilla_dim):
    """exp(-i phi_tau (a^dag c + a c^dag)) on cavity ⊗ ancilla."""
    a = np.kron(hilbert.annihilation(dim_cavity), np.eye(ancilla_dim))
    c = np.kron(np.eye(dim_cavity), hilbert.annihilation(ancilla_dim))
    H = a.conj().T @ c + a @ c.conj().T
    return hilbert.expm_hermitian(H, phi_tau)


def loss_kraus(phi_tau, dim_cavity, ancilla_dim):
    """Cavity Kraus operators <k|_E U_BS |0>_E, k = 0 .. ancilla_dim-1."""
    U = beam_splitter(phi_tau, dim_cavity, ancilla_dim)
    U4 = U.reshape(dim_cavity, ancilla_dim, dim_cavity, ancilla_dim)
    return np.stack([U4[:, k, :, 0] for k in range(ancilla_dim)])


def ancilla_leakage(photon_probs, phi_tau, ancilla_dim):
    """Probability that a collision would move ``ancilla_dim`` or more photons.

    Each cavity photon is transferred independently with probability
    sin^2(phi_tau), so the transfer count is binomial.
    """
    n = np.arange(photon_probs.size)
    tail = stats.binom.sf(ancilla_dim - 1, n, math.sin(phi_tau) ** 2)
    return float(np.clip(photon_probs, 0, None) @ tail)


class CollisionModel:
    """Repeated propagator steps and vacuum-ancilla collisions on a joint state."""

    def __init__(self, p, config):
        self.p = p
        self.config = config
        self.dt = config.dt(p.omega)
        self.blocks = dynamics.mechanical_blocks(self.dt, p)
        dc, dm = p.dims
        K = loss_kraus(config.phi_tau, dc, config.ancilla_dim)
        self.kraus = [np.kron(k, np.eye(dm)) for k in K]
        self.max_leakage = 0.0

    def step(self, rho):
        rho = dynamics._apply_blocks(self.blocks, rho)
        if self.config.phi_tau == 0:
            return rho
        pops = np.real(np.diag(hilbert.partial_trace(rho, self.p.dims, 0)))
        leak = ancilla_leakage(pops, self.config.phi_tau, self.config.ancilla_dim)
        self.max_leakage = max(self.max_leakage, leak)
        if leak > ANCILLA_LEAK_TOL:
            raise AncillaLeakageError(
                f"collision moves >= {self.config.ancilla_dim} photons with probability "
                f"{leak:.2e}; increase ancilla_dim"
            )
        out = np.zeros_like(rho)
        for K in self.kraus:
            out += K @ rho @ K.conj().T
        return out


def collision_step(rho, p, config):
    """One application of the loss map: propagate dt, collide, trace out."""
    return CollisionModel(p, config).step(np.asarray(rho))


@dataclass
class LossyTrajectory:
    times: np.ndarray
    states: list = field(repr=False)
    final: np.ndarray = field(repr=False)
    max_leakage: float = 0.0


def evolve_lossy(rho0, n_periods, p, config, record_every=None):
    """Apply the collision map for ``n_periods`` mechanical periods.

    The number of collisions is rounded to the nearest integer multiple of
    the step. Snapshots are kept every ``record_every`` collisions (default:
    once per period, i.e. at the decoupling times).
    """
    model = CollisionModel(p, config)
    n_steps = int(round(n_periods * config.steps_per_period))
    record_every = config.steps_per_period if record_every is None else record_every
    rho = np.asarray(rho0)
    times, states = [0.0], [rho]
    for k in range(1, n_steps + 1):
        rho = model.step(rho)
        if k % record_every == 0 or k == n_steps:
            times.append(k * model.dt)
            states.append(rho)
    return LossyTrajectory(np.array(times), states, rho, model.max_leakage)


def lossy_state(tau, p, config, rho0=None):
    """Joint state after mechanical phase ``tau`` (= omega t) of lossy evolution."""
    rho0 = dynamics.initial_state(p) if rho0 is None else rho0
    return evolve_lossy(rho0, tau / (2 * math.pi), p, config, record_every=10**9).final


def lab_hamiltonian(p):
    """omega b^dag b - (chi a^dag a + S)(b + b^dag) on cavity ⊗ mechanics.

    This is the rotating-frame Hamiltonian whose exact propagator is the
    closed form used by the collision model.
    """
    dc, dm = p.dims
    n = np.kron(hilbert.number_op(dc), np.eye(dm))
    b = np.kron(np.eye(dc), hilbert.annihilation(dm))
    bd = b.conj().T
    k = p.chi * n + p.S * np.eye(dc * dm)
    return p.omega * bd @ b - k @ (b + bd)


def lindblad_rhs(rho, H_eff, a, gamma):
    """Master-equation right-hand side with H_eff = H - i gamma/2 a^dag a."""
    out = -1j * (H_eff @ rho)
    out += out.conj().T
    return out + gamma * (a @ rho @ a.conj().T)


def lindblad_reference(rho0, t_final, p, gamma, dt=None, tol=1e-8, max_halvings=6):
    """Fixed-step RK4 solution of the cavity-loss master equation.

    The run is repeated at half the step until the two results agree to
    ``tol`` (max abs entry); ``StepSizeError`` if that never happens or
    the result is not positive.
    """
    H = lab_hamiltonian(p)
    a = np.kron(hilbert.annihilation(p.dims[0]), np.eye(p.dims[1]))
    H_eff = H - 0.5j * gamma * a.conj().T @ a
    if dt is None:
        dt = min(0.01 / p.omega, 0.25 / np.linalg.norm(H, 2))

    def run(step):
        n = max(1, int(math.ceil(t_final / step)))
        h = t_final / n
        rho = np.asarray(rho0, dtype=complex)
        for _ in range(n):
            k1 = lindblad_rhs(rho, H_eff, a, gamma)
            k2 = lindblad_rhs(rho + 0.5 * h * k1, H_eff, a, gamma)
            k3 = lindblad_rhs(rho + 0.5 * h * k2, H_eff, a, gamma)
            k4 = lindblad_rhs(rho + h * k3, H_eff, a, gamma)
            rho = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        return hilbert.hermitize(rho)

    coarse = run(dt)
    for _ in range(max_halvings):
        dt /= 2
        fine = run(dt)
        diff = np.max(np.abs(fine - coarse))
        if diff < tol:
            break
        coarse = fine
    else:
        raise StepSizeError(f"RK4 result still moves by {diff:.2e} after step halving")
    lam = np.linalg.eigvalsh(fine)[0]
    if lam < -tol:
        raise StepSizeError(f"master-equation state lost positivity: eigenvalue {lam:.2e}")
    return fine
