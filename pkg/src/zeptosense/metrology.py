"""Quantum and classical Fisher information for frequency/separation sensing.

All time-domain quantities are computed with respect to the mechanical
frequency omega and converted to the magnet separation d with
(d omega / d d)**2 at the end.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import hilbert
from .errors import (
    DerivativeStepError,
    IllConditionedWarning,
    InvalidParameterError,
    RegimeMixingWarning,
    ResolutionWarning,
)

EIGEN_CUTOFF = 1e-12
P_FLOOR = 1e-14
DEFAULT_REL_STEP = 1e-6


@dataclass
class EstimationResult:
    value: float
    parameter: str = "omega"
    units: str = "1/omega^2"
    method: str = ""
    derivative_step: float = float("nan")
    metadata: dict = field(default_factory=dict)

    def to_d(self, dwdd):
        """Convert an omega-QFI to separation units (m^-2)."""
        if self.parameter != "omega":
            raise InvalidParameterError("result is already in separation units")
        return EstimationResult(
            self.value * dwdd**2, "d", "m^-2", self.method, self.derivative_step,
            dict(self.metadata, dwdd=dwdd),
        )

    @property
    def precision(self):
        """Single-shot standard deviation bound 1/sqrt(F)."""
        return qcrb_bound(self.value) ** 0.5

    def __float__(self):
        return float(self.value)


@dataclass
class DerivativePair:
    """States at theta - h and theta + h, optionally with the state at theta."""

    minus: np.ndarray
    plus: np.ndarray
    h: float
    center: np.ndarray = None

    @property
    def derivative(self):
        return (self.plus - self.minus) / (2 * self.h)

    @property
    def state(self):
        if self.center is not None:
            return self.center
        return 0.5 * (self.plus + self.minus)


def qfi_pure_analytic(p, n=1, dwdd=1.0):
    """Closed-form QFI of the pure cavity state at the n-th decoupling time.

    ``dwdd`` = 1 gives the QFI for omega itself; a value in rad/(s m)
    returns the separation QFI in m^-2.
    """
    if n < 1:
        raise InvalidParameterError("decoupling index must be >= 1")
    N = abs(p.alpha) ** 2
    chi, S, w = p.chi, p.S, p.omega
    bracket = 6 * chi**2 * N + 4 * chi**2 * N**2 + (chi + 2 * S) ** 2 + 8 * chi * S * N
    F = 4 * (6 * math.pi * n / w**3) ** 2 * N * chi**2 * bracket * dwdd**2
    per_omega = dwdd == 1.0
    return EstimationResult(
        float(F),
        "omega" if per_omega else "d",
        "1/omega^2" if per_omega else "m^-2",
        "pure-analytic",
        metadata={"n": n, "N": N, "dwdd": dwdd},
    )


def backsolve_dwdd(p, target_F, n=1):
    """d omega / d d that makes the closed-form QFI equal ``target_F``."""
    return math.sqrt(target_F / qfi_pure_analytic(p, n).value)


def qfi_pure_overlap(psi, dpsi, h=float("nan")):
    """4 (<dpsi|dpsi> - |<dpsi|psi>|^2) for a normalised ket."""
    psi = np.asarray(psi)
    dpsi = np.asarray(dpsi)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1) > 1e-10:
        raise InvalidParameterError(f"state not normalised: |psi|^2 = {norm}")
    F = 4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(dpsi, psi)) ** 2)
    return EstimationResult(max(float(F), 0.0), method="pure-overlap", derivative_step=h)


def _pair_terms(rho, drho, eigen_cutoff):
    vals, vecs = hilbert.eig_hermitian(rho)
    vals = np.clip(vals, 0.0, None)
    d = vecs.conj().T @ drho @ vecs
    denom = vals[:, None] + vals[None, :]
    keep = denom > eigen_cutoff
    return vals, vecs, d, denom, keep


def qfi_mixed(rho, drho, eigen_cutoff=EIGEN_CUTOFF, h=float("nan"), check=True):
    """Eigenbasis QFI 2 sum |<i|drho|j>|^2 / (p_i + p_j) over retained pairs."""
    drho = hilbert.hermitize(np.asarray(drho))
    tr = abs(np.trace(drho))
    if tr > 1e-9 * max(1.0, np.abs(drho).max()):
        raise InvalidParameterError(f"derivative of a state must be traceless, trace={tr:.2e}")
    vals, vecs, d, denom, keep = _pair_terms(rho, drho, eigen_cutoff)
    F = 2 * np.sum(np.abs(d[keep]) ** 2 / denom[keep])
    if check:
        keep10 = denom > 10 * eigen_cutoff
        F10 = 2 * np.sum(np.abs(d[keep10]) ** 2 / denom[keep10])
        if F > 0 and abs(F - F10) > 0.01 * F:
            warnings.warn(
                f"QFI changes by {abs(F - F10) / F:.1%} when the eigenvalue cutoff grows 10x",
                IllConditionedWarning,
                stacklevel=2,
            )
    return EstimationResult(float(F), method="mixed-eigen", derivative_step=h,
                            metadata={"eigen_cutoff": eigen_cutoff})


def sld(rho, drho, eigen_cutoff=EIGEN_CUTOFF):
    """Symmetric logarithmic derivative solving drho = (L rho + rho L) / 2."""
    drho = hilbert.hermitize(np.asarray(drho))
    vals, vecs, d, denom, keep = _pair_terms(rho, drho, eigen_cutoff)
    Lb = np.zeros_like(d)
    Lb[keep] = 2 * d[keep] / denom[keep]
    return hilbert.hermitize(vecs @ Lb @ vecs.conj().T)


def projective_cfi(rho, drho, basis, p_floor=P_FLOOR):
    """Classical FI of the projective measurement onto the columns of ``basis``.

    Returns the FI and the probability mass dropped below ``p_floor``.
    """
    probs = np.real(np.einsum("ik,ij,jk->k", basis.conj(), rho, basis))
    dprobs = np.real(np.einsum("ik,ij,jk->k", basis.conj(), drho, basis))
    keep = probs > p_floor
    F = float(np.sum(dprobs[keep] ** 2 / probs[keep]))
    return F, float(np.sum(np.clip(probs[~keep], 0, None)))


def sld_projective_cfi(rho, drho, eigen_cutoff=EIGEN_CUTOFF):
    """Classical FI of measuring in the eigenbasis of the SLD."""
    _, basis = hilbert.eig_hermitian(sld(rho, drho, eigen_cutoff))
    F, _ = projective_cfi(rho, drho, basis)
    return EstimationResult(F, method="sld-projective")


def quadrature(dim, theta):
    """Rotated quadrature (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2)."""
    a = hilbert.annihilation(dim)
    return (a * np.exp(-1j * theta) + a.conj().T * np.exp(1j * theta)) / np.sqrt(2)


def homodyne_cfi(pair, theta, p_floor=P_FLOOR):
    """Classical FI of homodyne detection at phase ``theta``.

    The POVM is the eigenbasis of the truncated rotated quadrature; the
    outcome derivatives come from the central difference in ``pair``.
    """
    rho = pair.state
    _, basis = hilbert.eig_hermitian(quadrature(rho.shape[0], theta))

    def probs(r):
        return np.real(np.einsum("ik,ij,jk->k", basis.conj(), r, basis))

    p0 = probs(rho)
    dp = (probs(pair.plus) - probs(pair.minus)) / (2 * pair.h)
    keep = p0 > p_floor
    dropped = float(np.sum(np.clip(p0[~keep], 0, None)))
    if dropped > 0.01:
        warnings.warn(
            f"{dropped:.1%} of the homodyne probability lies below the floor",
            ResolutionWarning,
            stacklevel=2,
        )
    F = float(np.sum(dp[keep] ** 2 / p0[keep]))
    return EstimationResult(F, method="homodyne", derivative_step=pair.h,
                            metadata={"theta": theta, "dropped_mass": dropped})


def derivative_pair(state_fn, p, rel_step=DEFAULT_REL_STEP, with_center=True):
    """Central-difference pair in omega with chi, S co-varying as omega^-1/2.

    ``state_fn`` maps SystemParams to a ket or density matrix.
    """
    h = rel_step * p.omega
    minus = _normalized(state_fn(p.at_omega(p.omega - h)))
    plus = _normalized(state_fn(p.at_omega(p.omega + h)))
    center = _normalized(state_fn(p)) if with_center else None
    return DerivativePair(minus, plus, h, center)


def _normalized(state):
    # roundoff drift in the trace would otherwise dominate (plus - minus) / 2h
    state = np.asarray(state)
    if state.ndim == 1:
        return state / np.linalg.norm(state)
    return state / np.trace(state).real


def roundoff_floor(pair):
    """Derivative norm below which a central difference is pure roundoff."""
    return 1e3 * np.finfo(float).eps * np.linalg.norm(pair.minus) / pair.h


def checked_derivative(state_fn, p, rel_step=DEFAULT_REL_STEP, tol=1e-4):
    """Derivative pair plus a step-halving consistency check.

    Raises ``DerivativeStepError`` if the h and h/2 estimates of the
    derivative differ by more than ``tol`` (relative, Frobenius norm).
    Returns the pair at h and the observed relative discrepancy.
    """
    full = derivative_pair(state_fn, p, rel_step)
    half = derivative_pair(state_fn, p, rel_step / 2, with_center=False)
    d1, d2 = full.derivative, half.derivative
    scale = max(np.linalg.norm(d2), 1e-300)
    err = float(np.linalg.norm(d1 - d2) / scale)
    if scale > roundoff_floor(full) and err > tol:
        raise DerivativeStepError(f"derivative unstable under step halving: {err:.2e}")
    return full, err


def qfi_from_pair(pair, eigen_cutoff=EIGEN_CUTOFF):
    """Dispatch to the ket or density-matrix QFI according to the state shape."""
    if pair.state.ndim == 1:
        return qfi_pure_overlap(pair.state, pair.derivative, pair.h)
    return qfi_mixed(pair.state, pair.derivative, eigen_cutoff, pair.h)


def qfi_fidelity(state_fn, p, rel_steps=(4e-3, 2e-3, 1e-3)):
    """Bures-fidelity estimate 8 (1 - F(rho_w, rho_{w+eps})) / eps^2.

    The leading O(eps^2) bias is removed by Richardson extrapolation over
    the supplied step ladder (each step half the previous).
    """
    rho0 = state_fn(p)
    ests = []
    for r in rel_steps:
        eps = r * p.omega
        f_plus = hilbert.fidelity(rho0, state_fn(p.at_omega(p.omega + eps)))
        f_minus = hilbert.fidelity(rho0, state_fn(p.at_omega(p.omega - eps)))
        # symmetric average cancels the odd orders in eps
        ests.append(4 * ((1 - f_plus) + (1 - f_minus)) / eps**2)
    ests = np.array(ests)
    for _ in range(len(ests) - 1):
        ests = (4 * ests[1:] - ests[:-1]) / 3
    return EstimationResult(float(ests[0]), method="fidelity-oracle",
                            derivative_step=rel_steps[-1])


def qcrb_bound(F, M=1):
    """Variance lower bound 1/(M F); infinite when F vanishes."""
    if M < 1:
        raise InvalidParameterError("need at least one repetition")
    if F < 0:
        raise InvalidParameterError("Fisher information cannot be negative")
    if F == 0:
        return math.inf
    return 1.0 / (M * F)


@dataclass
class ScalingFit:
    exponent: float
    intercept: float
    residual: float


def scaling_fit(N_values, F_values, residual_tol=0.05):
    """Least-squares slope of log F against log N."""
    x = np.log10(np.asarray(N_values, dtype=float))
    y = np.log10(np.asarray(F_values, dtype=float))
    if x.size < 2:
        raise InvalidParameterError("need at least two points to fit a power law")
    A = np.column_stack([x, np.ones_like(x)])
    (k, c), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(A @ np.array([k, c]) - y)))
    if resid > residual_tol:
        warnings.warn(
            f"power-law residual {resid:.3f} decades: the range mixes regimes",
            RegimeMixingWarning,
            stacklevel=2,
        )
    return ScalingFit(float(k), float(c), resid)


def local_exponent(p, N, n=1):
    """d log F / d log N of the closed-form QFI at photon number N."""
    chi, S = p.chi, p.S
    N = np.asarray(N, dtype=float)
    b = 6 * chi**2 * N + 4 * chi**2 * N**2 + (chi + 2 * S) ** 2 + 8 * chi * S * N
    db = 6 * chi**2 * N + 8 * chi**2 * N**2 + 8 * chi * S * N
    return 1 + db / b


def crossover_photon_number(p, exponent=1.5, lo=1.0, hi=1e16):
    """Photon number where the local QFI exponent first reaches ``exponent``."""
    from scipy.optimize import brentq

    f = lambda logN: local_exponent(p, 10.0**logN) - exponent
    return 10.0 ** brentq(f, math.log10(lo), math.log10(hi), xtol=1e-12)
