"""Dense linear algebra on truncated Fock spaces.

States are plain numpy arrays: kets are 1-D complex vectors, density
matrices are square complex matrices. Multi-mode objects are ordered by
Kronecker product and carry their factorisation as an explicit ``dims``
sequence wherever it matters (partial traces).
"""
import functools
import warnings

import numpy as np
from scipy import special, stats

from .errors import (
    InvalidDimensionError,
    InvalidParameterError,
    InvalidStateError,
    NumericalFailure,
    TruncationWarning,
)

TAIL_TOL = 1e-10
EIG_CLIP = 1e-10


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim}")
    return int(dim)


def annihilation(dim):
    """Lowering operator with sqrt(n) on the superdiagonal."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def creation(dim):
    return annihilation(dim).conj().T


def number_op(dim):
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def fock_state(n, dim):
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"Fock level {n} outside truncation {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def poisson_tail(mean, dim):
    """Probability mass of a Poisson(mean) distribution at n >= dim."""
    return float(stats.poisson.sf(dim - 1, mean))


def thermal_tail(n_beta, dim):
    """Population of a thermal state above the truncation."""
    if n_beta == 0:
        return 0.0
    return float((n_beta / (1.0 + n_beta)) ** dim)


def coherent_state(alpha, dim, warn=True):
    """Truncated coherent state |alpha>, renormalised after truncation.

    A ``TruncationWarning`` is issued when the Poisson mass discarded by
    the truncation exceeds ``TAIL_TOL``.
    """
    dim = _check_dim(dim)
    alpha = complex(alpha)
    n = np.arange(dim)
    if alpha == 0:
        return fock_state(0, dim)
    # log-space amplitudes avoid overflow of alpha**n / sqrt(n!)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * special.gammaln(n + 1)
    psi = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    tail = poisson_tail(abs(alpha) ** 2, dim)
    if warn and tail > TAIL_TOL:
        warnings.warn(
            f"coherent state |alpha|^2={abs(alpha)**2:.3g} loses {tail:.2e} of its "
            f"norm beyond dim={dim}",
            TruncationWarning,
            stacklevel=2,
        )
    return psi / np.linalg.norm(psi)


def thermal_state(n_beta, dim, warn=True):
    """Diagonal Gibbs state with mean occupation ``n_beta``."""
    dim = _check_dim(dim)
    if n_beta < 0:
        raise InvalidParameterError(f"thermal occupation must be >= 0, got {n_beta}")
    if n_beta == 0:
        pops = np.zeros(dim)
        pops[0] = 1.0
    else:
        ratio = n_beta / (1.0 + n_beta)
        pops = ratio ** np.arange(dim)
    tail = thermal_tail(n_beta, dim)
    if warn and tail > TAIL_TOL:
        warnings.warn(
            f"thermal state n_beta={n_beta} loses {tail:.2e} beyond dim={dim}",
            TruncationWarning,
            stacklevel=2,
        )
    return np.diag(pops / pops.sum()).astype(complex)


def ket2dm(psi):
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


def hermitize(M):
    return 0.5 * (M + M.conj().T)


def eig_hermitian(M):
    """Ascending eigenvalues and eigenvectors of the Hermitian part of ``M``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {M.shape}")
    try:
        vals, vecs = np.linalg.eigh(hermitize(M))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Hermitian eigensolver did not converge: {exc}") from exc
    return vals, vecs


def expm_hermitian(H, scale=1.0):
    """exp(-i * scale * H) for Hermitian ``H`` by spectral decomposition."""
    vals, vecs = eig_hermitian(H)
    return (vecs * np.exp(-1j * scale * vals)) @ vecs.conj().T


def sqrtm_psd(M):
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues down to ``-EIG_CLIP`` are treated as zero; anything more
    negative means the input is not a state. Positive eigenvalues at the
    roundoff level of the decomposition are zeroed too, otherwise their
    square roots (~1e-8) leak into fidelities of rank-deficient states.
    """
    vals, vecs = eig_hermitian(M)
    top = max(abs(vals[0]), abs(vals[-1]))
    if vals[0] < -EIG_CLIP * max(1.0, top):
        raise InvalidStateError(f"matrix has eigenvalue {vals[0]:.3e} < 0")
    vals = np.where(vals > len(vals) * np.finfo(float).eps * top, vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def displacement(amp, dim):
    """Displacement operator exp(amp b^dag - conj(amp) b) on a truncated mode."""
    dim = _check_dim(dim)
    a = annihilation(dim)
    # generator G is anti-Hermitian, so exp(G) = exp(-i H) with H = i G Hermitian
    H = 1j * (amp * a.conj().T - np.conj(amp) * a)
    return expm_hermitian(H)


def tensor(*ops):
    """Kronecker product of the arguments, left factor first."""
    if len(ops) == 1 and isinstance(ops[0], (list, tuple)):
        ops = tuple(ops[0])
    return functools.reduce(np.kron, ops)


def partial_trace(rho, dims, keep):
    """Reduce ``rho`` on the subsystems listed in ``keep``.

    ``keep`` may be a single index or a sequence of indices; the result is
    ordered as the kept subsystems appear in ``dims``.
    """
    dims = [int(d) for d in dims]
    rho = np.asarray(rho)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise InvalidDimensionError(f"rho of shape {rho.shape} does not match dims {dims}")
    keep = [keep] if np.isscalar(keep) else sorted(keep)
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidDimensionError(f"keep={keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # trace out from the highest index down so axis numbers stay valid
    for idx in reversed(range(n)):
        if idx in keep:
            continue
        nleft = t.ndim // 2
        t = np.trace(t, axis1=idx, axis2=idx + nleft)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d_keep, d_keep)


def expect(op, state):
    """Expectation value of ``op`` in a ket or density matrix."""
    state = np.asarray(state)
    if state.ndim == 1:
        return complex(state.conj() @ op @ state)
    return complex(np.trace(op @ state))


def purity(rho):
    return float(np.real(np.vdot(rho, rho)))


def check_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-10, eig_tol=1e-10):
    """Raise ``InvalidStateError`` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > herm_tol:
        raise InvalidStateError(f"not Hermitian: max deviation {herm_err:.2e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"trace {tr!r} differs from 1")
    lam_min = np.linalg.eigvalsh(hermitize(rho))[0]
    if lam_min < -eig_tol:
        raise InvalidStateError(f"negative eigenvalue {lam_min:.2e}")
    return rho


def fidelity(rho, sigma):
    """Root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).

    Evaluated as the trace norm of sqrt(rho) sqrt(sigma), which has the
    same value but does not take square roots of near-zero eigenvalues of
    the product, so identical near-pure inputs come out at 1 to roundoff.
    Kets are accepted for either argument.
    """
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.ndim == 1 and sigma.ndim == 1:
        return float(abs(np.vdot(rho, sigma)))
    if rho.ndim == 1 or sigma.ndim == 1:
        psi, other = (rho, sigma) if rho.ndim == 1 else (sigma, rho)
        return float(np.sqrt(max(np.real(psi.conj() @ other @ psi), 0.0)))
    if rho.shape != sigma.shape:
        raise InvalidDimensionError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    sv = np.linalg.svd(sqrtm_psd(rho) @ sqrtm_psd(sigma), compute_uv=False)
    return float(np.sum(sv))


def infidelity(rho, sigma):
    return 1.0 - fidelity(rho, sigma)


def trace_distance(rho, sigma):
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(rho - sigma)))))
