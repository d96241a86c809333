"""Diamagnetic trap between two checkerboard permanent-magnet arrays.

Fields come from the closed-form surface-charge solution for uniformly
magnetised cuboids; the plate energy is a tensor-product quadrature
(Gauss-Legendre by default) of the anisotropic diamagnetic energy density
plus gravity.
"""
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .errors import DomainError, InvalidParameterError, NoEquilibriumError

MU0 = 4e-7 * np.pi
G_ACCEL = 9.81


@dataclass(frozen=True)
class TrapConfig:
    magnet_side_m: float = 5e-3
    magnetization_t: float = 1.48
    cells: int = 8
    gap_m: float = 2.5e-4
    plate_dims_m: tuple = (1e-4, 1e-4, 4e-5)
    susceptibility: tuple = (-85e-6, -85e-6, -450e-6)
    density_kg_m3: float = 2260.0
    grid: tuple = (6, 6, 6)
    # volume rule over the plate: "gauss" (tensor Gauss-Legendre) or "midpoint"
    rule: str = "gauss"
    # lateral position of the plate centre relative to the array centre
    plate_xy_m: tuple = (0.0, 0.0)
    # -1: top magnet opposes the one below it; +1: same orientation
    top_polarity: int = -1
    gravity: bool = True

    def __post_init__(self):
        if self.gap_m <= 0:
            raise InvalidParameterError("gap must be positive")
        # zero is allowed so the field term can be switched off
        if any(c > 0 for c in self.susceptibility):
            raise InvalidParameterError("graphite susceptibilities must be diamagnetic (<= 0)")
        if self.plate_dims_m[2] >= self.gap_m:
            raise InvalidParameterError("plate thickness must be smaller than the gap")
        if self.cells < 1:
            raise InvalidParameterError("array needs at least one cell")
        if self.rule not in ("gauss", "midpoint"):
            raise InvalidParameterError(f"unknown volume rule {self.rule!r}")
        if min(self.grid) < 1:
            raise InvalidParameterError("grid needs at least one point per axis")

    @property
    def plate_volume(self):
        lx, ly, lz = self.plate_dims_m
        return lx * ly * lz

    @property
    def plate_mass(self):
        return self.density_kg_m3 * self.plate_volume


@dataclass
class TrapResult:
    omega: float
    z0: float
    dwdd: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def freq_hz(self):
        return self.omega / (2 * np.pi)


def _face_field(u, v, w):
    """Corner primitive of the field of a unit-charge rectangle.

    Returns the antiderivative triple for (Hx, Hy, Hz) evaluated at the
    offsets ``u, v, w`` from a rectangle corner, up to the 1/(4 pi) factor.
    """
    r = np.sqrt(u * u + v * v + w * w)
    # asinh form of -ln(v + R); the dropped ln terms cancel between corners
    fx = -np.arcsinh(v / np.hypot(u, w))
    fy = -np.arcsinh(u / np.hypot(v, w))
    fz = np.arctan2(u * v, w * r)
    return fx, fy, fz


def _rect_field(p, x1, x2, y1, y2, z0):
    """H-field (per unit surface charge, times 4 pi) of a rectangle at height z0."""
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    w = z - z0
    out = np.zeros(p.shape, dtype=float)
    for xc, sx in ((x1, 1.0), (x2, -1.0)):
        for yc, sy in ((y1, 1.0), (y2, -1.0)):
            fx, fy, fz = _face_field(x - xc, y - yc, w)
            s = sx * sy
            out[..., 0] += s * fx
            out[..., 1] += s * fy
            out[..., 2] += s * fz
    return out


def cuboid_field(point, center, side, magnetization):
    """Flux density (Tesla) outside a cube magnetised along z.

    ``magnetization`` is the signed remanence mu0*M in Tesla. ``point`` may
    be a single 3-vector or an array of shape (..., 3).
    """
    p = np.asarray(point, dtype=float)
    c = np.asarray(center, dtype=float)
    h = 0.5 * side
    rel = p - c
    inside = np.all(np.abs(rel) < h, axis=-1)
    if np.any(inside):
        raise DomainError("field requested inside the magnet body")
    # zero-size pole sheets at +-h: top carries +M, bottom -M
    top = _rect_field(rel, -h, h, -h, h, h)
    bottom = _rect_field(rel, -h, h, -h, h, -h)
    return magnetization / (4 * np.pi) * (top - bottom)


def magnet_layout(config):
    """Centres and signed remanences of every cube in both layers."""
    h = config.magnet_side_m
    n = config.cells
    idx = np.arange(n) - 0.5 * (n - 1)
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    sign = np.where((ii + jj) % 2 == 0, 1.0, -1.0).ravel()
    xs = (idx[ii] * h).ravel()
    ys = (idx[jj] * h).ravel()
    # bottom layer: top faces at z = 0; top layer: bottom faces at z = gap
    bottom = np.column_stack([xs, ys, np.full(xs.size, -0.5 * h)])
    top = np.column_stack([xs, ys, np.full(xs.size, config.gap_m + 0.5 * h)])
    centers = np.vstack([bottom, top])
    mags = config.magnetization_t * np.concatenate([sign, config.top_polarity * sign])
    return centers, mags


def array_field(point, config):
    """Total flux density of both checkerboard layers at ``point``."""
    p = np.asarray(point, dtype=float)
    centers, mags = magnet_layout(config)
    h = 0.5 * config.magnet_side_m
    rel = p[..., None, :] - centers
    if np.any(np.all(np.abs(rel) < h, axis=-1)):
        raise DomainError("field requested inside a magnet body")
    top = _rect_field(rel, -h, h, -h, h, h)
    bottom = _rect_field(rel, -h, h, -h, h, -h)
    # sum over magnets in a fixed order
    return np.einsum("m,...mk->...k", mags, top - bottom) / (4 * np.pi)


def _rule_1d(n, rule):
    """Nodes on [-1/2, 1/2] and weights summing to one."""
    if rule == "midpoint":
        return (np.arange(n) + 0.5) / n - 0.5, np.full(n, 1.0 / n)
    x, w = np.polynomial.legendre.leggauss(n)
    return x / 2, w / 2


def _plate_points(z, config):
    """Quadrature points (N, 3) and weights (N,) over the plate volume.

    The midpoint rule converges slowly here: the plate sits a few plate
    widths above magnet edges, where B^2 varies on the plate scale.
    """
    lx, ly, lz = config.plate_dims_m
    nx, ny, nz = config.grid
    px, py = config.plate_xy_m
    (ux, wx), (uy, wy), (uz, wz) = (_rule_1d(n, config.rule) for n in (nx, ny, nz))
    X, Y, Z = np.meshgrid(px + lx * ux, py + ly * uy, z + lz * uz, indexing="ij")
    W = np.einsum("i,j,k->ijk", wx, wy, wz).ravel()
    return np.stack([X, Y, Z], axis=-1).reshape(-1, 3), W


def plate_potential(z, config):
    """Potential energy (J) of the plate with its centre at height ``z``.

    Heights are measured from the top surface of the lower array.
    """
    return float(_potentials(np.atleast_1d(float(z)), config)[0])


def _potentials(zs, config):
    lz = config.plate_dims_m[2]
    zs = np.asarray(zs, dtype=float)
    if np.any(zs - 0.5 * lz <= 0) or np.any(zs + 0.5 * lz >= config.gap_m):
        raise DomainError("plate touches a magnet layer")
    energy = np.zeros(zs.shape)
    chi = np.asarray(config.susceptibility, dtype=float)
    if np.any(chi):
        pts = np.stack([_plate_points(z, config)[0] for z in zs])
        weights = _plate_points(zs[0], config)[1]
        B = array_field(pts, config)
        density = -(B * B) @ chi / (2 * MU0)
        energy = density @ weights * config.plate_volume
    if config.gravity:
        energy = energy + config.plate_mass * G_ACCEL * zs
    return energy


def _curvature(z, config, dz):
    # fourth-order five-point stencils for U'' and U'
    u = _potentials(z + dz * np.arange(-2, 3), config)
    curv = (-u[0] + 16 * u[1] - 30 * u[2] + 16 * u[3] - u[4]) / (12 * dz**2)
    slope = (u[0] - 8 * u[1] + 8 * u[3] - u[4]) / (12 * dz)
    return curv, slope


def equilibrium(config, dz=None):
    """Stable height z0 and stiffness U''(z0) of the vertical mode."""
    lz = config.plate_dims_m[2]
    lo = 0.5 * lz * 1.0001
    hi = config.gap_m - 0.5 * lz * 1.0001
    if hi <= lo:
        raise NoEquilibriumError("no room for the plate inside the gap")
    # coarse scan first: the bounded minimiser alone can land on an edge
    zs = np.linspace(lo, hi, 19)[1:-1]
    us = _potentials(zs, config)
    k = int(np.argmin(us))
    if k == 0 or k == len(zs) - 1:
        raise NoEquilibriumError("potential minimum sits at the edge of the gap")
    res = optimize.minimize_scalar(
        lambda z: plate_potential(z, config),
        bracket=(zs[k - 1], zs[k], zs[k + 1]),
        method="brent",
        tol=1e-12,
    )
    z0 = float(res.x)
    if dz is None:
        dz = 1e-3 * (hi - lo)
    curv, slope = _curvature(z0, config, dz)
    if not curv > 0:
        raise NoEquilibriumError(f"non-positive curvature {curv:.3e} at z0={z0:.3e}")
    return z0, curv, slope


def trap_frequency(d, config=None, delta_rel=1e-3):
    """Vertical trap frequency at gap ``d`` and its derivative with respect to d."""
    config = TrapConfig() if config is None else config
    cfg = replace(config, gap_m=d)

    def omega_at(gap):
        z0, curv, slope = equilibrium(replace(config, gap_m=gap))
        return np.sqrt(curv / config.plate_mass), z0, curv, slope

    omega, z0, curv, slope = omega_at(d)
    dd = delta_rel * d
    w_plus = omega_at(d + dd)[0]
    w_minus = omega_at(d - dd)[0]
    dwdd = (w_plus - w_minus) / (2 * dd)
    diag = {
        "curvature_J_m2": curv,
        "residual_force_N": slope,
        "mass_kg": cfg.plate_mass,
        "midplane_offset_m": z0 - 0.5 * d,
    }
    return TrapResult(omega=float(omega), z0=z0, dwdd=float(dwdd), diagnostics=diag)


def frequency_curve(d_values, config=None):
    """ω(d) over a grid of separations; rows follow the order of ``d_values``."""
    config = TrapConfig() if config is None else config
    return [trap_frequency(float(d), config) for d in d_values]
