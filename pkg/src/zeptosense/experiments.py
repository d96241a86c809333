"""Configured sweeps that regenerate the datasets behind each figure.

Configuration files are INI documents with the sections ``trap``,
``system``, ``collision``, ``sweep`` and ``output``. Every key carries its
unit in its name; unknown keys are rejected. ``schema()`` lists the keys
and defaults.
"""
import configparser
import csv
import hashlib
import io
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import channels, dynamics, hilbert, metrology, trap
from .errors import ConfigError, DerivativeStepError

log = logging.getLogger(__name__)

HEADLINE_QFI_M2 = 7.6e38
THETAS = (0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2)

_SCHEMA = {
    "trap": {
        "magnet_side_m": (float, 5e-3),
        "magnetization_t": (float, 1.48),
        "cells": (int, 8),
        "gap_m": (float, 2.5e-4),
        "plate_length_m": (float, 1e-4),
        "plate_width_m": (float, 1e-4),
        "plate_thickness_m": (float, 4e-5),
        "chi_gr_x": (float, -85e-6),
        "chi_gr_y": (float, -85e-6),
        "chi_gr_z": (float, -450e-6),
        "density_kg_m3": (float, 2260.0),
        "grid_nx": (int, 6),
        "grid_ny": (int, 6),
        "grid_nz": (int, 6),
        "volume_rule": (str, "gauss"),
        "top_polarity": (int, -1),
        "plate_x_m": (float, 0.0),
        "plate_y_m": (float, 0.0),
    },
    "system": {
        # closed-form (laboratory) values
        "omega_hz": (float, 117.0),
        "chi_hz": (float, 55e3),
        "s_hz": (float, 8e11),
        "omega_c_hz": (float, 1e14),
        "cavity_length_m": (float, 100e-6),
        "photons_lab": (float, 1e6),
        "decoupling_index": (int, 1),
        "dwdd_rad_s_m": (str, "backsolve"),
        "target_qfi_m2": (float, HEADLINE_QFI_M2),
        # dimensionless values for Fock-space numerics
        "chi_over_omega": (float, 0.3),
        "s_over_omega": (float, 0.68),
        "alpha_re": (float, 0.1),
        "alpha_im": (float, 0.0),
        "n_beta": (float, 0.1),
        "dim_cavity": (int, 16),
        "dim_mechanics": (int, 30),
        "rel_step": (float, metrology.DEFAULT_REL_STEP),
    },
    "collision": {
        "gamma_over_omega": (float, 0.0),
        "steps_per_period": (int, 49),
        "ancilla_dim": (int, 3),
    },
    "sweep": {
        "d_start_m": (float, 1.2e-4),
        "d_stop_m": (float, 5.0e-4),
        "d_num": (int, 9),
        "n_log10_start": (float, 0.0),
        "n_log10_stop": (float, 13.0),
        "n_per_decade": (int, 10),
        "periods": (float, 3.0),
        "samples": (int, 300),
        "gammas_over_omega": (list, "0"),
        "alphas": (list, "0.1"),
        "thetas_rad": (list, ",".join(repr(t) for t in THETAS)),
        "record_every": (int, 1),
    },
    "output": {
        "dir": (str, "out"),
        "emit_plots": (bool, False),
    },
}


def schema():
    """Mapping section -> key -> (type name, default)."""
    return {s: {k: (t.__name__, d) for k, (t, d) in keys.items()} for s, keys in _SCHEMA.items()}


@dataclass
class RunConfig:
    trap: trap.TrapConfig
    system: dynamics.SystemParams
    lab: dynamics.SystemParams
    collision: channels.CollisionConfig
    values: dict = field(repr=False)
    source: str = "<defaults>"

    @property
    def sweep(self):
        return self.values["sweep"]

    @property
    def out_dir(self):
        return self.values["output"]["dir"]

    @property
    def emit_plots(self):
        return self.values["output"]["emit_plots"]

    def digest(self):
        """SHA-256 of the fully resolved configuration."""
        lines = []
        for sec in sorted(self.values):
            for key in sorted(self.values[sec]):
                lines.append(f"{sec}.{key}={self.values[sec][key]!r}")
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def _convert(typ, raw, where):
    try:
        if typ is bool:
            low = str(raw).strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ValueError(raw)
            return low in ("true", "yes", "1", "on")
        if typ is list:
            return tuple(float(v) for v in str(raw).replace(";", ",").split(",") if v.strip())
        return typ(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot read {raw!r} as {typ.__name__}") from exc


def parse_config(text="", source="<string>", overrides=None):
    """Build a RunConfig from INI text layered over the defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    values = {s: {k: _convert(t, d, f"{s}.{k}") for k, (t, d) in keys.items()}
              for s, keys in _SCHEMA.items()}
    for sec in parser.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{sec}]")
        for key, raw in parser.items(sec):
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"{source}: unknown key {sec}.{key}")
            values[sec][key] = _convert(_SCHEMA[sec][key][0], raw, f"{source}: {sec}.{key}")
    for (sec, key), val in (overrides or {}).items():
        values[sec][key] = val
    return _build(values, source)


def load_config(path=None, overrides=None):
    if path is None:
        return parse_config("", "<defaults>", overrides)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path), overrides)


def pinned_config(figure):
    """Shipped configuration for one of the reproducible figures."""
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure id {figure!r}; choose from {sorted(FIGURES)}")
    name = f"fig{figure}.ini"
    text = resources.files("zeptosense.configs").joinpath(name).read_text()
    return parse_config(text, name)


def _build(values, source):
    t, s, c = values["trap"], values["system"], values["collision"]
    try:
        trap_cfg = trap.TrapConfig(
            magnet_side_m=t["magnet_side_m"],
            magnetization_t=t["magnetization_t"],
            cells=t["cells"],
            gap_m=t["gap_m"],
            plate_dims_m=(t["plate_length_m"], t["plate_width_m"], t["plate_thickness_m"]),
            susceptibility=(t["chi_gr_x"], t["chi_gr_y"], t["chi_gr_z"]),
            density_kg_m3=t["density_kg_m3"],
            grid=(t["grid_nx"], t["grid_ny"], t["grid_nz"]),
            rule=t["volume_rule"],
            plate_xy_m=(t["plate_x_m"], t["plate_y_m"]),
            top_polarity=t["top_polarity"],
        )
        system = dynamics.SystemParams.scaled(
            chi=s["chi_over_omega"],
            S=s["s_over_omega"],
            alpha=complex(s["alpha_re"], s["alpha_im"]),
            n_beta=s["n_beta"],
            dims=(s["dim_cavity"], s["dim_mechanics"]),
        )
        lab = dynamics.SystemParams.table1(
            alpha=math.sqrt(s["photons_lab"]),
            omega=2 * math.pi * s["omega_hz"],
            chi=2 * math.pi * s["chi_hz"],
            S=2 * math.pi * s["s_hz"],
            omega_c=2 * math.pi * s["omega_c_hz"],
            length_m=s["cavity_length_m"],
        )
        coll = channels.CollisionConfig(
            gamma_over_omega=c["gamma_over_omega"],
            steps_per_period=c["steps_per_period"],
            ancilla_dim=c["ancilla_dim"],
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    sw = values["sweep"]
    for key in ("gammas_over_omega", "alphas", "thetas_rad"):
        if not sw[key]:
            raise ConfigError(f"{source}: sweep.{key} must not be empty")
    if sw["samples"] < 2 or sw["d_num"] < 1 or sw["n_per_decade"] < 1:
        raise ConfigError(f"{source}: sweep grids need positive sizes")
    if sw["n_log10_stop"] <= sw["n_log10_start"] or sw["d_stop_m"] < sw["d_start_m"]:
        raise ConfigError(f"{source}: sweep ranges must be increasing")
    dw = values["system"]["dwdd_rad_s_m"]
    if dw not in ("backsolve", "trap"):
        _convert(float, dw, f"{source}: system.dwdd_rad_s_m")
    return RunConfig(trap_cfg, system, lab, coll, values, source)


# ---------------------------------------------------------------- output


@dataclass
class Table:
    name: str
    columns: list
    units: list
    rows: list = field(default_factory=list)

    def column(self, name):
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows])


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_table(table, directory, config, command):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{table.name}.csv")
    with open(path, "w", newline="") as fh:
        fh.write(f"# zeptosense {command} config_sha256={config.digest()} source={config.source}\n")
        fh.write("# units: " + ", ".join(f"{c}={u}" for c, u in zip(table.columns, table.units)) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_table(path):
    """Read a CSV written by ``write_table`` back into a ``Table``."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("".join(lines))))
    head, body = rows[0], rows[1:]

    def conv(v):
        try:
            return float(v)
        except ValueError:
            return v

    name = os.path.splitext(os.path.basename(path))[0]
    return Table(name, head, [""] * len(head), [[conv(v) for v in r] for r in body])


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- commands


def resolve_dwdd(config):
    """(value, how) for the separation conversion factor."""
    spec = config.values["system"]["dwdd_rad_s_m"]
    if spec == "backsolve":
        target = config.values["system"]["target_qfi_m2"]
        n = config.values["system"]["decoupling_index"]
        return metrology.backsolve_dwdd(config.lab, target, n), "backsolve"
    if spec == "trap":
        res = trap.trap_frequency(config.trap.gap_m, config.trap)
        return abs(res.dwdd), "trap"
    return float(spec), "override"


def cmd_trap(config, threads=1):
    sw = config.sweep
    ds = np.linspace(sw["d_start_m"], sw["d_stop_m"], sw["d_num"])
    results = _pmap(lambda d: trap.trap_frequency(float(d), config.trap), ds, threads)
    table = Table("trap", ["d_m", "omega_rad_s", "dwdd_rad_s_m", "z0_m", "freq_hz"],
                  ["m", "rad/s", "rad/(s m)", "m", "Hz"])
    for d, r in zip(ds, results):
        table.rows.append([d, r.omega, r.dwdd, r.z0, r.freq_hz])
    return [table]


def photon_grid(config):
    sw = config.sweep
    n_pts = int(round((sw["n_log10_stop"] - sw["n_log10_start"]) * sw["n_per_decade"])) + 1
    return np.logspace(sw["n_log10_start"], sw["n_log10_stop"], n_pts)


REGIMES = {"shot_noise": (1e2, 1e5), "kerr": (1e9, 1e12)}


def cmd_scaling(config, threads=1):
    lab = config.lab
    n = config.values["system"]["decoupling_index"]
    dwdd, how = resolve_dwdd(config)
    table = Table("scaling", ["N", "F_Q_m2", "delta_d_m", "local_exponent"],
                  ["photons", "m^-2", "m", "1"])
    Ns = photon_grid(config)
    for N in Ns:
        F = metrology.qfi_pure_analytic(lab.with_(alpha=math.sqrt(N)), n, dwdd).value
        table.rows.append([N, F, 1 / math.sqrt(F), float(metrology.local_exponent(lab, N))])
    fits = Table("scaling_fits", ["quantity", "N_lo", "N_hi", "value", "residual"],
                 ["", "photons", "photons", "", "decades"])
    F_all = table.column("F_Q_m2")
    for name, (lo, hi) in REGIMES.items():
        sel = (Ns >= lo * (1 - 1e-9)) & (Ns <= hi * (1 + 1e-9))
        fit = metrology.scaling_fit(Ns[sel], F_all[sel])
        fits.rows.append([f"exponent_{name}", lo, hi, fit.exponent, fit.residual])
    fits.rows.append(["crossover_shot_to_linear", Ns[0], Ns[-1],
                      metrology.crossover_photon_number(lab, 1.5), 0.0])
    fits.rows.append(["crossover_linear_to_kerr", Ns[0], Ns[-1],
                      metrology.crossover_photon_number(lab, 2.5), 0.0])
    fits.rows.append(["dwdd_rad_s_m_" + how, 0, 0, dwdd, 0.0])
    return [table, fits]


def phase_grid(config):
    sw = config.sweep
    return np.linspace(0.0, 2 * math.pi * sw["periods"], sw["samples"])


def _closed_form_state(tau):
    return lambda q: dynamics.reduced_cavity_analytic(tau / q.omega, q)


def closed_form_pair(tau, p, rel_step=metrology.DEFAULT_REL_STEP):
    """Derivative pair of the lossless reduced cavity state at phase ``tau``.

    The derivative is taken at a fixed number of mechanical periods and
    checked against the half step.
    """
    pair, _ = metrology.checked_derivative(_closed_form_state(tau), p, rel_step)
    return pair


def cmd_evolve(config, threads=1):
    p = config.system
    rel = config.values["system"]["rel_step"]
    taus = phase_grid(config)
    rho0 = dynamics.initial_state(p)
    a = hilbert.annihilation(p.dims[0])

    def row(tau):
        pair = closed_form_pair(tau, p, rel)
        F = metrology.qfi_from_pair(pair).value if abs(p.alpha) > 0 else 0.0
        exact = hilbert.partial_trace(dynamics.evolve_joint(rho0, tau / p.omega, p), p.dims, 0)
        am = hilbert.expect(a, pair.state)
        return [tau, F, hilbert.infidelity(pair.state, exact), math.sqrt(2) * am.real,
                math.sqrt(2) * am.imag, hilbert.purity(pair.state)]

    table = Table("evolve", ["t_omega", "qfi_omega", "infidelity", "x", "p", "purity"],
                  ["rad", "1/omega^2", "1", "1", "1", "1"])
    table.rows = _pmap(row, taus, threads)
    return [table]


def lossy_qfi_trajectory(p, coll, periods, record_every=1, rel_step=metrology.DEFAULT_REL_STEP,
                         check_tol=1e-4):
    """QFI (omega units) of the reduced cavity along a lossy trajectory.

    Collision-model runs at omega +- h and omega +- h/2 share the same
    phase grid, so every recorded time gets a central difference and a
    half-step consistency check (``DerivativeStepError`` beyond
    ``check_tol``; pass None to skip the extra runs).
    Returns (phases, qfi, reduced states, derivative pairs).
    """
    h = rel_step * p.omega

    def reduced_run(q):
        traj = channels.evolve_lossy(dynamics.initial_state(q), periods, q, coll, record_every)
        return traj.times * q.omega, [metrology._normalized(hilbert.partial_trace(r, q.dims, 0))
                                      for r in traj.states]

    phases, center = reduced_run(p)
    minus = reduced_run(p.at_omega(p.omega - h))[1]
    plus = reduced_run(p.at_omega(p.omega + h))[1]
    pairs = [metrology.DerivativePair(m, pl, h, c) for m, pl, c in zip(minus, plus, center)]
    if check_tol is not None:
        minus2 = reduced_run(p.at_omega(p.omega - h / 2))[1]
        plus2 = reduced_run(p.at_omega(p.omega + h / 2))[1]
        for k, (pair, m2, p2) in enumerate(zip(pairs, minus2, plus2)):
            d2 = (p2 - m2) / h
            scale = np.linalg.norm(d2)
            if scale <= metrology.roundoff_floor(pair):
                continue
            err = np.linalg.norm(pair.derivative - d2) / scale
            if err > check_tol:
                raise DerivativeStepError(
                    f"derivative unstable under step halving at omega t = {phases[k]:.4g}: {err:.2e}")
    qfi = np.array([metrology.qfi_from_pair(pair).value for pair in pairs])
    return phases, qfi, center, pairs


def decoupling_rows(phases, n_max):
    """Indices of the recorded phases closest to 2 pi n, n = 1 .. n_max."""
    out = {}
    for n in range(1, n_max + 1):
        k = int(np.argmin(np.abs(phases - 2 * math.pi * n)))
        if abs(phases[k] - 2 * math.pi * n) < 1e-9:
            out[n] = k
    return out


def cmd_decohere(config, threads=1):
    p = config.system
    sw = config.sweep
    rel = config.values["system"]["rel_step"]
    gammas = sw["gammas_over_omega"]
    periods = sw["periods"]
    base = config.collision

    def coll_for(g):
        return channels.CollisionConfig(g, base.steps_per_period, base.ancilla_dim)

    def run_gamma(g):
        return lossy_qfi_trajectory(p, coll_for(g), periods, sw["record_every"], rel)

    series = _pmap(run_gamma, gammas, threads)
    traj = Table("decohere", ["t_omega", "gamma_over_omega", "qfi_omega"], ["rad", "1", "1/omega^2"])
    peaks = Table("decohere_peaks", ["n", "t_omega", "gamma_over_omega", "alpha", "qfi_omega"],
                  ["1", "rad", "1", "1", "1/omega^2"])
    for g, (phases, qfi, _, _) in zip(gammas, series):
        for tau, F in zip(phases, qfi):
            traj.rows.append([tau, g, F])
        for n, k in decoupling_rows(phases, int(periods)).items():
            peaks.rows.append([n, phases[k], g, abs(p.alpha), qfi[k]])
    tables = [traj, peaks]
    alphas = sw["alphas"]
    if len(alphas) > 1:
        # second-peak QFI against drive amplitude at the first nonzero loss rate
        g = next((x for x in gammas if x > 0), gammas[0])
        n_peak = min(2, int(periods))
        scan = Table("decohere_alpha", ["alpha", "gamma_over_omega", "n", "qfi_omega"],
                     ["1", "1", "1", "1/omega^2"])

        def run_alpha(al):
            q = p.with_(alpha=al)
            ph, qfi, _, _ = lossy_qfi_trajectory(q, coll_for(g), n_peak, base.steps_per_period, rel)
            return qfi[decoupling_rows(ph, n_peak)[n_peak]]

        for al, F in zip(alphas, _pmap(run_alpha, alphas, threads)):
            scan.rows.append([al, g, n_peak, F])
        tables.append(scan)
    return tables


def cmd_cfi(config, threads=1):
    p = config.system
    sw = config.sweep
    rel = config.values["system"]["rel_step"]
    thetas = sw["thetas_rad"]
    coll = config.collision
    if coll.gamma_over_omega > 0:
        phases, _, _, pairs = lossy_qfi_trajectory(p, coll, sw["periods"], sw["record_every"], rel)
        items = list(zip(phases, pairs))
    else:
        items = [(tau, None) for tau in phase_grid(config)]

    def rows_at(item):
        tau, pair = item
        if pair is None:
            pair = closed_form_pair(tau, p, rel)
        F = metrology.qfi_from_pair(pair).value
        F_sld = metrology.sld_projective_cfi(pair.state, pair.derivative).value
        return [[tau, th, metrology.homodyne_cfi(pair, th).value, F, F_sld] for th in thetas]

    table = Table("cfi", ["t_omega", "theta_rad", "f_classical", "f_quantum", "f_sld"],
                  ["rad", "rad", "1/omega^2", "1/omega^2", "1/omega^2"])
    for rows in _pmap(rows_at, items, threads):
        table.rows.extend(rows)
    return [table]


COMMANDS = {
    "trap": cmd_trap,
    "scaling": cmd_scaling,
    "evolve": cmd_evolve,
    "decohere": cmd_decohere,
    "cfi": cmd_cfi,
}

FIGURES = {"1b": "trap", "2": "scaling", "3": "evolve", "4": "decohere", "5": "cfi"}


def run(command, config, out_dir=None, threads=1, emit_plots=None):
    """Run one command, write its CSVs and return (tables, paths)."""
    tables = COMMANDS[command](config, threads)
    out_dir = config.out_dir if out_dir is None else out_dir
    paths = [write_table(t, out_dir, config, command) for t in tables]
    if config.emit_plots if emit_plots is None else emit_plots:
        from . import plots

        paths.extend(plots.plot_tables(command, tables, out_dir))
    return tables, paths


# ---------------------------------------------------------------- checks


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _local_maxima(y):
    """Interior local maxima; a rising last sample counts as well."""
    ks = [k for k in range(1, len(y) - 1) if y[k] >= y[k - 1] and y[k] >= y[k + 1]]
    if len(y) > 1 and y[-1] >= y[-2]:
        ks.append(len(y) - 1)
    return ks


def check_figure(figure, tables, config):
    """Qualitative and quantitative checks on one regenerated figure."""
    t = {tab.name: tab for tab in tables}
    checks = []
    if figure == "1b":
        tab = t["trap"]
        d = tab.column("d_m")
        w = tab.column("omega_rad_s")
        k = int(np.argmin(np.abs(d - config.trap.gap_m)))
        f_nom = w[k] / (2 * math.pi)
        checks.append(Check("trap frequency at nominal gap", 117 / 2 <= f_nom <= 2 * 117,
                            f"{f_nom:.1f} Hz vs 117 Hz (factor 2)"))
        checks.append(Check("omega decreasing in d", bool(np.all(np.diff(w) < 0)),
                            f"omega from {w[0]:.1f} to {w[-1]:.1f} rad/s"))
    elif figure == "2":
        fits = {r[0]: r for r in t["scaling_fits"].rows}
        k1 = fits["exponent_shot_noise"][3]
        k3 = fits["exponent_kerr"][3]
        nx = fits["crossover_shot_to_linear"][3]
        checks.append(Check("shot-noise exponent", abs(k1 - 1) <= 0.05, f"k = {k1:.4f}"))
        checks.append(Check("Kerr exponent", abs(k3 - 3) <= 0.05, f"k = {k3:.4f}"))
        checks.append(Check("crossover near 1e7", 1e7 / 3 <= nx <= 3e7, f"N = {nx:.3g}"))
    elif figure == "3":
        tab = t["evolve"]
        tau = tab.column("t_omega")
        F = tab.column("qfi_omega")
        inf = tab.column("infidelity")
        peaks = tau[_local_maxima(F)]
        n_max = int(tau[-1] // (2 * math.pi))
        step = tau[1] - tau[0]
        near = all(np.min(np.abs(peaks - 2 * math.pi * n)) <= step for n in range(1, n_max + 1))
        checks.append(Check("QFI peaks at decoupling times", near,
                            f"peaks at omega t / 2pi = {np.round(peaks / (2 * math.pi), 3).tolist()}"))
        checks.append(Check("analytic vs numeric infidelity", float(np.max(inf)) <= 1e-5,
                            f"max {np.max(inf):.2e}"))
    elif figure == "4":
        pk = t["decohere_peaks"]
        rows = [r for r in pk.rows if int(r[0]) == 2]
        rows.sort(key=lambda r: r[2])
        F = np.array([r[4] for r in rows])
        g = [r[2] for r in rows]
        checks.append(Check("second-peak QFI decreasing in loss", bool(np.all(np.diff(F) < 0)),
                            f"gamma/omega {g} -> {np.round(F, 5).tolist()}"))
        if len(F) > 1:
            ratio = F[0] / F[1]
            checks.append(Check("loss ratio F(0)/F(0.01)", abs(ratio - 1.2) <= 0.15,
                                f"{ratio:.3f}"))
        if "decohere_alpha" in t:
            Fa = t["decohere_alpha"].column("qfi_omega")
            checks.append(Check("second-peak QFI increasing in alpha",
                                bool(np.all(np.diff(Fa) > 0)), f"{np.round(Fa, 4).tolist()}"))
            if len(Fa) > 1:
                checks.append(Check("doubling alpha more than doubles QFI", Fa[1] > 2 * Fa[0],
                                    f"ratio {Fa[1] / Fa[0]:.3f}"))
    elif figure == "5":
        tab = t["cfi"]
        fc, fq, fs = tab.column("f_classical"), tab.column("f_quantum"), tab.column("f_sld")
        ok = bool(np.all(fc <= fq * (1 + 1e-8) + 1e-12))
        checks.append(Check("homodyne CFI <= QFI", ok, f"max ratio {np.max(fc / np.where(fq > 0, fq, 1)):.4f}"))
        nz = fq > 1e-12
        sat = float(np.max(np.abs(fs[nz] / fq[nz] - 1))) if nz.any() else 0.0
        checks.append(Check("SLD measurement saturates QFI", sat <= 1e-4, f"max rel dev {sat:.2e}"))
        tau, th = tab.column("t_omega"), tab.column("theta_rad")
        k1 = np.abs(tau - 2 * math.pi) < 1e-9
        if k1.any():
            best = th[k1][np.argmax(fc[k1])]
            r = float(np.max(fc[k1]) / fq[k1][0])
            checks.append(Check("theta = pi/2 optimal at first decoupling time",
                                abs(best - math.pi / 2) < 1e-9 and r >= 0.9,
                                f"best theta {best:.4f}, F/QFI {r:.3f}"))
    return checks


def reproduce(figure, out_dir, threads=1, emit_plots=False):
    """Regenerate one figure with its pinned config; returns (paths, checks)."""
    config = pinned_config(figure)
    tables, paths = run(FIGURES[figure], config, out_dir, threads, emit_plots)
    return paths, check_figure(figure, tables, config)
