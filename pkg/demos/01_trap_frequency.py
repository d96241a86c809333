"""Vertical trap frequency of a graphite plate between two magnet arrays.

Run: python3 demos/01_trap_frequency.py
"""
from dataclasses import replace

import numpy as np

from zeptosense import trap

cfg = trap.TrapConfig()
print(f"plate mass {cfg.plate_mass:.3e} kg, {cfg.cells}x{cfg.cells} cubes per layer")

# %% field of one cube far away looks like a dipole
pt = np.array([0.0, 0.0, 20 * cfg.magnet_side_m])
B = trap.cuboid_field(pt, [0, 0, 0], cfg.magnet_side_m, cfg.magnetization_t)
print("B on axis at 20 h:", B)

# %% equilibrium and frequency at the nominal gap
res = trap.trap_frequency(cfg.gap_m, cfg)
print(f"d = {cfg.gap_m * 1e3:.2f} mm: omega/2pi = {res.freq_hz:.1f} Hz, "
      f"z0 = {res.z0 * 1e6:.1f} um, d omega/dd = {res.dwdd:.3e} rad/(s m)")
print("residual force at z0:", res.diagnostics["residual_force_N"], "N")

# %% the plate sits below the midplane; without gravity it would be centred
light = trap.trap_frequency(cfg.gap_m, replace(cfg, gravity=False))
print(f"without gravity: {light.freq_hz:.1f} Hz at z0 - d/2 = "
      f"{light.diagnostics['midplane_offset_m']:.1e} m")

# %% omega(d) over a few separations
for d in (1.5e-4, 2.5e-4, 3.5e-4, 4.5e-4):
    r = trap.trap_frequency(d, cfg)
    print(f"  d = {d * 1e3:.2f} mm  f = {r.freq_hz:7.1f} Hz")
