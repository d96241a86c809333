"""Joint evolution at desk scale: analytic reduced state against the exact one.

Run: python3 demos/03_time_evolution.py
"""
import math

import numpy as np

from zeptosense import dynamics as dy
from zeptosense import hilbert as hb
from zeptosense import metrology as mt

p = dy.SystemParams.scaled()
print(p)

# %% which thermal factor does the partial trace pick?
winner, worst = dy.adjudicate_thermal_factor(p, np.linspace(0, 6 * math.pi, 61))
print("thermal factor:", winner, {k: f"{v:.1e}" for k, v in worst.items()})

# %% purity dips between decoupling times and returns to one at 2 pi n
for tau in (0.0, math.pi, 2 * math.pi, 3 * math.pi, 4 * math.pi):
    red = dy.reduced_cavity_numeric(tau / p.omega, p)
    print(f"  omega t = {tau / math.pi:.0f} pi: purity {hb.purity(red):.6f}")

# %% QFI for omega is largest at the decoupling times
taus = np.linspace(0, 4 * math.pi, 81)
F = [mt.qfi_from_pair(mt.derivative_pair(lambda q, t=t: dy.reduced_cavity_analytic(t / q.omega, q), p)).value
     for t in taus]
k = int(np.argmax(F))
print(f"max QFI {F[k]:.3f} at omega t = {taus[k] / math.pi:.2f} pi; "
      f"closed form at 4 pi: {mt.qfi_pure_analytic(p, 2).value:.3f}")

# %% quadrature trajectory of the cavity field
xy = dy.quadrature_trajectory(np.linspace(0, 2 * math.pi, 5) / p.omega, p)
print(np.round(xy, 4))
