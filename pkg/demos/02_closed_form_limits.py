"""Closed-form QFI with the laboratory constants: headline precision and scaling.

Run: python3 demos/02_closed_form_limits.py
"""
import math

import numpy as np

from zeptosense import dynamics as dy
from zeptosense import metrology as mt

lab = dy.SystemParams.table1(alpha=1e3)
print(f"omega = {lab.omega:.1f} rad/s, chi = {lab.chi:.3e}, S = {lab.S:.3e}")

# %% the separation QFI needs d omega/dd; invert the headline value for it
dwdd = mt.backsolve_dwdd(lab, 7.6e38, n=1)
F = mt.qfi_pure_analytic(lab, 1, dwdd)
print(f"d omega/dd implied by F_Q = 7.6e38: {dwdd:.4g} rad/(s m)")
print(f"F_Q = {F.value:.3g} {F.units}, delta d = {F.precision:.3g} m")

# %% later decoupling times help as n^2
for n in (1, 2, 5):
    print(f"  n = {n}: F_Q = {mt.qfi_pure_analytic(lab, n, dwdd).value:.3g}")

# %% scaling with photon number: shot noise, then linear, then Kerr
for lo, hi in ((1e2, 1e5), (1e9, 1e12)):
    N = np.logspace(math.log10(lo), math.log10(hi), 31)
    F_N = [mt.qfi_pure_analytic(lab.with_(alpha=math.sqrt(x))).value for x in N]
    print(f"  slope over [{lo:.0e}, {hi:.0e}]: {mt.scaling_fit(N, F_N).exponent:.3f}")
print(f"local exponent reaches 1.5 at N = {mt.crossover_photon_number(lab, 1.5):.3g}")
print(f"local exponent reaches 2.5 at N = {mt.crossover_photon_number(lab, 2.5):.3g}")
