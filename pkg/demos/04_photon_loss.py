"""Cavity loss through repeated beam-splitter collisions.

Run: python3 demos/04_photon_loss.py  (about two minutes)
"""
import math

import numpy as np

from zeptosense import channels as ch
from zeptosense import dynamics as dy
from zeptosense import experiments as ex
from zeptosense import hilbert as hb

p = dy.SystemParams.scaled(dims=(16, 20))
cfg = ch.CollisionConfig(gamma_over_omega=0.01)
print(f"gamma/omega = 0.01, {cfg.steps_per_period} steps per period -> phi_tau = {cfg.phi_tau:.4f}")

# %% collisions converge to the master equation at first order in the step
q = dy.SystemParams.scaled(chi=0.1, S=0.2, alpha=0.5, dims=(10, 20))
ref = ch.lindblad_reference(dy.initial_state(q), 2 * math.pi, q, 0.1)
for steps in (49, 98, 196):
    lossy = ch.lossy_state(2 * math.pi, q, ch.CollisionConfig(0.1, steps, 4))
    print(f"  {steps:4d} steps: trace distance {hb.trace_distance(lossy, ref):.2e}")

# %% the second QFI peak drops with the loss rate
for g in (0.0, 0.01, 0.05, 0.1):
    ph, qfi, _, _ = ex.lossy_qfi_trajectory(p, ch.CollisionConfig(g), 2, record_every=49)
    print(f"  gamma/omega = {g:.2f}: F(4 pi) = {qfi[ex.decoupling_rows(ph, 2)[2]]:.4f}")
