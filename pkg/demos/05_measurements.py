"""How close do homodyne and SLD measurements come to the QFI?

Run: python3 demos/05_measurements.py
"""
import math

from zeptosense import dynamics as dy
from zeptosense import experiments as ex
from zeptosense import metrology as mt

p = dy.SystemParams.scaled()

for tau in (math.pi, 2 * math.pi, 3 * math.pi, 4 * math.pi):
    pair = ex.closed_form_pair(tau, p)
    F = mt.qfi_from_pair(pair).value
    Fs = mt.sld_projective_cfi(pair.state, pair.derivative).value
    row = "  ".join(f"{mt.homodyne_cfi(pair, th).value / F:.3f}" for th in ex.THETAS)
    print(f"omega t = {tau / math.pi:.0f} pi: QFI {F:8.4f}  SLD/QFI {Fs / F:.6f}  "
          f"homodyne/QFI by theta: {row}")

# %% precision bound from the QFI, converted to the separation
F = mt.qfi_from_pair(ex.closed_form_pair(2 * math.pi, p))
print("single-shot omega precision at 2 pi:", F.precision)
print("with M = 100 repetitions:", mt.qcrb_bound(F.value, 100) ** 0.5)
