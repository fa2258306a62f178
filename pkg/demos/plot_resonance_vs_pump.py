"""
Resonant curve mapped out by the pump power
===========================================

With the length lock holding the orthogonally polarized control beam on
resonance, absorbed pump power shifts the resonance seen by the squeezed
polarization. A bright alignment beam transmitted through the cavity traces
the Airy curve as the pump power is scanned around 34.5 mW.
"""

import matplotlib.pyplot as plt
import numpy as np

from squeezelock.control import DEFAULT_THERMAL, detuning_from_pump, resonance_curve

p = np.linspace(0.5, 1.5, 401) * DEFAULT_THERMAL.set_point_power
curve = resonance_curve(p)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
near = np.abs(p / DEFAULT_THERMAL.set_point_power - 1) <= 0.1
ax1.plot(curve[near, 0] * 1e3, curve[near, 1])
ax1.set_xlabel("pump power (mW)")
ax1.set_ylabel("normalized transmission")

ax2.plot(detuning_from_pump(p - DEFAULT_THERMAL.set_point_power) / 1e6, curve[:, 1])
ax2.axvspan(-3, 3, alpha=0.2)
ax2.set_xlabel("detuning (MHz)")

for frac in (-0.1, 0.1):
    i = np.argmin(np.abs(p / DEFAULT_THERMAL.set_point_power - 1 - frac))
    print(f"{frac:+.0%} pump -> transmission {curve[i, 1]:.3f}")

plt.tight_layout()
plt.savefig("resonance_vs_pump.png")
