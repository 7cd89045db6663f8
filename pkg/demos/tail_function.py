"""Where does the dimension-free tail start beating exp(-t/2)?

phi(t) = t / (e^t - t - 1) plays the role that e^{-t} plays in the usual
matrix Chernoff bounds. It decays a little slower, but once t is moderately
large it is dominated by e^{-t/2}. This script locates the crossing and
shows how much room is left at t = 2.6.
"""

import math

import numpy as np
from scipy.optimize import brentq

from mtails.tailfn import invert_phi, phi

# The crossing point, found with an off-the-shelf root finder.
cross = brentq(lambda t: phi(t) - math.exp(-t / 2), 1.0, 5.0, xtol=1e-14)
print(f"phi(t) = exp(-t/2) at t = {cross:.9f}")

for t in (2.5, cross, 2.59, 2.6, 3.0, 5.0, 10.0):
    print(f"  t = {t:8.5f}   phi = {phi(t):.6e}   exp(-t/2) = {math.exp(-t / 2):.6e}")

# Turning a failure probability back into t: the confidence form of the bounds.
print()
for p in (0.1, 0.05, 0.01, 1e-6):
    t = invert_phi(p)
    print(f"phi(t) = {p:g}  ->  t = {t:.6f}   (compare log(1/p) = {math.log(1 / p):.6f})")

grid = np.linspace(2.6, 50, 4741)
print(f"\nlargest phi(t) - exp(-t/2) on [2.6, 50]: {np.max(phi(grid) - np.exp(-grid / 2)):.3e}")
