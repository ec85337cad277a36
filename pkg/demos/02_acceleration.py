"""
Complexified Lyapunov exponents and acceleration
================================================

For the almost Mathieu operator v = 2 lambda cos(2 pi theta) with lambda = 2,
eps -> L_eps(E) is flat at ln lambda only after the first kink; on the
spectrum its right slope at eps = 0 is 2 pi, i.e. acceleration 1.
"""

import numpy as np

from qplab.potential import amo
from qplab.schrodinger import GOLDEN, acceleration, classify, energy_at_ids, lyapunov_profile

v = amo(2.0)
E = energy_at_ids(v, GOLDEN, 0.45)
prof = lyapunov_profile(v, E, N=50_000)
print(f"E = {E:.6f}, L(E) = {prof.L0:.5f} (ln 2 = {np.log(2):.5f})")
print("raw slopes / 2pi:", np.round(prof.raw_slopes, 4), "-> acceleration", acceleration(prof))

# Outside the spectrum the cocycle is uniformly hyperbolic and the acceleration vanishes.
print("E = 10 acceleration:", acceleration(lyapunov_profile(v, 10.0, N=50_000)))

# The regime label combines L, the acceleration and the T-acceleration.
lab = classify(v, GOLDEN, E, N=50_000)
print("regime:", lab.label, "omega", lab.omega, "T-acceleration", lab.t_omega)
