"""
Integrated density of states
============================

Sturm counting on finite boxes gives N(E). It is tied to the Schrodinger
rotation number by N = 1 - 2 rho, and gaps open at the labels {k alpha}.
Near a gap edge N grows like a square root.
"""

import numpy as np

from qplab.potential import amo
from qplab.schrodinger import (
    GOLDEN,
    edge_scales,
    gap_label_values,
    holder_exponent,
    ids,
    ids_rotation_check,
    ids_sweep,
    labelled_gap,
)

v = amo(2.0)
print("N(0) =", ids(v, GOLDEN, 0.0, size=1000).N)
print("|N - 1 + 2 rho| at E = 1:", ids_rotation_check(v, GOLDEN, 1.0, size=1000, N_rot=100_000))

# Resolve the gap labelled by k = 1 and fit the Holder exponent at both edges.
Es = np.arange(-4.8, 4.8, 1e-3)
sw = ids_sweep(v, GOLDEN, Es, size=1000)
label = gap_label_values(GOLDEN, 1)[1]
lo, hi = labelled_gap(sw, label)
scales = edge_scales(hi - lo, smallest=2.0**-8)
for E0 in (lo, hi):
    fit = holder_exponent(sw, E0, scales)
    print(f"edge {E0:+.5f}: exponent {fit.exponent:.3f}, R^2 {fit.r_squared:.4f}")
