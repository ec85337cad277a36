"""
The two-dimensional center
==========================

At a type I energy the dual cocycle has a 2-dimensional center. After
symplectic normalization it reads e^{2 pi i phi} C with C real and
unimodular. Its rotation numbers are tied to the IDS.
"""

import numpy as np

from qplab.center import center_frame, center_rotation, duality_ids_sweep, truncation_convergence
from qplab.center.rotation import circ_diff
from qplab.potential import amo, geometric, stock_non_even_d2
from qplab.schrodinger import GOLDEN, energy_at_ids

v = stock_non_even_d2()
E = energy_at_ids(v, GOLDEN, 0.5)
fr = center_frame(v, E, GOLDEN, grid_size=256)
print(f"frame residual {fr.frame_residual:.1e}, |det C - 1| {fr.det_defect:.1e}, phi spread {np.ptp(fr.phi):.4f}")
rot = center_rotation(fr, 100_000)
print(f"rho_hat {rot.rho_hat:.6f}, rho1 {rot.rho1:.6f}, rho2 {rot.rho2:.6f}")

# rho2 - rho1 - N(E) is constant along the spectrum.
a = amo(2.0)
Es = [energy_at_ids(a, GOLDEN, n) for n in (0.3, 0.5, 0.7)]
sw = duality_ids_sweep(a, GOLDEN, Es, grid_size=256, rot_N=100_000)
print("s(E) mod 1 =", np.round(circ_diff(sw.s, 0.0), 5), "circular std", sw.residual)

# Frames of truncated analytic potentials converge geometrically.
g = geometric(2.0, 0.5)
st = truncation_convergence(g, GOLDEN, energy_at_ids(g, GOLDEN, 0.85), range(2, 6), grid_size=256)
print("truncation distances:", np.round(st.distances, 5), "slope", round(st.slope, 3))
