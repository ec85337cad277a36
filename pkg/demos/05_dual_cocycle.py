"""
The dual cocycle
================

A degree-d trigonometric potential has a 2d-dimensional companion dual
cocycle. Its Lyapunov spectrum is symmetric, and its complexified top-d
sum is piecewise affine with breakpoint L(E)/2pi.
"""

import math

import numpy as np

from qplab.dual import dual_cocycle, dual_lyapunov_spectrum, haro_puig_check, jensen_profile, pairing_defect
from qplab.potential import stock_non_even_d2
from qplab.schrodinger import GOLDEN, energy_at_ids

v = stock_non_even_d2()
E = energy_at_ids(v, GOLDEN, 0.5)
spec = dual_lyapunov_spectrum(dual_cocycle(v, E), 200_000)
defect, tol = pairing_defect(spec)
print("dual spectrum:", np.round(spec.exponents, 5), "pairing defect", np.round(defect, 6))

jp = jensen_profile(v, E, np.linspace(0.0, 0.3, 16), N=50_000)
print(f"Jensen breakpoint {jp.flat_radius_fit:.4f}, slope/2pi {jp.post_slope_fit / (2 * math.pi):.3f}")
print("Haro-Puig residual:", haro_puig_check(v, E, N=100_000))
