"""
Localization versus extended behaviour
======================================

For lambda = 2 and the golden frequency, box eigenvectors decay at the
Lyapunov rate ln 2. For lambda = 1.05 and a Liouville-type frequency the
participation ratio grows with the box instead.
"""

import numpy as np

from qplab.arith import liouville_frequency
from qplab.potential import amo
from qplab.schrodinger import GOLDEN, localization_probe

rep = localization_probe(amo(2.0), GOLDEN, 0.0, (-5.0, 5.0), size=1000)
print(f"lambda=2: median decay rate {rep.median_rate / np.log(2):.3f} ln 2")

alpha = liouville_frequency(0.5, 3).alpha
for n in (500, 1000):
    r = localization_probe(amo(1.05), alpha, 0.0, (-5.0, 5.0), size=n)
    print(f"lambda=1.05, size {n}: mean participation {np.mean(r.participation):.1f}")
