"""
Bloch waves from the center
===========================

When the center cocycle reduces to a rotation, the Fourier coefficients of
the reducing frame give an exponentially decaying eigenfunction of the
dual operator. It matches direct diagonalization.
"""

from qplab.center import bloch_reconstruct, center_frame, cosine_similarity, direct_eigenvector
from qplab.potential import amo
from qplab.schrodinger import GOLDEN, energy_at_ids

v = amo(2.0)
E = energy_at_ids(v, GOLDEN, 0.45)
pair = bloch_reconstruct(center_frame(v, E, GOLDEN, grid_size=1024))
print(f"conjugation residual {pair.conjugation_residual:.1e}, eigen-residual {pair.u.residual:.1e}")
print(f"decay rate {pair.u.decay_rate:.4f}")
Ed, idx, vec = direct_eigenvector(v, GOLDEN, pair.u.phase, E, half=1000)
print(f"direct eigenvalue {Ed:.8f} vs {E:.8f}, cosine similarity {cosine_similarity(pair.u, idx, vec):.6f}")
