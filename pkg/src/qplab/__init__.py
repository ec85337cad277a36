"""qplab: numerical lab for one-frequency quasiperiodic Schrodinger operators and their Aubry duals."""

__version__ = "0.1.0"

from .errors import QPLabError
from .arith import FrequencyProfile, beta_estimate, continued_fraction, liouville_frequency, parse_alpha
from .potential import AnalyticPotential, TrigPotential, amo, free, from_spec, geometric, stock_non_even_d2, truncate
from .cocycle import CocycleMap, LyapunovSpectrum, lyapunov_spectrum, rotation_number
from .dual import DualCocycle, dual_cocycle, dual_lyapunov_spectrum
