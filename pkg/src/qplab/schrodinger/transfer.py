"""Schrodinger cocycle A_E(theta) = [[E - v(theta), -1], [1, 0]]."""

from __future__ import annotations

import math

import numpy as np

from ..cocycle import Companion, CocycleMap, companion_cocycle
from ..potential import AnalyticPotential, TrigPotential, truncate

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def as_trig(v, eps_max: float = 0.0) -> tuple[TrigPotential, float]:
    """Trig representation accurate to ~1e-16 on |Im z| <= eps_max, plus strip radius."""
    if isinstance(v, TrigPotential):
        return v, math.inf
    if isinstance(v, AnalyticPotential):
        if eps_max >= v.decay_rate:
            eps_max = 0.9 * v.decay_rate
        n = v.truncation_degree(eps_max)
        return truncate(v, n), v.decay_rate
    raise TypeError(f"unsupported potential type {type(v).__name__}")


def schrodinger_cocycle(v, E: float, alpha: float = GOLDEN, eps_max: float | None = None) -> CocycleMap:
    """Schrodinger cocycle of ``v`` at energy ``E`` over rotation by ``alpha``.

    Analytic potentials are truncated so that evaluation stays accurate up
    to |Im z| = eps_max (default half the analyticity radius).
    """
    if eps_max is None:
        eps_max = 0.5 * getattr(v, "decay_rate", 0.0)
    tv, strip = as_trig(v, eps_max)
    comp = Companion(np.array([E, -1.0], dtype=complex), 0, -np.asarray(tv.coeffs, dtype=complex))
    return companion_cocycle(alpha, comp, strip, name=f"schrodinger(E={E})")
