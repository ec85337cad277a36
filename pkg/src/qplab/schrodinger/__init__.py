"""Schrodinger-side analysis."""

from .transfer import GOLDEN, as_trig, schrodinger_cocycle
from .profile import (
    LyapunovProfile,
    RegimeLabel,
    acceleration,
    fit_slopes,
    classify,
    lyapunov_profile,
    t_acceleration,
)
from .ids import (
    HolderFit,
    IdsRecord,
    IdsSweep,
    edge_scales,
    energy_at_ids,
    gap_label_values,
    labelled_gap,
    holder_exponent,
    ids,
    ids_rotation_check,
    ids_sweep,
    stieltjes_log,
    sturm_count,
    thouless_check,
)
from .localization import DecayReport, decay_rate, localization_probe
