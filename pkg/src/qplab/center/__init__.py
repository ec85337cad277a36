"""Symplectic center of the dual cocycle: frames, rotation numbers, Bloch waves."""

from .frame import (
    CenterFrame,
    CenterSubspaces,
    center_exponents,
    center_frame,
    center_invariance_check,
    center_L1,
    center_subspace,
    symplectic_normalize,
)
from .rotation import (
    DualitySweep,
    RotationIdsRecord,
    TruncationStudy,
    center_cocycle,
    center_rotation,
    duality_ids_sweep,
    truncation_convergence,
)
from .bloch import (
    BlochPair,
    BlochWave,
    CohomologySolution,
    DiophantineWindow,
    bloch_reconstruct,
    cohomological_solve,
    cosine_similarity,
    direct_eigenvector,
    reflection_defect,
)
