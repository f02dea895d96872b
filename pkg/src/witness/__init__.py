"""Non-Markovianity witnesses and their reports"""

from src.witness.report import WitnessRecord, WitnessReport, WitnessSummary, aggregate
from src.witness.witnesses import (
    BodyDescriptor,
    body_descriptor,
    w_blp,
    w_body_containment,
    w_cp_divisibility,
    w_eigen_moduli,
    w_ew_functional,
    w_f_monotone,
    w_hs_norm,
    w_volume,
)

__all__ = [
    'WitnessRecord',
    'WitnessReport',
    'WitnessSummary',
    'aggregate',
    'BodyDescriptor',
    'body_descriptor',
    'w_blp',
    'w_body_containment',
    'w_cp_divisibility',
    'w_eigen_moduli',
    'w_ew_functional',
    'w_f_monotone',
    'w_hs_norm',
    'w_volume',
]
