"""Operator bases and superoperator calculus"""

from src.linalg.bases import (
    MaxEntangledProjector,
    MubSet,
    OperatorBasis,
    WeylFamily,
    gell_mann_basis,
    max_entangled,
    mub_bases,
    weyl_operators,
)
from src.linalg.superop import (
    CcpResult,
    DampingBasis,
    FMatrix,
    MapFlags,
    SpectralData,
    SuperOperator,
    block_decompose,
    ccp_test,
    choi,
    classify,
    commute_check,
    damping_basis,
    matrix_rep,
    spectrum,
    volume_factor,
    witness_f,
)

__all__ = [
    'MaxEntangledProjector',
    'MubSet',
    'OperatorBasis',
    'WeylFamily',
    'gell_mann_basis',
    'max_entangled',
    'mub_bases',
    'weyl_operators',
    'CcpResult',
    'DampingBasis',
    'FMatrix',
    'MapFlags',
    'SpectralData',
    'SuperOperator',
    'block_decompose',
    'ccp_test',
    'choi',
    'classify',
    'commute_check',
    'damping_basis',
    'matrix_rep',
    'spectrum',
    'volume_factor',
    'witness_f',
]
