"""
Comb Ultrametric - Combs Module
This package contains combs, their face-aware metric and the range-max index behind it.
"""

from .comb import (
    Comb,
    CombFunction,
    CombPoint,
    DendrogramNode,
    Face,
    LimitSide,
    build_index,
    comb_dendrogram,
    comb_distance,
    face_limit_distance,
    find_ultrametric_violation,
    verify_ultrametric,
)
from .errors import (
    CombError,
    DomainError,
    EmptySphereError,
    FileFormatError,
    MissingMassesError,
    OrderViolation,
    UltrametricViolation,
    ValuationOfZeroError,
)
from .range_max import RangeMaxIndex

__all__ = [
    'Comb', 'CombFunction', 'CombPoint', 'DendrogramNode', 'Face', 'LimitSide',
    'build_index', 'comb_dendrogram', 'comb_distance', 'face_limit_distance',
    'find_ultrametric_violation', 'verify_ultrametric',
    'RangeMaxIndex',
    'CombError', 'DomainError', 'EmptySphereError', 'FileFormatError', 'MissingMassesError',
    'OrderViolation', 'UltrametricViolation', 'ValuationOfZeroError',
]
