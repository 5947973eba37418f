"""
Comb Ultrametric - Spaces Module
This package contains the spaces represented by combs: finite ultrametric matrices,
random coalescent combs, tree contours and their spheres, and the p-adic numbers.
"""

from .coalescent import (
    Intensity,
    LifetimeLaw,
    Partition,
    PointProcessSample,
    block_holding_times,
    brownian_intensity,
    brownian_inverse_tail,
    brownian_tail,
    exponential_lifetime,
    partition_process,
    sample_cpp,
    sample_kingman_comb,
    sample_splitting_depths,
    spawn_seeds,
)
from .contour import (
    LEVEL_TOLERANCE,
    Contour,
    Excursion,
    ExcursionList,
    ExcursionPath,
    excursions_below,
    four_points_check,
    sample_excursion_below,
    sample_reflected_cpp_contour,
    sphere_comb,
    sphere_image,
    tree_distance,
    visit_components,
)
from .padic import (
    FpComb,
    PRational,
    PSequence,
    Tail,
    TruncatedImage,
    chi,
    chi_inverse,
    chi_truncated,
    d_p,
    d_u,
    face_gap,
    fp_distance,
    fp_value,
    padic_distance,
    padic_valuation,
    phi,
    phi_faces,
    psi_inverse_rho,
    rho_psi,
    subtract,
    v_p,
    v_u,
)
from .staircase import OpenInterval, Staircase, staircase
from .ultrametric import (
    BallPartition,
    UltrametricMatrix,
    check_comb_order,
    comb_embedding,
    comb_from_measured,
    comb_from_ordered,
    fragmentation_cascade,
    matrix_from_comb,
    order_ultrametric,
    partition_at,
    visibility_measure,
)

__all__ = [
    'UltrametricMatrix', 'BallPartition', 'order_ultrametric', 'check_comb_order',
    'comb_from_ordered', 'comb_embedding', 'matrix_from_comb', 'partition_at',
    'fragmentation_cascade', 'comb_from_measured', 'visibility_measure',
    'Partition', 'PointProcessSample', 'Intensity', 'LifetimeLaw', 'partition_process',
    'block_holding_times', 'sample_kingman_comb', 'sample_cpp', 'brownian_tail',
    'brownian_inverse_tail', 'brownian_intensity', 'exponential_lifetime',
    'sample_splitting_depths', 'spawn_seeds',
    'Contour', 'Excursion', 'ExcursionList', 'ExcursionPath', 'LEVEL_TOLERANCE',
    'tree_distance', 'four_points_check', 'visit_components', 'excursions_below',
    'sphere_comb', 'sphere_image', 'sample_excursion_below', 'sample_reflected_cpp_contour',
    'OpenInterval', 'Staircase', 'staircase',
    'PSequence', 'PRational', 'Tail', 'TruncatedImage', 'FpComb', 'v_u', 'd_u', 'subtract',
    'phi', 'phi_faces', 'fp_value', 'v_p', 'd_p', 'padic_valuation', 'padic_distance',
    'rho_psi', 'psi_inverse_rho', 'chi', 'chi_inverse', 'chi_truncated', 'face_gap',
    'fp_distance',
]
