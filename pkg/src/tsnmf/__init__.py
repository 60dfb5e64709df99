"""Tight semi-nonnegative matrix factorization."""
from .core import FactorizationResult, ParetoPoint, factorize, farthest_point_init, pareto_sweep
from .nnls import nnls_solve, nnls_solve_matrix
from .search import SearchConfig, contract_to_spread
from .sphere import (
    NormalizedData,
    exp_map,
    geodesic_distance,
    geodesic_spread,
    karcher_mean,
    log_map,
    normalize_columns,
    parallelogram_area,
)

__version__ = "0.1.0"
