"""Tight semi-nonnegative matrix factorization driver.

``factorize`` approximates ``X ~ W H`` with ``H >= 0``, unit columns in ``W``
and the largest pairwise angle between templates bounded by ``epsilon``.
``pareto_sweep`` repeats the solve over several bounds to trace the
fit/tightness trade-off.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientData, TsnmfError
from .nnls import nnls_solve_matrix
from .search import (
    SearchConfig,
    SearchState,
    TraceRecord,
    contract_to_spread,
    iterate,
)
from .sphere import (
    clamp_norms,
    geodesic_spread,
    log_map_extended,
    normalize_columns,
    parallelogram_area,
)

logger = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-12


@dataclass(frozen=True)
class FactorizationResult:
    W: np.ndarray
    H: np.ndarray
    fit: float
    fit0: float
    spread: float
    area: float
    trace: tuple
    config: SearchConfig
    base: np.ndarray
    kept: np.ndarray

    @property
    def k(self):
        return self.W.shape[1]


@dataclass(frozen=True)
class ParetoPoint:
    epsilon: float
    fit: float
    result: FactorizationResult | None
    error: str | None = None


def _count_distinct(P, tol=DUPLICATE_TOL):
    reps = []
    for j in range(P.shape[1]):
        p = P[:, j]
        if not any(np.max(np.abs(p - r)) <= tol for r in reps):
            reps.append(p)
    return len(reps)


def farthest_point_init(data, k):
    """Pick ``k`` data directions greedily far from each other.

    Starting from the Karcher mean, each step takes the data column whose
    smallest angle to the already chosen points (mean included) is largest.
    Ties go to the lowest column index. The mean itself is not returned.
    """
    P = data.columns
    n, m = P.shape
    if not 1 <= k <= min(n - 1, m):
        raise InsufficientData(f"need 1 <= k <= min(n-1, m) = {min(n - 1, m)}, got {k}")
    if _count_distinct(P) < k:
        raise InsufficientData(f"fewer than {k} distinct data directions")
    nearest = np.arccos(np.clip(data.karcher_mean @ P, -1.0, 1.0))
    picks = []
    for _ in range(k):
        j = int(np.argmax(nearest))
        picks.append(j)
        nearest = np.minimum(nearest, np.arccos(np.clip(P[:, j] @ P, -1.0, 1.0)))
    return P[:, picks].copy()


def initial_state(X, data, k, config, init=farthest_point_init):
    base = data.karcher_mean
    W0 = init(data, k)
    # farthest points may sit beyond the mean's hemisphere; pull them inside
    V0 = clamp_norms(log_map_extended(base, W0))
    V0, W0 = contract_to_spread(base, V0, config.epsilon, config.contraction)
    H0, fit0 = nnls_solve_matrix(W0, X)
    rng = np.random.default_rng(config.seed)
    return SearchState(0, config.alpha0, base, V0, W0, H0, fit0, rng)


def factorize(X, config, k, init=farthest_point_init, drop_zero=False, strict=False):
    """Tight semi-NMF of ``X`` with ``k`` templates.

    Parameters
    ----------
    X : ndarray, shape (n, m)
        Data, one point per column.
    config : SearchConfig
        Spread bound, iteration count, seed and search constants.
    k : int
        Number of templates.
    init : callable, optional
        ``init(normalized_data, k) -> W0``; farthest-point picking by default.
    drop_zero, strict : bool
        Forwarded to :func:`normalize_columns`.
    """
    X = np.asarray(X, dtype=float)
    data = normalize_columns(X, drop_zero=drop_zero, strict=strict)
    Xk = X[:, data.kept]
    state = initial_state(Xk, data, k, config, init)
    trace = [TraceRecord(0, "init", state.alpha, state.fit, geodesic_spread(state.W))]
    fit0 = state.fit
    for _ in range(config.i_max):
        state, record = iterate(state, Xk, config)
        trace.append(record)
    logger.info("eps=%.4g k=%d: fit %.6g -> %.6g after %d iterations",
                config.epsilon, k, fit0, state.fit, config.i_max)
    return FactorizationResult(
        W=state.W, H=state.H, fit=state.fit, fit0=fit0,
        spread=geodesic_spread(state.W), area=parallelogram_area(state.W),
        trace=tuple(trace), config=config, base=data.karcher_mean, kept=data.kept)


def child_seed(seed, index):
    """Stable per-member seed: first word of ``SeedSequence([seed, index])``."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def pareto_sweep(X, k, epsilons, config, **kwargs):
    """One :func:`factorize` per spread bound, sorted by bound.

    Member ``i`` (in the order given) runs with ``child_seed(config.seed, i)``.
    A failing member is reported in its ``ParetoPoint.error`` field.
    """
    if len(epsilons) == 0:
        raise ValueError("need at least one epsilon")
    points = []
    for i, eps in enumerate(epsilons):
        try:
            cfg = replace(config, epsilon=float(eps), seed=child_seed(config.seed, i))
            res = factorize(X, cfg, k, **kwargs)
            points.append(ParetoPoint(float(eps), res.fit, res))
        except (TsnmfError, ValueError) as exc:
            logger.warning("sweep member eps=%s failed: %s", eps, exc)
            points.append(ParetoPoint(float(eps), float("nan"), None, f"{type(exc).__name__}: {exc}"))
    return sorted(points, key=lambda p: p.epsilon)
