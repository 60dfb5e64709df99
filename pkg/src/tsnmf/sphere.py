"""Geometry of the unit hypersphere.

Points on the sphere are unit vectors of length ``n``; collections of points
are stored column-wise in ``(n, m)`` arrays. Tangent vectors at a base point
``x`` are vectors orthogonal to ``x`` whose length is a geodesic distance in
radians.
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateMean,
    HalfSphereViolation,
    NoConvergence,
    NormTooLarge,
    OutsideHalfSphere,
    ZeroColumn,
)

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * np.pi
ZERO_COLUMN_TOL = 1e-12
HALF_SPHERE_TOL = 1e-10
EXP_ZERO_TOL = 1e-14
KARCHER_TOL = 1e-10
KARCHER_MAX_ITER = 1000


@dataclass(frozen=True)
class NormalizedData:
    """Unit-norm data columns together with their Karcher mean.

    ``kept`` holds the indices of the columns of ``original`` that survived
    (all of them unless zero columns were dropped). ``in_mean_hemisphere``
    records whether every column has a positive inner product with the mean.
    """

    columns: np.ndarray
    karcher_mean: np.ndarray
    original: np.ndarray
    kept: np.ndarray
    in_mean_hemisphere: bool

    @property
    def shape(self):
        return self.columns.shape


def _as_columns(v):
    v = np.asarray(v, dtype=float)
    return (v[:, None], True) if v.ndim == 1 else (v, False)


def _exp_unchecked(base, V):
    norms = np.linalg.norm(V, axis=0)
    safe = np.where(norms < EXP_ZERO_TOL, 1.0, norms)
    out = np.cos(norms) * base[:, None] + np.sin(norms) * (V / safe)
    out[:, norms < EXP_ZERO_TOL] = base[:, None]
    return out


def _log_unchecked(base, W):
    # atan2 form of arccos(d) / sqrt(1 - d^2): accurate for small angles too
    d = base @ W
    P = W - np.outer(base, d)
    s = np.linalg.norm(P, axis=0)
    theta = np.arctan2(s, d)
    scale = np.divide(theta, s, out=np.zeros_like(s), where=s > 0)
    return P * scale


def exp_map(base, v):
    """Exponential map at ``base``.

    Maps the tangent vector ``v`` (or each column of a matrix of tangent
    vectors) to ``cos|v| base + sin|v| v/|v|``. Requires ``|v| < pi/2``.
    """
    base = np.asarray(base, dtype=float)
    V, single = _as_columns(v)
    norms = np.linalg.norm(V, axis=0)
    if np.any(norms >= HALF_PI):
        raise NormTooLarge(f"tangent norm {norms.max():.6g} >= pi/2")
    out = _exp_unchecked(base, V)
    return out[:, 0] if single else out


def log_map(base, w):
    """Inverse of :func:`exp_map` on the open hemisphere centred at ``base``.

    Raises
    ------
    OutsideHalfSphere
        If some ``base . w <= 1e-10``.
    """
    base = np.asarray(base, dtype=float)
    W, single = _as_columns(w)
    d = base @ W
    if np.any(d <= HALF_SPHERE_TOL):
        raise OutsideHalfSphere(f"base . w = {d.min():.6g} is not positive")
    out = _log_unchecked(base, W)
    return out[:, 0] if single else out


def log_map_extended(base, w):
    """Logarithm map valid for any ``w`` other than ``-base``.

    Unlike :func:`log_map` this does not require ``w`` to lie in the
    hemisphere at ``base``; the returned norm may reach or exceed pi/2.
    """
    base = np.asarray(base, dtype=float)
    W, single = _as_columns(w)
    out = _log_unchecked(base, W)
    return out[:, 0] if single else out


def clamp_norms(V, limit=0.999 * HALF_PI):
    """Rescale columns of ``V`` whose norm reaches pi/2 down to ``limit``."""
    V = np.array(V, dtype=float)
    norms = np.linalg.norm(V, axis=0)
    over = norms >= HALF_PI
    if np.any(over):
        V[:, over] *= limit / norms[over]
    return V


def karcher_mean(points, tol=KARCHER_TOL, max_iter=KARCHER_MAX_ITER):
    """Karcher (Frechet) mean of unit column vectors.

    Runs the fixed-point iteration ``x <- exp_x(mean_j log_x(p_j))`` from the
    normalized Euclidean mean until the tangent mean is shorter than ``tol``.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    m = P.shape[1]
    x = P.mean(axis=1)
    nx = np.linalg.norm(x)
    if nx < ZERO_COLUMN_TOL:
        raise DegenerateMean("Euclidean mean of the points is zero")
    x = x / nx
    for it in range(max_iter):
        t = _log_unchecked(x, P).sum(axis=1) / m
        nt = np.linalg.norm(t)
        if nt <= tol:
            logger.debug("karcher mean converged after %d iterations", it)
            return x
        x = _exp_unchecked(x, t[:, None])[:, 0]
        x /= np.linalg.norm(x)
    raise NoConvergence(f"Karcher mean did not converge in {max_iter} iterations")


def in_open_half_sphere(points, margin=HALF_SPHERE_TOL):
    """True when some unit vector ``u`` has ``u . p > margin`` for all columns.

    Solved as a small linear program over the box ``|u_i| <= 1``.
    """
    P = np.asarray(points, dtype=float)
    n, m = P.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([-P.T, np.ones((m, 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(m),
                  bounds=[(-1, 1)] * n + [(None, 1)], method="highs")
    if res.status != 0:
        return False
    u = res.x[:n]
    nu = np.linalg.norm(u)
    return bool(nu > 0 and (u @ P).min() / nu > margin)


def normalize_columns(X, drop_zero=False, strict=False):
    """Scale every column of ``X`` to unit length and find the Karcher mean.

    Parameters
    ----------
    X : ndarray, shape (n, m)
        Data matrix, one data point per column.
    drop_zero : bool
        Drop columns with norm below 1e-12 instead of raising ``ZeroColumn``.
    strict : bool
        Require every column to lie in the open hemisphere centred at the
        Karcher mean. When False (the default) it is enough that the columns
        lie in *some* open half-sphere; a warning is issued if the mean's own
        hemisphere does not contain them all.

    Returns
    -------
    NormalizedData
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2-d data matrix")
    norms = np.linalg.norm(X, axis=0)
    small = np.flatnonzero(norms < ZERO_COLUMN_TOL)
    if small.size and not drop_zero:
        raise ZeroColumn(int(small[0]))
    kept = np.flatnonzero(norms >= ZERO_COLUMN_TOL)
    if kept.size == 0:
        raise ZeroColumn(0)
    cols = X[:, kept] / norms[kept]
    mean = karcher_mean(cols)
    dots = mean @ cols
    inside = bool(dots.min() > HALF_SPHERE_TOL)
    if not inside:
        if strict:
            j = int(np.argmin(dots))
            raise HalfSphereViolation(
                f"column {kept[j]} has mean . x = {dots[j]:.6g}")
        if not in_open_half_sphere(cols):
            raise HalfSphereViolation("data do not lie in any open half-sphere")
        warnings.warn(
            "some data columns lie outside the hemisphere centred at the "
            "Karcher mean", RuntimeWarning, stacklevel=2)
    return NormalizedData(cols, mean, X, kept, inside)


def geodesic_distance(u, w):
    return float(np.arccos(np.clip(np.dot(u, w), -1.0, 1.0)))


def pairwise_angles(W):
    W = np.asarray(W, dtype=float)
    return np.arccos(np.clip(W.T @ W, -1.0, 1.0))


def geodesic_spread(W):
    """Largest pairwise angle between the columns of ``W`` (0 for one column)."""
    W = np.asarray(W, dtype=float)
    k = W.shape[1]
    if k < 2:
        return 0.0
    iu = np.triu_indices(k, 1)
    return float(pairwise_angles(W)[iu].max())


def parallelogram_area(W):
    """Hyper-area of the parallelogram spanned by the columns of ``W``."""
    return float(np.prod(np.linalg.svd(np.asarray(W, dtype=float), compute_uv=False)))
