"""Independent reference computations used by the tests."""
import numpy as np
from scipy.optimize import nnls as scipy_nnls

GRID_STEP = 1e-3
GRID_MAX = 3.0


def _fits(W, x, Hc):
    R = x[:, None] - W @ Hc
    return np.einsum("ij,ij->j", R, R)


def grid_nnls(W, x, step=GRID_STEP, hi=GRID_MAX):
    """Minimum of ||x - W h||^2 over the grid {0, step, ..., hi}^k, k <= 2.

    For k = 2 the objective is a convex parabola in h2 for each fixed h1,
    so its grid minimum is one of the two grid neighbours of the clipped
    continuous minimizer; scanning h1 and checking both neighbours is an
    exact grid search.
    """
    W = np.asarray(W, float)
    x = np.asarray(x, float)
    k = W.shape[1]
    npts = int(round(hi / step)) + 1
    g = np.arange(npts) * step
    if k == 1:
        f = _fits(W, x, g[None, :])
        j = int(np.argmin(f))
        return np.array([g[j]]), float(f[j])
    if k != 2:
        raise ValueError("grid oracle supports k <= 2")
    w1, w2 = W[:, 0], W[:, 1]
    a = float(w2 @ w2)
    best_f, best_h = np.inf, None
    r = x[:, None] - np.outer(w1, g)                 # residual after h1, per column
    if a > 0:
        cont = np.clip((w2 @ r) / a, 0, hi)
    else:
        cont = np.zeros(npts)
    lo_idx = np.clip(np.floor(cont / step), 0, npts - 1).astype(int)
    for idx in (lo_idx, np.minimum(lo_idx + 1, npts - 1)):
        H = np.vstack([g, g[idx]])
        f = _fits(W, x, H)
        j = int(np.argmin(f))
        if f[j] < best_f:
            best_f, best_h = float(f[j]), H[:, j].copy()
    return best_h, best_f


def grid_resolution_bound(W, x, h, step=GRID_STEP):
    """How far the grid minimum can sit above the true minimum ``h``.

    The nearest grid point differs from ``h`` by at most step/2 per
    coordinate, so by Taylor expansion the gap is at most
    ``2 ||W^T r|| d + ||W||_2^2 d^2`` with ``d = step sqrt(k) / 2``.
    """
    W = np.asarray(W, float)
    r = x - W @ h
    d = step * np.sqrt(W.shape[1]) / 2
    return 2 * np.linalg.norm(W.T @ r) * d + np.linalg.norm(W, 2) ** 2 * d * d


def nnls_instance(rng, n, k):
    """Random small NNLS problem whose minimizer lies inside [0, 3]^k.

    scipy's solver is used only to reject draws whose minimizer leaves the box.
    """
    while True:
        W = rng.normal(size=(n, k))
        h = rng.uniform(0, 2.5, size=k) * (rng.random(k) > 0.25)
        x = W @ h + 0.3 * rng.normal(size=n)
        ref, _ = scipy_nnls(W, x)
        if ref.max() <= 2.9:
            return W, x
