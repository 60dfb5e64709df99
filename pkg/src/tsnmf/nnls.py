"""Nonnegative least squares, one data column at a time.

Active-set method of Lawson and Hanson: variables enter the passive set in
order of largest dual value (lowest index on ties) and leave it when an
interpolation step drives them to zero. The inner loop is compiled with
numba; the matrix solver calls the same per-column routine, so column ``j``
of ``nnls_solve_matrix(W, X)`` is bit-identical to ``nnls_solve(W, X[:, j])``.
"""
import numpy as np
from numba import njit

from .errors import MaxIterations

KKT_TOL = 1e-8

_OK = 0
_MAX_PIVOTS = 1


@njit(cache=True)
def _householder_lstsq(W, idx, x, R, y, out):
    """Least squares on the columns ``idx`` of ``W`` via Householder QR.

    Numerically dependent columns get weight 0. ``R`` and ``y`` are scratch.
    """
    n = W.shape[0]
    p = idx.size
    for c in range(p):
        for r in range(n):
            R[r, c] = W[r, idx[c]]
    for r in range(n):
        y[r] = x[r]
    for c in range(p):
        norm = 0.0
        for r in range(c, n):
            norm += R[r, c] * R[r, c]
        norm = np.sqrt(norm)
        if norm == 0.0:
            continue
        alpha = -norm if R[c, c] >= 0 else norm
        # Householder vector v = R[c:, c] - alpha e_c, stored in place
        R[c, c] -= alpha
        vv = 0.0
        for r in range(c, n):
            vv += R[r, c] * R[r, c]
        if vv > 0.0:
            for cc in range(c + 1, p):
                f = 0.0
                for r in range(c, n):
                    f += R[r, c] * R[r, cc]
                f *= 2.0 / vv
                for r in range(c, n):
                    R[r, cc] -= f * R[r, c]
            f = 0.0
            for r in range(c, n):
                f += R[r, c] * y[r]
            f *= 2.0 / vv
            for r in range(c, n):
                y[r] -= f * R[r, c]
        R[c, c] = alpha
    scale = 0.0
    for c in range(p):
        scale = max(scale, abs(R[c, c]))
    cutoff = scale * max(n, p) * 2.220446049250313e-16
    for c in range(p - 1, -1, -1):
        out[c] = 0.0
        if abs(R[c, c]) <= cutoff:
            continue
        acc = y[c]
        for cc in range(c + 1, p):
            acc -= R[c, cc] * out[cc]
        out[c] = acc / R[c, c]


@njit(cache=True)
def _dual(W, x, h, dual):
    n, k = W.shape
    for i in range(k):
        acc = 0.0
        for r in range(n):
            res = x[r]
            for c in range(k):
                res -= W[r, c] * h[c]
            acc += W[r, i] * res
        dual[i] = acc


@njit(cache=True)
def _lawson_hanson(W, x, tol, max_pivots, h):
    n, k = W.shape
    xx = 0.0
    for r in range(n):
        xx += x[r] * x[r]
    ww = 0.0
    for r in range(n):
        for c in range(k):
            ww += W[r, c] * W[r, c]
    # absolute dual tolerance, but never below the rounding level of the dual
    noise = 100.0 * (n + k) * 2.220446049250313e-16 * np.sqrt(ww) * (1.0 + np.sqrt(xx))
    dtol = max(tol, noise)
    h[:] = 0.0
    passive = np.zeros(k, dtype=np.bool_)
    blocked = np.zeros(k, dtype=np.bool_)
    s = np.zeros(k)
    sol = np.zeros(k)
    idx = np.zeros(k, dtype=np.int64)
    R = np.empty((n, k))
    y = np.empty(n)
    dual = np.empty(k)
    _dual(W, x, h, dual)
    pivots = 0
    while True:
        j = -1
        best = dtol
        for i in range(k):
            if not passive[i] and not blocked[i] and dual[i] > best:
                best = dual[i]
                j = i
        if j < 0:
            return _OK
        passive[j] = True
        pivots += 1
        while True:
            if pivots > max_pivots:
                return _MAX_PIVOTS
            p = 0
            for i in range(k):
                s[i] = 0.0
                if passive[i]:
                    idx[p] = i
                    p += 1
            if p > 0:
                _householder_lstsq(W, idx[:p], x, R, y, sol)
                for a in range(p):
                    s[idx[a]] = sol[a]
            alpha = np.inf
            for i in range(k):
                if passive[i] and s[i] <= 0.0:
                    alpha = min(alpha, h[i] / (h[i] - s[i]))
            if alpha == np.inf:
                break
            for i in range(k):
                h[i] += alpha * (s[i] - h[i])
                if passive[i] and h[i] <= 0.0:
                    passive[i] = False
                if not passive[i]:
                    h[i] = 0.0
            pivots += 1
        # an entering variable that is dropped again signals numerical
        # degeneracy; keep it out until some other variable moves
        if passive[j]:
            blocked[:] = False
        else:
            blocked[j] = True
        h[:] = s
        _dual(W, x, h, dual)


@njit(cache=True)
def _lawson_hanson_columns(W, X, tol, max_pivots, H):
    x = np.empty(X.shape[0])
    h = np.empty(W.shape[1])
    for j in range(X.shape[1]):
        for r in range(X.shape[0]):
            x[r] = X[r, j]
        status = _lawson_hanson(W, x, tol, max_pivots, h)
        if status != _OK:
            return j
        for i in range(W.shape[1]):
            H[i, j] = h[i]
    return -1


def _prepare(W):
    W = np.ascontiguousarray(W, dtype=float)
    if W.ndim != 2:
        raise ValueError("W must be a 2-d array")
    if not np.all(np.isfinite(W)):
        raise ValueError("W must be finite")
    return W


def nnls_solve(W, x, tol=KKT_TOL, max_pivots=None):
    """Solve ``min_{h >= 0} ||x - W h||^2``.

    Parameters
    ----------
    W : ndarray, shape (n, k)
    x : ndarray, shape (n,)
    tol : float
        Dual feasibility tolerance: stop once every inactive gradient entry
        is at least ``-tol``. Raised to the rounding level of the gradient
        when the data are too large for ``tol`` to be resolvable.
    max_pivots : int, optional
        Cap on active-set changes; defaults to ``3 k n``.

    Returns
    -------
    h : ndarray, shape (k,)
    """
    W = _prepare(W)
    x = np.ascontiguousarray(x, dtype=float)
    n, k = W.shape
    if x.shape != (n,):
        raise ValueError(f"x must have shape ({n},)")
    if max_pivots is None:
        max_pivots = 3 * k * n
    h = np.zeros(k)
    if _lawson_hanson(W, x, tol, max_pivots, h) != _OK:
        raise MaxIterations(f"NNLS exceeded {max_pivots} pivots")
    return h


def nnls_solve_matrix(W, X, tol=KKT_TOL, max_pivots=None):
    """Column-wise NNLS for a whole data matrix.

    Returns ``(H, fit)`` where ``fit = ||X - W H||_F^2``.
    """
    W = _prepare(W)
    X = np.ascontiguousarray(X, dtype=float)
    n, k = W.shape
    if X.ndim != 2 or X.shape[0] != n:
        raise ValueError(f"row mismatch: W has {n} rows, X has shape {X.shape}")
    if max_pivots is None:
        max_pivots = 3 * k * n
    H = np.zeros((k, X.shape[1]))
    bad = _lawson_hanson_columns(W, X, tol, max_pivots, H)
    if bad >= 0:
        raise MaxIterations(f"column {bad}: NNLS exceeded {max_pivots} pivots", column=bad)
    R = X - W @ H
    return H, float(np.sum(R * R))


def kkt_certificate(W, x, h, tol=KKT_TOL):
    """Check primal and dual feasibility plus complementary slackness.

    With ``g = W^T (W h - x)`` this requires ``h >= 0``, ``g >= -tol`` and
    ``|h_j g_j| <= tol (1 + ||x||^2)``.
    """
    W = np.asarray(W, dtype=float)
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    g = W.T @ (W @ h - x)
    return bool(np.all(h >= 0)
                and np.all(g >= -tol)
                and np.all(np.abs(h * g) <= tol * (1.0 + float(x @ x))))
