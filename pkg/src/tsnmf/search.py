"""Probabilistic direct search for the template matrix.

The templates ``W`` are parametrized by tangent vectors ``V`` at a fixed base
point (the Karcher mean of the data): ``W = exp_map(base, V)`` column-wise.
Each iteration tries, in order, a refit step, a dilation step and a pair of
poll steps, and accepts the first candidate whose fit improves on the
current one by more than ``forcing_coeff * alpha**2``.

Every iteration draws its whole random budget up front, in this order::

    dilation:  d (k uniforms), Q (k x k Haar)
    polls:     c (k uniforms), d (k uniforms), Q, U (k x k Haar), Z (p x k)

so traces are reproducible no matter which step is accepted.
"""
import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoConvergence, OutsideHalfSphere, RankDeficient
from .nnls import nnls_solve_matrix
from .sphere import clamp_norms, exp_map, geodesic_spread, log_map

RANK_TOL = 1e-10
PINV_RCOND = 1e-12
CONTRACT_MAX_ITER = 5000


@dataclass(frozen=True)
class SearchConfig:
    epsilon: float
    i_max: int = 100
    seed: int = 0
    alpha_max: float = 1.0
    alpha0: float | None = None
    theta: float = 0.5
    gamma: float = 2.0
    forcing_coeff: float = 1e-3
    contraction: float = 0.99

    def __post_init__(self):
        if self.alpha0 is None:
            object.__setattr__(self, "alpha0", self.alpha_max)
        if not 0 < self.theta < 1 < self.gamma:
            raise ValueError("need 0 < theta < 1 < gamma")
        if not 0 < self.epsilon <= np.pi:
            raise ValueError(f"epsilon must lie in (0, pi], got {self.epsilon}")
        if self.forcing_coeff <= 0:
            raise ValueError("forcing_coeff must be positive")
        if not 0 < self.contraction < 1:
            raise ValueError("contraction factor must lie in (0, 1)")
        if not 0 < self.alpha0 <= self.alpha_max:
            raise ValueError("need 0 < alpha0 <= alpha_max")
        if self.i_max < 0:
            raise ValueError("i_max must be nonnegative")

    def forcing(self, alpha):
        return self.forcing_coeff * alpha * alpha


class Reason(str, enum.Enum):
    INSUFFICIENT_DECREASE = "InsufficientDecrease"
    COLUMN_COLLAPSE = "ColumnCollapse"
    OUTSIDE_HALF_SPHERE = "OutsideHalfSphere"
    PSEUDO_INVERSE_FAILURE = "PseudoInverseFailure"
    SPREAD_VIOLATION = "SpreadViolation"
    FRAME_UNAVAILABLE = "FrameUnavailable"


@dataclass(frozen=True)
class Candidate:
    step: str
    V: np.ndarray
    W: np.ndarray
    H: np.ndarray
    fit: float
    decrease: float


@dataclass(frozen=True)
class Rejected:
    step: str
    reason: Reason


@dataclass(frozen=True)
class TraceRecord:
    i: int
    step: str
    alpha: float
    fit: float
    spread: float
    reasons: tuple = ()


@dataclass(frozen=True)
class Draws:
    """Random quantities used by one iteration."""

    dil_d: np.ndarray
    dil_Q: np.ndarray
    poll_c: np.ndarray
    poll_d: np.ndarray
    poll_Q: np.ndarray
    poll_U: np.ndarray
    poll_Z: np.ndarray | None


@dataclass(frozen=True)
class SearchState:
    iteration: int
    alpha: float
    base: np.ndarray
    V: np.ndarray
    W: np.ndarray
    H: np.ndarray
    fit: float
    rng: np.random.Generator = field(repr=False, compare=False)


def random_orthogonal(dim, rng):
    """Haar-distributed ``dim x dim`` orthogonal matrix."""
    G = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s


def random_stiefel(p, k, rng):
    """Random ``p x k`` matrix with orthonormal columns (rows when p < k)."""
    if p >= k:
        G = rng.standard_normal((p, k))
        Q, R = np.linalg.qr(G)
        s = np.sign(np.diag(R))
        s[s == 0] = 1.0
        return Q * s
    return random_stiefel(k, p, rng).T


def _complement(base, V, tol=RANK_TOL):
    M = np.column_stack([base, V])
    U, s, _ = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return U[:, rank:]


def complement_basis(base, V, tol=RANK_TOL):
    """Orthonormal basis of the tangent directions orthogonal to ``V``.

    The returned ``(n, p)`` matrix is orthogonal to ``base`` and to every
    column of ``V``, with ``p = n - 1 - k``. Raises ``RankDeficient`` if the
    columns of ``V`` are linearly dependent.
    """
    V = np.asarray(V, dtype=float)
    if V.shape[1]:
        s = np.linalg.svd(V, compute_uv=False)
        if s[-1] <= tol * max(1.0, s[0]):
            raise RankDeficient("tangent columns are linearly dependent")
    return _complement(base, V, tol)


def contract_to_spread(base, V, epsilon, factor=0.99, max_iter=CONTRACT_MAX_ITER):
    """Shrink ``V`` by ``factor`` until its templates have spread <= epsilon.

    Returns the first feasible ``(V, W)``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0 < factor < 1:
        raise ValueError("factor must lie in (0, 1)")
    V = np.asarray(V, dtype=float)
    W = exp_map(base, V)
    for _ in range(max_iter):
        if geodesic_spread(W) <= epsilon:
            return V, W
        V = factor * V
        W = exp_map(base, V)
    if geodesic_spread(W) <= epsilon:
        return V, W
    raise NoConvergence(f"spread still above {epsilon} after {max_iter} contractions")


def project_tangent(base, V):
    return V - np.outer(base, base @ V)


def draw_iteration(rng, k, p, alpha):
    dil_d = rng.random(k) * alpha
    dil_Q = random_orthogonal(k, rng)
    poll_c = rng.random(k) * alpha
    poll_d = rng.random(k) * alpha
    poll_Q = random_orthogonal(k, rng)
    poll_U = random_orthogonal(k, rng)
    poll_Z = random_stiefel(p, k, rng) if p >= 1 else None
    return Draws(dil_d, dil_Q, poll_c, poll_d, poll_Q, poll_U, poll_Z)


def _evaluate(step, state, X, config, Vp, Wp):
    Hp, fitp = nnls_solve_matrix(Wp, X)
    decrease = state.fit - fitp
    if decrease > config.forcing(state.alpha):
        return Candidate(step, Vp, Wp, Hp, fitp, decrease)
    return Rejected(step, Reason.INSUFFICIENT_DECREASE)


def _gated(step, state, X, config, Vp):
    Vp = clamp_norms(project_tangent(state.base, Vp))
    Wp = exp_map(state.base, Vp)
    if geodesic_spread(Wp) > config.epsilon:
        return Rejected(step, Reason.SPREAD_VIOLATION)
    return _evaluate(step, state, X, config, Vp, Wp)


def search_step_refit(state, X, config):
    """Least-squares refit ``X H^+`` followed by contraction to feasibility."""
    step = "refit"
    try:
        Hp = np.linalg.pinv(state.H, rcond=PINV_RCOND)
    except np.linalg.LinAlgError:
        return Rejected(step, Reason.PSEUDO_INVERSE_FAILURE)
    if not np.all(np.isfinite(Hp)):
        return Rejected(step, Reason.PSEUDO_INVERSE_FAILURE)
    Wp = np.asarray(X, dtype=float) @ Hp
    norms = np.linalg.norm(Wp, axis=0)
    if np.any(norms < 1e-12):
        return Rejected(step, Reason.COLUMN_COLLAPSE)
    Wp = Wp / norms
    try:
        Vp = log_map(state.base, Wp)
    except OutsideHalfSphere:
        return Rejected(step, Reason.OUTSIDE_HALF_SPHERE)
    Vp, Wp = contract_to_spread(state.base, Vp, config.epsilon, config.contraction)
    return _evaluate(step, state, X, config, Vp, Wp)


def _own_draws(state):
    k = state.V.shape[1]
    return draw_iteration(state.rng, k, tangent_frame(state).shape[1], state.alpha)


def search_step_dilation(state, X, config, draws=None):
    """Dilate ``V`` along a random orthogonal frame: ``V Q D Q^T``."""
    if draws is None:
        draws = _own_draws(state)
    Q = draws.dil_Q
    Vp = state.V @ (Q * (1.0 + draws.dil_d)) @ Q.T
    return _gated("dilation", state, X, config, Vp)


def poll_step(state, X, config, sign, draws=None, A=None):
    """Poll ``V Q D Q^T + sign * A Z C U^T``; 3a and 3b share ``draws``."""
    step = "poll+" if sign > 0 else "poll-"
    if A is None:
        A = tangent_frame(state)
    if draws is None:
        draws = _own_draws(state)
    if draws.poll_Z is None or A.shape[1] == 0:
        return Rejected(step, Reason.FRAME_UNAVAILABLE)
    Q, U = draws.poll_Q, draws.poll_U
    dil = state.V @ (Q * (1.0 + draws.poll_d)) @ Q.T
    out = A @ (draws.poll_Z * draws.poll_c) @ U.T
    return _gated(step, state, X, config, dil + sign * out)


def tangent_frame(state):
    try:
        return complement_basis(state.base, state.V)
    except RankDeficient:
        return _complement(state.base, state.V)


def iterate(state, X, config, draws=None):
    """One direct-search iteration; returns ``(new_state, trace_record)``."""
    k = state.V.shape[1]
    A = tangent_frame(state)
    if draws is None:
        draws = draw_iteration(state.rng, k, A.shape[1], state.alpha)
    attempts = (
        lambda: search_step_refit(state, X, config),
        lambda: search_step_dilation(state, X, config, draws),
        lambda: poll_step(state, X, config, +1, draws, A),
        lambda: poll_step(state, X, config, -1, draws, A),
    )
    reasons = []
    for attempt in attempts:
        out = attempt()
        if isinstance(out, Candidate):
            alpha = min(config.alpha_max, config.gamma * state.alpha)
            new = replace(state, iteration=state.iteration + 1, alpha=alpha,
                          V=out.V, W=out.W, H=out.H, fit=out.fit)
            return new, TraceRecord(new.iteration, out.step, alpha, out.fit,
                                    geodesic_spread(out.W), tuple(reasons))
        reasons.append(f"{out.step}:{out.reason.value}")
    new = replace(state, iteration=state.iteration + 1,
                  alpha=config.theta * state.alpha)
    return new, TraceRecord(new.iteration, "reject", new.alpha, new.fit,
                            geodesic_spread(new.W), tuple(reasons))
