"""Weighted soft-margin kernel SVM.

The dual solved here is

    max  sum(delta) - 1/2 sum_ij delta_i delta_j y_i y_j K(x_i, x_j)
    s.t. sum(y * delta) = 0,  0 <= delta_i <= c * v_i

i.e. a standard C-SVM whose box bound differs per sample. The solver is a
two-variable working-set method: each step picks the maximal violating pair
and does an exact clipped line search along the feasible direction.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateProblem, DimensionMismatch, InvalidModel, NoConvergence

# weights below this never enter the working set
ZERO_WEIGHT = 1e-12
# full kernel matrix is cached up to this many active samples
CACHE_LIMIT = 4000
MAX_ITER = 100_000


@dataclass(frozen=True)
class KernelParams:
    gamma: float
    kind: str = "gaussian"

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ValueError(f"unsupported kernel {self.kind!r}")
        if not self.gamma > 0:
            raise ValueError("kernel gamma must be positive")


def kernel_matrix(X, Z, params):
    """Gaussian kernel between the rows of ``X`` and ``Z``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if X.shape[1] != Z.shape[1]:
        raise DimensionMismatch(f"feature dimensions differ: {X.shape[1]} vs {Z.shape[1]}")
    return np.exp(-params.gamma * cdist(X, Z, "sqeuclidean"))


def rbf_kernel(x, z, params):
    """``exp(-gamma * ||x - z||^2)`` for two single feature vectors."""
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if x.shape != z.shape:
        raise DimensionMismatch(f"feature dimensions differ: {x.size} vs {z.size}")
    d = x - z
    return float(np.exp(-params.gamma * np.dot(d, d)))


class _KernelColumns:
    """Kernel columns over the active samples, cached in full when small."""

    def __init__(self, X, params, cache_limit):
        self.X = X
        self.params = params
        self.full = kernel_matrix(X, X, params) if X.shape[0] <= cache_limit else None

    def column(self, i):
        if self.full is not None:
            return self.full[:, i]
        return kernel_matrix(self.X, self.X[i : i + 1], self.params)[:, 0]


@dataclass
class DualSolution:
    """Result of :func:`solve_weighted_dual`.

    ``delta`` covers every input sample, with exact zeros for samples whose
    weight was zero. ``violation`` is the final maximal-pair gap.
    """

    delta: np.ndarray
    bias: float
    objective: float
    iterations: int
    converged: bool = True
    violation: float = 0.0
    objective_trace: list = field(default_factory=list, repr=False)


def _check_problem(X, y, v, c):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    n = X.shape[0]
    if y.shape[0] != n or v.shape[0] != n:
        raise DimensionMismatch("X, y and v must have the same number of samples")
    if n < 2:
        raise DegenerateProblem("need at least two samples")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.any(v < 0) or np.any(v > 1):
        raise ValueError("weights must lie in [0, 1]")
    if not c > 0:
        raise ValueError("c must be positive")
    return X, y, v


def _pair_bounds(F, y, alpha, C):
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    return up, low


def _bias(F, y, alpha, C, up, low):
    free = (alpha > 0) & (alpha < C - 1e-9)
    if np.any(free):
        return float(np.mean(F[free]))
    hi = F[up].max() if np.any(up) else None
    lo = F[low].min() if np.any(low) else None
    if hi is None:
        return float(lo)
    if lo is None:
        return float(hi)
    return 0.5 * float(hi + lo)


def _objective(X, y, alpha, params):
    sv = np.flatnonzero(alpha > 0)
    if sv.size == 0:
        return 0.0
    a = alpha[sv] * y[sv]
    K = kernel_matrix(X[sv], X[sv], params)
    return float(alpha[sv].sum() - 0.5 * a @ K @ a)


def solve_weighted_dual(
    X,
    y,
    v,
    c,
    params,
    tol=1e-3,
    max_iter=MAX_ITER,
    cache_limit=CACHE_LIMIT,
    record_objective=False,
):
    """Solve the per-sample-bounded SVM dual.

    Parameters
    ----------
    X : array_like, shape (n, d)
    y : array_like, shape (n,)
        Labels in ``{-1, +1}``.
    v : array_like, shape (n,)
        Sample weights in ``[0, 1]``; the box bound of sample ``i`` is
        ``c * v[i]``.
    c : float
        Positive regularisation constant.
    params : KernelParams
    tol : float
        Stop once the maximal violating pair gap is at most ``tol``.
    max_iter : int
        Cap on working-set selections. Hitting it issues a
        :class:`NoConvergence` warning and returns the current iterate with
        ``converged=False``.
    cache_limit : int
        Largest active-set size for which the full kernel matrix is stored.
    record_objective : bool
        Keep the dual objective after every step in ``objective_trace``.

    Returns
    -------
    DualSolution
    """
    X, y, v = _check_problem(X, y, v, c)
    n = X.shape[0]
    idx = np.flatnonzero(v >= ZERO_WEIGHT)
    ya = y[idx]
    Ca = c * v[idx]
    if not (Ca[ya > 0].sum() > 0 and Ca[ya < 0].sum() > 0):
        raise DegenerateProblem("each class needs a positive total weight")

    Xa = X[idx]
    cols = _KernelColumns(Xa, params, cache_limit)
    alpha = np.zeros(idx.size)
    # F = -y * gradient of the minimisation form; optimal iff max_up F <= min_low F
    F = ya.copy()
    objective = 0.0
    trace = [0.0] if record_objective else []
    converged = False
    gap = np.inf
    it = 0
    while True:
        up, low = _pair_bounds(F, ya, alpha, Ca)
        i = int(np.argmax(np.where(up, F, -np.inf)))
        j = int(np.argmin(np.where(low, F, np.inf)))
        gap = float(F[i] - F[j]) if up[i] and low[j] else 0.0
        if gap <= tol:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1
        Ki = cols.column(i)
        Kj = cols.column(j)
        eta = max(Ki[i] + Kj[j] - 2.0 * Ki[j], 1e-12)
        room_i = Ca[i] - alpha[i] if ya[i] > 0 else alpha[i]
        room_j = alpha[j] if ya[j] > 0 else Ca[j] - alpha[j]
        t = min(gap / eta, room_i, room_j)

        alpha[i] += ya[i] * t
        alpha[j] -= ya[j] * t
        if t == room_i:
            alpha[i] = Ca[i] if ya[i] > 0 else 0.0
        if t == room_j:
            alpha[j] = 0.0 if ya[j] > 0 else Ca[j]
        F -= t * (Ki - Kj)
        if record_objective:
            objective += t * gap - 0.5 * t * t * eta
            trace.append(objective)

    if not converged:
        warnings.warn(
            NoConvergence(f"stopped after {it} selections with violation {gap:.3e}"),
            stacklevel=2,
        )
    up, low = _pair_bounds(F, ya, alpha, Ca)
    b = _bias(F, ya, alpha, Ca, up, low)
    delta = np.zeros(n)
    delta[idx] = alpha
    return DualSolution(
        delta=delta,
        bias=b,
        objective=_objective(Xa, ya, alpha, params),
        iterations=it,
        converged=converged,
        violation=max(gap, 0.0),
        objective_trace=trace,
    )


@dataclass(frozen=True)
class SvmModel:
    """Binary kernel expansion ``f(x) = sum coef_k K(sv_k, x) + bias``."""

    support_vectors: np.ndarray
    coef: np.ndarray
    bias: float
    params: KernelParams

    def __post_init__(self):
        if self.coef.size == 0:
            raise InvalidModel("model has no support vectors")
        if self.support_vectors.shape[0] != self.coef.size:
            raise InvalidModel("support vector and coefficient counts differ")

    @classmethod
    def from_solution(cls, solution, X, y, c, params):
        """Keep samples with ``delta > 1e-8 * c`` as support vectors."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        sv = np.flatnonzero(solution.delta > 1e-8 * c)
        return cls(X[sv].copy(), solution.delta[sv] * y[sv], float(solution.bias), params)

    @property
    def n_support(self):
        return self.coef.size

    @property
    def n_features(self):
        return self.support_vectors.shape[1]

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        return kernel_matrix(X, self.support_vectors, self.params) @ self.coef + self.bias


def fit_svm(X, y, v, c, params, **solver_kw):
    """Solve the weighted dual and wrap the result as an :class:`SvmModel`."""
    sol = solve_weighted_dual(X, y, v, c, params, **solver_kw)
    return SvmModel.from_solution(sol, X, y, c, params), sol


def decision(model, x):
    """Decision value of a single feature vector."""
    x = np.asarray(x, dtype=float).ravel()
    return float(model.decision_function(x[None, :])[0])


def hinge_losses(model, X, y):
    """``max(0, 1 - y_i f(x_i))`` for every sample."""
    y = np.asarray(y, dtype=float).ravel()
    f = model.decision_function(X)
    if f.shape != y.shape:
        raise DimensionMismatch("X and y have different sample counts")
    return np.maximum(0.0, 1.0 - y * f)


def kkt_violation(solution, X, y, v, c, params, bound_tol=1e-9):
    """Largest per-sample KKT residual of a dual solution.

    Decision values are rebuilt from ``delta`` and ``bias``. A sample at its
    lower bound needs ``y f >= 1``, one at its upper bound ``y f <= 1`` and a
    free one ``y f == 1``; samples with a zero box contribute nothing.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    delta = np.asarray(solution.delta, dtype=float).ravel()
    if not (X.shape[0] == y.size == v.size == delta.size):
        raise DimensionMismatch("solution and problem sizes differ")
    C = c * v
    sv = np.flatnonzero(delta > 0)
    f = np.full(y.size, float(solution.bias))
    if sv.size:
        f += kernel_matrix(X, X[sv], params) @ (delta[sv] * y[sv])
    margin = y * f - 1.0
    at_low = delta <= bound_tol
    at_up = delta >= C - bound_tol
    res = np.abs(margin)
    res = np.where(at_low, np.maximum(0.0, -margin), res)
    res = np.where(at_up, np.maximum(0.0, margin), res)
    res = np.where((at_low & at_up) | (C < ZERO_WEIGHT), 0.0, res)
    return float(res.max()) if res.size else 0.0
