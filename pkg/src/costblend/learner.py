"""Base learners: weighted binary large-margin classifier and one-sided regression.

Both trainers share one dual solver. The problem

    min_a  0.5 a' (S K S) a + p' a    s.t.  s' a = 0,  0 <= a <= box

with S = diag(s) covers the soft-margin classifier (p = -1, s = labels,
box = weight / lambda) and the one-sided regressor (p_n = z_n * target_n,
s = directions z, box = 1 / lambda). The solver runs sequential two-variable
updates on the maximal violating pair until the KKT violation drops below the
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegenerateProblemError, EmptyDatasetError, InvalidArgumentError
from .kernels import PERCEPTRON_KERNEL, Kernel

WEIGHT_EPS = 1e-12
DEFAULT_TOL = 1e-3


@njit(cache=True, nogil=True)
def _smo(K, s, p, box, tol, max_iter):  # pragma: no cover - exercised via wrappers
    n = s.shape[0]
    alpha = np.zeros(n)
    grad = p.copy()
    huge = 1.0e300
    m_val = -huge
    m_big = huge
    iters = 0
    while True:
        # maximal violating pair: i realizes the largest lower bound on the
        # equality multiplier, j the smallest upper bound
        i = -1
        j = -1
        m_val = -huge
        m_big = huge
        for t in range(n):
            v = -s[t] * grad[t]
            if (s[t] > 0 and alpha[t] < box[t]) or (s[t] < 0 and alpha[t] > 0):
                if v > m_val:
                    m_val = v
                    i = t
            if (s[t] < 0 and alpha[t] < box[t]) or (s[t] > 0 and alpha[t] > 0):
                if v < m_big:
                    m_big = v
                    j = t
        if m_val - m_big <= tol or iters >= max_iter:
            break
        iters += 1
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad < 1e-12:
            quad = 1e-12
        step = (m_val - m_big) / quad
        # largest step keeping alpha_i' = alpha_i + s_i*step,
        # alpha_j' = alpha_j - s_j*step inside the box
        if s[i] > 0:
            limit = box[i] - alpha[i]
        else:
            limit = alpha[i]
        if step > limit:
            step = limit
        if s[j] > 0:
            limit = alpha[j]
        else:
            limit = box[j] - alpha[j]
        if step > limit:
            step = limit
        d_i = s[i] * step
        d_j = -s[j] * step
        alpha[i] += d_i
        alpha[j] += d_j
        for t in range(n):
            grad[t] += s[t] * (s[i] * d_i * K[t, i] + s[j] * d_j * K[t, j])
    residual = m_val - m_big
    if residual < 0.0:
        residual = 0.0
    return alpha, grad, residual, iters, m_val, m_big


@dataclass(frozen=True)
class WeightedBinaryProblem:
    """Binary classification with per-example nonnegative weights."""

    features: np.ndarray
    signs: np.ndarray
    weights: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "signs", np.asarray(self.signs, dtype=np.float64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        n = self.features.shape[0]
        if self.signs.shape != (n,) or self.weights.shape != (n,):
            raise InvalidArgumentError("signs and weights must match the example count")
        if not np.all(np.abs(self.signs) == 1.0):
            raise InvalidArgumentError("signs must be +1 or -1")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise InvalidArgumentError("weights must be finite and nonnegative")
        if not self.lam > 0:
            raise InvalidArgumentError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class OneSidedProblem:
    """Regression penalized on one side per example.

    direction +1 penalizes r(x) above the target, -1 penalizes r(x) below.
    """

    features: np.ndarray
    targets: np.ndarray
    directions: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "targets", np.asarray(self.targets, dtype=np.float64))
        object.__setattr__(self, "directions", np.asarray(self.directions, dtype=np.float64))
        n = self.features.shape[0]
        if n == 0:
            raise EmptyDatasetError("one-sided problem needs at least one example")
        if self.targets.shape != (n,) or self.directions.shape != (n,):
            raise InvalidArgumentError("targets and directions must match the example count")
        if not np.all(np.abs(self.directions) == 1.0):
            raise InvalidArgumentError("directions must be +1 or -1")
        if np.any(self.targets < 0) or not np.all(np.isfinite(self.targets)):
            raise InvalidArgumentError("targets must be finite and nonnegative")
        if not self.lam > 0:
            raise InvalidArgumentError(f"lambda must be positive, got {self.lam}")


class _DualExpansion:
    """Kernel expansion sum_n coef_n k(x_n, .) + bias over retained examples."""

    __slots__ = ("coefficients", "support", "bias", "kernel", "kkt_residual", "iterations")

    def __init__(self, coefficients, support, bias, kernel, kkt_residual=0.0, iterations=0):
        self.coefficients = np.asarray(coefficients, dtype=np.float64)
        self.support = np.asarray(support, dtype=np.float64)
        self.bias = float(bias)
        self.kernel = kernel
        self.kkt_residual = float(kkt_residual)
        self.iterations = int(iterations)

    def values(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self.coefficients.size == 0:
            return np.full(x.shape[0], self.bias)
        return self.kernel.matrix(x, self.support) @ self.coefficients + self.bias

    def value(self, x) -> float:
        return float(self.values(np.atleast_2d(x))[0])


class BinaryModel(_DualExpansion):
    """Trained binary classifier; sign of the decision value is the vote."""


class Regressor(_DualExpansion):
    """Trained one-sided regressor; values estimate the targets."""


def decision_value(model: _DualExpansion, x) -> float:
    """Evaluate the dual expansion of a trained model at one point."""
    return model.value(x)


def _solve(gram, s, p, box, tol, max_iter):
    alpha, grad, residual, iters, m_low, m_high = _smo(
        np.ascontiguousarray(gram, dtype=np.float64),
        np.ascontiguousarray(s, dtype=np.float64),
        np.ascontiguousarray(p, dtype=np.float64),
        np.ascontiguousarray(box, dtype=np.float64),
        float(tol),
        int(max_iter),
    )
    interior = (alpha > 1e-8 * box) & (alpha < box * (1 - 1e-8))
    if np.any(interior):
        beta = float(np.mean(-s[interior] * grad[interior]))
    elif m_low <= -1e300 and m_high >= 1e300:
        beta = 0.0
    elif m_low <= -1e300:
        beta = float(m_high)
    elif m_high >= 1e300:
        beta = float(m_low)
    else:
        beta = float((m_low + m_high) / 2.0)
    return alpha, beta, residual, iters


def solve_weighted_binary(
    problem: WeightedBinaryProblem,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    gram: np.ndarray | None = None,
):
    """Solve the soft-margin dual; returns (kept indices, alpha, beta, residual, iters).

    Examples below the weight floor are dropped before solving; ``alpha`` is
    aligned with the kept indices. ``gram`` may carry a precomputed kernel
    matrix over the full problem.
    """
    keep = np.nonzero(problem.weights > WEIGHT_EPS)[0]
    signs = problem.signs[keep]
    if not (np.any(signs > 0) and np.any(signs < 0)):
        raise DegenerateProblemError("need positive-weight examples of both signs")
    x = problem.features[keep]
    box = problem.weights[keep] / problem.lam
    if gram is None:
        gram = kernel.gram(x)
    elif keep.size != problem.weights.size:
        gram = gram[np.ix_(keep, keep)]
    if max_iter is None:
        max_iter = max(20_000, 200 * x.shape[0])
    p = -np.ones(x.shape[0])
    alpha, beta, residual, iters = _solve(gram, signs, p, box, tol, max_iter)
    return keep, alpha, beta, residual, iters


def train_weighted_binary(
    problem: WeightedBinaryProblem,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    gram: np.ndarray | None = None,
) -> BinaryModel:
    """Solve the example-weighted soft-margin dual and wrap the expansion.

    The per-example box upper bound is weight / lambda.
    """
    keep, alpha, beta, residual, iters = solve_weighted_binary(
        problem, kernel, tol, max_iter, gram
    )
    signs = problem.signs[keep]
    x = problem.features[keep]
    retained = alpha > WEIGHT_EPS
    return BinaryModel(
        alpha[retained] * signs[retained], x[retained], beta, kernel, residual, iters
    )


def train_one_sided(
    problem: OneSidedProblem,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    gram: np.ndarray | None = None,
) -> Regressor:
    """Minimize the regularized one-sided hinge sum max(0, z*(r(x)-target))."""
    x = problem.features
    z = problem.directions
    if gram is None:
        gram = kernel.gram(x)
    if max_iter is None:
        max_iter = max(20_000, 200 * x.shape[0])
    box = np.full(x.shape[0], 1.0 / problem.lam)
    p = z * problem.targets
    alpha, beta, residual, iters = _solve(gram, z, p, box, tol, max_iter)
    # r(x) = -(sum_n alpha_n z_n k(x_n, x) + beta)
    retained = alpha > WEIGHT_EPS
    return Regressor(
        -alpha[retained] * z[retained], x[retained], -beta, kernel, residual, iters
    )


def dual_objective(problem: WeightedBinaryProblem, alpha: np.ndarray, kernel: Kernel) -> float:
    """Dual objective 0.5 a'(SKS)a - sum(a) for a multiplier vector aligned
    with the problem's examples."""
    gram = kernel.gram(problem.features)
    q = gram * np.outer(problem.signs, problem.signs)
    return float(0.5 * alpha @ q @ alpha - alpha.sum())


def one_sided_loss(values, targets, directions) -> float:
    """Total one-sided hinge loss of predicted values."""
    values = np.asarray(values, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    directions = np.asarray(directions, dtype=np.float64)
    return float(np.sum(np.maximum(0.0, directions * (values - targets))))


def one_sided_loss_grad(values, targets, directions) -> np.ndarray:
    """Subgradient of `one_sided_loss` with respect to the predicted values."""
    values = np.asarray(values, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    directions = np.asarray(directions, dtype=np.float64)
    active = directions * (values - targets) > 0
    return np.where(active, directions, 0.0)


def fitted_one_sided_loss(model: Regressor, problem: OneSidedProblem) -> float:
    return one_sided_loss(model.values(problem.features), problem.targets, problem.directions)
