"""Empirical criteria (cost, error, weighted error, G-mean), run aggregation,
and the pairwise one-tailed t-test used to compare algorithms across runs.

Student-t critical values are computed in-package from the regularized
incomplete beta function (Lentz continued fraction) so no table files or
stats libraries are involved; the test suite checks them against direct
numerical integration of the t density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import ClassWeights, CostSensitiveDataset
from .errors import InvalidArgumentError, UndefinedRecallError

A_BETTER = "a_better"
B_BETTER = "b_better"
TIE = "tie"


@dataclass(frozen=True)
class RunResult:
    """Test-set scalars of one experiment run."""

    test_cost: float
    test_error: float
    weighted_error: float | None = None
    g_mean: float | None = None

    def metric(self, name: str) -> float | None:
        return getattr(self, name)


@dataclass(frozen=True)
class Aggregate:
    mean: float
    stderr: float
    count: int


def _as_labels(values) -> np.ndarray:
    return np.asarray(values, dtype=np.int64)


def mean_cost(predictions, test: CostSensitiveDataset) -> float:
    """Average cost of the predicted classes over the test set."""
    predictions = _as_labels(predictions)
    if predictions.shape != (test.size,):
        raise InvalidArgumentError("one prediction per test example required")
    if predictions.size == 0:
        raise InvalidArgumentError("empty test set")
    if predictions.min() < 1 or predictions.max() > test.class_count:
        raise InvalidArgumentError("prediction outside 1..K")
    return float(np.mean(test.costs[np.arange(test.size), predictions - 1]))


def error_rate(predictions, labels) -> float:
    predictions, labels = _as_labels(predictions), _as_labels(labels)
    if predictions.shape != labels.shape or predictions.size == 0:
        raise InvalidArgumentError("predictions and labels must align and be nonempty")
    return float(np.mean(predictions != labels))


def weighted_error(predictions, labels, class_weights: ClassWeights) -> float:
    predictions, labels = _as_labels(predictions), _as_labels(labels)
    if predictions.shape != labels.shape or predictions.size == 0:
        raise InvalidArgumentError("predictions and labels must align and be nonempty")
    per_example = class_weights.weights[labels - 1] * (predictions != labels)
    return float(np.mean(per_example))


def g_mean(predictions, labels, class_count: int) -> float:
    """Geometric mean of per-class recalls; 0 if any class is fully missed."""
    predictions, labels = _as_labels(predictions), _as_labels(labels)
    if predictions.shape != labels.shape or predictions.size == 0:
        raise InvalidArgumentError("predictions and labels must align and be nonempty")
    recalls = np.empty(class_count)
    for k in range(1, class_count + 1):
        members = labels == k
        if not np.any(members):
            raise UndefinedRecallError(f"class {k} absent from the test labels")
        recalls[k - 1] = np.mean(predictions[members] == k)
    if np.any(recalls == 0.0):
        return 0.0
    return float(np.prod(recalls) ** (1.0 / class_count))


def aggregate(runs) -> Aggregate:
    """Mean and standard error (sample stddev / sqrt(n)) over runs."""
    runs = np.asarray(runs, dtype=np.float64)
    if runs.size < 2:
        raise InvalidArgumentError("need at least two runs to aggregate")
    return Aggregate(float(runs.mean()), float(runs.std(ddof=1) / math.sqrt(runs.size)), runs.size)


# ---------------------------------------------------------------------------
# Student-t machinery


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Lentz continued fraction for the regularized incomplete beta."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            break
    return h


def incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_tail(t: float, df: int) -> float:
    """P(T > t) for Student-t with df degrees of freedom, t >= 0."""
    if t < 0:
        raise InvalidArgumentError("tail is defined for t >= 0")
    x = df / (df + t * t)
    return 0.5 * incomplete_beta(df / 2.0, 0.5, x)


def t_critical(df: int, level: float) -> float:
    """One-tailed critical value: P(T > t_crit) = level."""
    if df < 1:
        raise InvalidArgumentError("degrees of freedom must be >= 1")
    if not 0.0 < level < 0.5:
        raise InvalidArgumentError("significance level must lie in (0, 0.5)")
    lo, hi = 0.0, 1.0
    while student_t_tail(hi, df) > level:
        hi *= 2.0
        if hi > 1e12:
            raise InvalidArgumentError("critical value out of range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_tail(mid, df) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def paired_t_one_tailed(a, b, level: float = 0.05) -> str:
    """Verdict of a one-tailed paired t-test; lower metric values are better.

    Returns "a_better" when a is significantly lower than b, "b_better" for
    the reverse, "tie" otherwise. Runs must be paired (same seed per index).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise InvalidArgumentError("need two equal-length sequences of >= 2 paired runs")
    diff = a - b
    sd = diff.std(ddof=1)
    n = diff.size
    if sd == 0.0:
        if diff.mean() == 0.0:
            return TIE
        return A_BETTER if diff.mean() < 0 else B_BETTER
    t_stat = diff.mean() / (sd / math.sqrt(n))
    crit = t_critical(n - 1, level)
    if t_stat < -crit:
        return A_BETTER
    if t_stat > crit:
        return B_BETTER
    return TIE
