"""Benchmark cost-structure generators.

Class counts drive every generator: misclassifying a rare class as a frequent
one draws a high cost in expectation, and balanced class weights are inverse
counts scaled so the rarest class gets weight 1.
"""

from __future__ import annotations

import numpy as np

from .data import ClassWeights, CostMatrix, validate_label
from .errors import InvalidArgumentError


def _check_counts(counts) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or counts.size < 2:
        raise InvalidArgumentError("need counts for at least two classes")
    if np.any(counts <= 0):
        raise InvalidArgumentError("class counts must be positive")
    return counts


def raw_inconsistent_entries(counts, rng: np.random.Generator) -> np.ndarray:
    """Unscaled draws: entry (y, k) ~ Uniform[0, counts[k] / counts[y]]."""
    counts = _check_counts(counts)
    k = counts.size
    bounds = counts[None, :] / counts[:, None]
    entries = rng.uniform(0.0, 1.0, size=(k, k)) * bounds
    np.fill_diagonal(entries, 0.0)
    return entries


def gen_inconsistent(counts, rng: np.random.Generator) -> CostMatrix:
    """Random class-dependent costs, scaled so the largest entry is 1."""
    entries = raw_inconsistent_entries(counts, rng)
    top = entries.max()
    if top > 0:
        entries = entries / top
    return CostMatrix(entries)


def assemble_consistent(weights, lower: np.ndarray) -> CostMatrix:
    """Build a consistent matrix from class weights and a lower triangle.

    The upper triangle is forced by the pairwise re-weighting identity:
    C(k, y) = (w_k / w_y) * C(y, k) for k < y.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights <= 0):
        raise InvalidArgumentError("consistent construction needs positive weights")
    k = weights.size
    entries = np.zeros((k, k))
    for y in range(1, k):
        for col in range(y):
            entries[y, col] = lower[y, col]
            entries[col, y] = weights[col] / weights[y] * lower[y, col]
    return CostMatrix(entries)


def gen_consistent(counts, rng: np.random.Generator) -> tuple[CostMatrix, ClassWeights]:
    """Random consistent costs plus the class weights that solve them.

    Weights are K sorted uniforms assigned so less frequent classes weigh
    more (count ties assign by label order); the lower triangle (y, k), y > k,
    draws from Uniform[0, counts[y] / counts[k]].
    """
    counts = _check_counts(counts)
    k = counts.size
    values = np.sort(rng.uniform(0.0, 1.0, size=k))
    while np.any(values == 0.0):
        values = np.sort(rng.uniform(0.0, 1.0, size=k))
    weights = np.empty(k)
    by_frequency = np.argsort(-counts, kind="stable")  # most frequent first
    weights[by_frequency] = values
    lower = np.zeros((k, k))
    for y in range(1, k):
        for col in range(y):
            lower[y, col] = rng.uniform(0.0, counts[y] / counts[col])
    return assemble_consistent(weights, lower), ClassWeights(weights)


def balanced_class_weights(counts) -> ClassWeights:
    """Inverse-count weights scaled so the rarest class gets weight 1."""
    counts = _check_counts(counts)
    inverse = 1.0 / counts
    return ClassWeights(inverse / inverse.max())


def emphasize_column(matrix: CostMatrix, column: int, emphasis: float) -> CostMatrix:
    """Multiply the off-diagonal entries of one column by the emphasis factor."""
    if not emphasis > 0:
        raise InvalidArgumentError(f"emphasis must be positive, got {emphasis}")
    column = validate_label(column, matrix.class_count)
    entries = matrix.entries.copy()
    entries[:, column - 1] *= emphasis
    entries[column - 1, column - 1] = 0.0
    return CostMatrix(entries)


def balance_rows(matrix: CostMatrix, counts) -> CostMatrix:
    """Scale down row y by the size of class y."""
    counts = _check_counts(counts)
    if counts.size != matrix.class_count:
        raise InvalidArgumentError("counts length must equal the class count")
    return CostMatrix(matrix.entries / counts[:, None])


def normalize_matrix_sum(matrix: CostMatrix, class_count: int | None = None) -> CostMatrix:
    """Scale so the entries sum to K(K-1), the all-ones off-diagonal total."""
    k = matrix.class_count if class_count is None else class_count
    total = matrix.entries.sum()
    if total <= 0:
        raise InvalidArgumentError("cannot normalize an all-zero cost matrix")
    return CostMatrix(matrix.entries * (k * (k - 1) / total))
