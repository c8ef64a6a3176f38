"""Soft cost-sensitive classification: blend task costs with error costs.

Training on the blended vectors

    c~[k] = (1 - alpha) * c[k] + alpha * cbar_y[k]

(or alpha * w_y * cbar_y[k] with class weights) turns any cost-sensitive
reduction into its soft variant: alpha = 0 recovers the hard algorithm,
alpha = 1 the regular (or weighted) classification sibling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    ClassWeights,
    CostMatrix,
    CostSensitiveDataset,
    CostVector,
    Dataset,
    attach_costs_from_matrix,
)
from .errors import InvalidArgumentError
from .kernels import PERCEPTRON_KERNEL, Kernel, KernelCache
from .learner import DEFAULT_TOL
from .reductions import (
    CszlModel,
    MulticlassModel,
    cszl_weights,
    train_csovo,
    train_csft,
    train_osr,
    train_weighted_ovo,
)

SOFT_ALGORITHMS = ("osr", "csovo", "csft", "cszl")


@dataclass(frozen=True)
class SoftParams:
    """Blending weight alpha in [0, 1], optionally with per-class error weights."""

    alpha: float
    class_weights: ClassWeights | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgumentError(f"alpha must lie in [0, 1], got {self.alpha}")


def _blend_rows(costs: np.ndarray, labels: np.ndarray, params: SoftParams) -> np.ndarray:
    k = costs.shape[1]
    error_rows = np.ones((costs.shape[0], k))
    error_rows[np.arange(costs.shape[0]), labels - 1] = 0.0
    if params.class_weights is not None:
        if params.class_weights.class_count != k:
            raise InvalidArgumentError("class weight length must equal the class count")
        error_rows *= params.class_weights.weights[labels - 1][:, None]
    return (1.0 - params.alpha) * costs + params.alpha * error_rows


def blend_cost(cost: CostVector, params: SoftParams) -> CostVector:
    """Blend one cost vector with the (weighted) 0/1 error vector."""
    blended = _blend_rows(
        cost.costs[None, :], np.asarray([cost.intended]), params
    )[0]
    return CostVector(blended, cost.intended)


def blend_matrix(matrix: CostMatrix, params: SoftParams) -> CostMatrix:
    """Blend every row of a class-dependent cost matrix."""
    labels = np.arange(1, matrix.class_count + 1)
    return CostMatrix(_blend_rows(matrix.entries, labels, params))


def soften_dataset(dataset: CostSensitiveDataset, params: SoftParams) -> CostSensitiveDataset:
    """Blend the cost vector of every example; features and labels untouched."""
    blended = _blend_rows(dataset.costs, dataset.labels, params)
    return CostSensitiveDataset(dataset.x, dataset.labels, dataset.class_count, blended)


def train_soft(
    algorithm: str,
    train: CostSensitiveDataset | Dataset,
    params: SoftParams,
    lam: float,
    cost_matrix: CostMatrix | None = None,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> MulticlassModel:
    """Train a cost-sensitive reduction on the blended costs.

    For cszl the class-dependent matrix is blended and its consistency is
    re-tested at the blended costs; the other algorithms blend per example.
    """
    if algorithm not in SOFT_ALGORITHMS:
        raise InvalidArgumentError(
            f"unknown soft algorithm {algorithm!r}; expected one of {SOFT_ALGORITHMS}"
        )
    if algorithm == "cszl":
        if cost_matrix is None:
            raise InvalidArgumentError("soft cszl needs the class-dependent cost matrix")
        blended = blend_matrix(cost_matrix, params)
        weights = cszl_weights(blended)
        if weights is not None:
            inner = train_weighted_ovo(train, weights, lam, kernel, tol, cache)
            return CszlModel("weighted", inner, train.class_count, weights)
        cost_train = attach_costs_from_matrix(train, blended)
        inner = train_csovo(cost_train, lam, kernel, tol, cache)
        return CszlModel("pairwise", inner, train.class_count)
    if not isinstance(train, CostSensitiveDataset):
        raise InvalidArgumentError(f"{algorithm} needs attached cost vectors")
    softened = soften_dataset(train, params)
    trainer = {"osr": train_osr, "csovo": train_csovo, "csft": train_csft}[algorithm]
    return trainer(softened, lam, kernel, tol, cache)
