"""Kernel functions for the internal learners.

The perceptron kernel k(x, x') = -||x - x'|| is the default; it is
conditionally positive definite, so the equality-constrained duals solved by
the trainers remain convex. A plain linear kernel is kept for sanity checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data import FeatureVector
from .errors import InvalidArgumentError

PERCEPTRON = "perceptron"
LINEAR = "linear"
_VARIANTS = (PERCEPTRON, LINEAR)


@dataclass(frozen=True)
class Kernel:
    variant: str = PERCEPTRON

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise InvalidArgumentError(f"unknown kernel variant {self.variant!r}")

    def matrix(self, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
        """Kernel values between all rows of ``xa`` and all rows of ``xb``."""
        if self.variant == PERCEPTRON:
            return -cdist(xa, xb, metric="euclidean")
        return xa @ xb.T

    def gram(self, x: np.ndarray) -> np.ndarray:
        return self.matrix(x, x)


PERCEPTRON_KERNEL = Kernel(PERCEPTRON)
LINEAR_KERNEL = Kernel(LINEAR)


def kernel_eval(kernel: Kernel, x: FeatureVector, x2: FeatureVector) -> float:
    """Kernel value between two sparse vectors."""
    dim = max(x.max_index, x2.max_index)
    a = x.to_dense(dim)[None, :] if dim else np.zeros((1, 1))
    b = x2.to_dense(dim)[None, :] if dim else np.zeros((1, 1))
    return float(kernel.matrix(a, b)[0, 0])


class KernelCache:
    """Full Gram matrix for one training set, sliced per sub-problem.

    The full matrix is kept only while it fits under ``max_bytes``; larger
    sets recompute each requested block from the feature rows. ``restrict``
    gives a view onto a row subset (e.g. one cross-validation fold) that
    shares the parent's cached matrix.
    """

    def __init__(self, x: np.ndarray, kernel: Kernel, max_bytes: int = 256 << 20):
        self.x = x
        self.kernel = kernel
        self._rows = None  # restriction onto the root's rows
        self._root = self
        self._full = None
        self._cacheable = x.shape[0] * x.shape[0] * 8 <= max_bytes

    def restrict(self, rows) -> "KernelCache":
        rows = np.asarray(rows, dtype=np.int64)
        child = object.__new__(KernelCache)
        child.x = self.x[rows]
        child.kernel = self.kernel
        child._root = self._root
        child._rows = rows if self._rows is None else self._rows[rows]
        child._full = None
        child._cacheable = self._root._cacheable
        return child

    def gram(self, indices=None) -> np.ndarray:
        if indices is None:
            indices = np.arange(self.x.shape[0])
        indices = np.asarray(indices, dtype=np.int64)
        rows = indices if self._rows is None else self._rows[indices]
        root = self._root
        if root._cacheable:
            if root._full is None:
                root._full = root.kernel.gram(root.x)
            return root._full[np.ix_(rows, rows)]
        return root.kernel.gram(root.x[rows])
