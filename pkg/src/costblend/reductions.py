"""Multiclass reductions: OVA/OVO/FT and their cost-sensitive counterparts.

Every trainer returns a model exposing ``predict_batch`` (and ``predict`` for
single points) with labels in 1..K. All argmax/argmin/vote ties break toward
the smallest label. Trained models keep a record of the binary/regression
sub-problems they constructed (indices, signs, weights, targets), which the
test suite uses to check that cost-sensitive constructions collapse onto their
regular siblings for 0/1 costs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .data import (
    ClassWeights,
    CostMatrix,
    CostSensitiveDataset,
    Dataset,
    attach_costs_from_matrix,
    attach_regular_costs,
)
from .errors import DegenerateProblemError, InvalidArgumentError
from .kernels import PERCEPTRON_KERNEL, Kernel, KernelCache
from .learner import (
    DEFAULT_TOL,
    WEIGHT_EPS,
    BinaryModel,
    OneSidedProblem,
    Regressor,
    WeightedBinaryProblem,
    train_one_sided,
    train_weighted_binary,
)

LEFT = +1.0
RIGHT = -1.0


@dataclass(frozen=True, eq=False)
class ProblemRecord:
    """Construction of one sub-problem, kept for inspection."""

    key: tuple
    indices: np.ndarray
    signs: np.ndarray | None = None
    weights: np.ndarray | None = None
    targets: np.ndarray | None = None
    directions: np.ndarray | None = None


class MulticlassModel:
    """Base for the trained reduction models."""

    class_count: int
    records: list

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, x) -> int:
        return int(self.predict_batch(np.atleast_2d(np.asarray(x, dtype=np.float64)))[0])


def predict(model: MulticlassModel, x) -> int:
    return model.predict(x)


@dataclass(frozen=True, eq=False)
class _TrainContext:
    kernel: Kernel
    tol: float
    cache: KernelCache

    def train_binary(self, x_all, indices, signs, weights, lam) -> BinaryModel:
        problem = WeightedBinaryProblem(x_all[indices], signs, weights, lam)
        return train_weighted_binary(
            problem, self.kernel, self.tol, gram=self.cache.gram(indices)
        )

    def train_regressor(self, x_all, indices, targets, directions, lam) -> Regressor:
        problem = OneSidedProblem(x_all[indices], targets, directions, lam)
        return train_one_sided(problem, self.kernel, self.tol, gram=self.cache.gram(indices))


def _context(train: Dataset, kernel, tol, cache) -> _TrainContext:
    if cache is None:
        cache = KernelCache(train.x, kernel)
    return _TrainContext(kernel, tol, cache)


def _check_multiclass(train: Dataset):
    if train.class_count < 2:
        raise InvalidArgumentError("multiclass training needs K >= 2")
    if train.size == 0:
        raise DegenerateProblemError("empty training set")


# ---------------------------------------------------------------------------
# one-versus-all


class OvaModel(MulticlassModel):
    def __init__(self, models, class_count, records):
        self.models = models
        self.class_count = class_count
        self.records = records

    def decision_matrix(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([m.values(x) for m in self.models])

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.decision_matrix(x), axis=1) + 1


def _ova_constructions(train: Dataset, class_weights: ClassWeights | None):
    indices = np.arange(train.size)
    weights = (
        np.ones(train.size)
        if class_weights is None
        else class_weights.weights[train.labels - 1]
    )
    for k in range(1, train.class_count + 1):
        signs = np.where(train.labels == k, 1.0, -1.0)
        yield ProblemRecord(("class", k), indices, signs, weights)


def train_ova(
    train: Dataset,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> OvaModel:
    """K one-versus-rest problems with unit weights; predict by argmax."""
    return _train_ova_impl(train, lam, None, kernel, tol, cache)


def train_weighted_ova(
    train: Dataset,
    class_weights: ClassWeights,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> OvaModel:
    """One-versus-rest where example n carries weight class_weights[y_n]."""
    return _train_ova_impl(train, lam, class_weights, kernel, tol, cache)


def _train_ova_impl(train, lam, class_weights, kernel, tol, cache) -> OvaModel:
    _check_multiclass(train)
    if np.any(train.class_counts() == 0):
        raise DegenerateProblemError("every class must appear in the training set")
    ctx = _context(train, kernel, tol, cache)
    models, records = [], []
    for rec in _ova_constructions(train, class_weights):
        models.append(ctx.train_binary(train.x, rec.indices, rec.signs, rec.weights, lam))
        records.append(rec)
    return OvaModel(models, train.class_count, records)


# ---------------------------------------------------------------------------
# pairwise voting (OVO family)


@dataclass(frozen=True, eq=False)
class PairVoter:
    """One pairwise unit: a trained model, a constant side, or an abstention."""

    first: int
    second: int
    model: BinaryModel | None = None
    constant: float | None = None  # +1 votes `first`, -1 votes `second`

    def cast_votes(self, x: np.ndarray, votes: np.ndarray) -> None:
        if self.model is not None:
            d = self.model.values(x)
            votes[d > 0, self.first - 1] += 1
            votes[d < 0, self.second - 1] += 1
        elif self.constant is not None:
            target = self.first if self.constant > 0 else self.second
            votes[:, target - 1] += 1


class OvoModel(MulticlassModel):
    def __init__(self, pairs, class_count, records):
        self.pairs = pairs
        self.class_count = class_count
        self.records = records

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        votes = np.zeros((x.shape[0], self.class_count))
        for pair in self.pairs:
            pair.cast_votes(x, votes)
        return np.argmax(votes, axis=1) + 1


def _train_pair(ctx, x_all, rec: ProblemRecord, lam, first, second) -> PairVoter:
    kept = rec.weights > WEIGHT_EPS
    if not np.any(kept):
        return PairVoter(first, second)  # abstains
    kept_signs = rec.signs[kept]
    if np.all(kept_signs > 0) or np.all(kept_signs < 0):
        return PairVoter(first, second, constant=float(kept_signs[0]))
    model = ctx.train_binary(x_all, rec.indices, rec.signs, rec.weights, lam)
    return PairVoter(first, second, model=model)


def _pairs(class_count):
    for i in range(1, class_count + 1):
        for j in range(i + 1, class_count + 1):
            yield i, j


def _ovo_constructions(train: Dataset, class_weights: ClassWeights | None):
    for i, j in _pairs(train.class_count):
        (members,) = np.nonzero((train.labels == i) | (train.labels == j))
        signs = np.where(train.labels[members] == i, 1.0, -1.0)
        if class_weights is None:
            weights = np.ones(members.size)
        else:
            weights = class_weights.weights[train.labels[members] - 1]
        yield ProblemRecord(("pair", i, j), members, signs, weights)


def _csovo_constructions(train: CostSensitiveDataset):
    for i, j in _pairs(train.class_count):
        diff = train.costs[:, i - 1] - train.costs[:, j - 1]
        (members,) = np.nonzero(np.abs(diff) > WEIGHT_EPS)
        signs = np.where(diff[members] < 0, 1.0, -1.0)
        weights = np.abs(diff[members])
        yield ProblemRecord(("pair", i, j), members, signs, weights)


def _train_ovo_impl(train, lam, constructions, kernel, tol, cache, strict_classes) -> OvoModel:
    _check_multiclass(train)
    if strict_classes and np.any(train.class_counts() == 0):
        raise DegenerateProblemError("every class must appear in the training set")
    ctx = _context(train, kernel, tol, cache)
    pairs, records = [], []
    for rec in constructions:
        _, i, j = rec.key
        pairs.append(_train_pair(ctx, train.x, rec, lam, i, j))
        records.append(rec)
    return OvoModel(pairs, train.class_count, records)


def train_ovo(
    train: Dataset,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> OvoModel:
    """All-pairs problems with unit weights; predict by plurality vote."""
    return _train_ovo_impl(
        train, lam, _ovo_constructions(train, None), kernel, tol, cache, strict_classes=True
    )


def train_weighted_ovo(
    train: Dataset,
    class_weights: ClassWeights,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> OvoModel:
    """All-pairs where example n carries weight class_weights[y_n]."""
    if class_weights.class_count != train.class_count:
        raise InvalidArgumentError("class weight length must equal the class count")
    return _train_ovo_impl(
        train,
        lam,
        _ovo_constructions(train, class_weights),
        kernel,
        tol,
        cache,
        strict_classes=True,
    )


def train_csovo(
    train: CostSensitiveDataset,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> OvoModel:
    """Pairwise problems labeled by the cheaper class, weighted by cost gaps."""
    return _train_ovo_impl(
        train, lam, _csovo_constructions(train), kernel, tol, cache, strict_classes=False
    )


# ---------------------------------------------------------------------------
# tournament trees (FT / CSFT)


class TreeLeaf:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label


class TreeNode:
    __slots__ = ("left", "right", "model", "constant")

    def __init__(self, left, right, model=None, constant=None):
        self.left = left
        self.right = right
        self.model = model
        self.constant = constant  # LEFT or RIGHT when degenerate


def tree_leaves(node) -> list[int]:
    if isinstance(node, TreeLeaf):
        return [node.label]
    return tree_leaves(node.left) + tree_leaves(node.right)


def tree_depth(node) -> int:
    if isinstance(node, TreeLeaf):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


class TreeModel(MulticlassModel):
    def __init__(self, root, class_count, records):
        self.root = root
        self.class_count = class_count
        self.records = records

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0], dtype=np.int64)
        self._descend(self.root, x, np.arange(x.shape[0]), out)
        return out

    def _descend(self, node, x, idx, out):
        if idx.size == 0:
            return
        if isinstance(node, TreeLeaf):
            out[idx] = node.label
            return
        if node.model is None:
            side = node.left if node.constant == LEFT else node.right
            self._descend(side, x, idx, out)
            return
        d = node.model.values(x[idx])
        self._descend(node.left, x, idx[d >= 0], out)
        self._descend(node.right, x, idx[d < 0], out)


def train_csft(
    train: CostSensitiveDataset,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> TreeModel:
    """Single-elimination tournament trained bottom-up on subtree winners.

    Each internal node weighs example n by the cost gap between the classes
    its two subtrees currently predict; upper levels are trained on the lower
    levels' actual predictions.
    """
    _check_multiclass(train)
    ctx = _context(train, kernel, tol, cache)
    records = []
    # (subtree, per-example predicted class of that subtree)
    entries = [
        (TreeLeaf(k), np.full(train.size, k, dtype=np.int64))
        for k in range(1, train.class_count + 1)
    ]
    level = 0
    while len(entries) > 1:
        level += 1
        merged = []
        for pos in range(0, len(entries) - 1, 2):
            left, left_pred = entries[pos]
            right, right_pred = entries[pos + 1]
            ca = train.costs[np.arange(train.size), left_pred - 1]
            cb = train.costs[np.arange(train.size), right_pred - 1]
            diff = ca - cb
            (members,) = np.nonzero(np.abs(diff) > WEIGHT_EPS)
            signs = np.where(diff[members] < 0, 1.0, -1.0)
            weights = np.abs(diff[members])
            records.append(
                ProblemRecord(("node", level, pos // 2), members, signs, weights)
            )
            if members.size == 0:
                node = TreeNode(left, right, constant=LEFT)
                preds = left_pred
            elif np.all(signs > 0) or np.all(signs < 0):
                side = LEFT if signs[0] > 0 else RIGHT
                node = TreeNode(left, right, constant=side)
                preds = left_pred if side == LEFT else right_pred
            else:
                model = ctx.train_binary(train.x, members, signs, weights, lam)
                node = TreeNode(left, right, model=model)
                d = model.values(train.x)
                preds = np.where(d >= 0, left_pred, right_pred)
            merged.append((node, preds))
        if len(entries) % 2 == 1:
            merged.append(entries[-1])  # bye: lone class promotes unchanged
        entries = merged
    return TreeModel(entries[0][0], train.class_count, records)


def train_ft(
    train: Dataset,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> TreeModel:
    """Tournament tree on plain labels: the 0/1-cost case of `train_csft`."""
    _check_multiclass(train)
    if np.any(train.class_counts() == 0):
        raise DegenerateProblemError("every class must appear in the training set")
    return train_csft(attach_regular_costs(train), lam, kernel, tol, cache)


# ---------------------------------------------------------------------------
# one-sided regression (OSR)


class OsrModel(MulticlassModel):
    def __init__(self, regressors, class_count, records):
        self.regressors = regressors
        self.class_count = class_count
        self.records = records

    def cost_estimates(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([r.values(x) for r in self.regressors])

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return np.argmin(self.cost_estimates(x), axis=1) + 1


def _osr_constructions(train: CostSensitiveDataset):
    indices = np.arange(train.size)
    cheapest = np.argmin(train.costs, axis=1) + 1
    for k in range(1, train.class_count + 1):
        directions = np.where(cheapest == k, 1.0, -1.0)
        yield ProblemRecord(
            ("class", k), indices, targets=train.costs[:, k - 1], directions=directions
        )


def train_osr(
    train: CostSensitiveDataset,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> OsrModel:
    """Per-class one-sided cost regressors; predict the argmin estimate."""
    _check_multiclass(train)
    ctx = _context(train, kernel, tol, cache)
    regressors, records = [], []
    for rec in _osr_constructions(train):
        regressors.append(
            ctx.train_regressor(train.x, rec.indices, rec.targets, rec.directions, lam)
        )
        records.append(rec)
    return OsrModel(regressors, train.class_count, records)


# ---------------------------------------------------------------------------
# consistency-based re-weighting (CSZL)

RANK_TOL = 1e-8
PAIR_RESIDUAL_TOL = 1e-6


def _pair_system(matrix: CostMatrix) -> np.ndarray:
    k = matrix.class_count
    rows = []
    for i, j in _pairs(k):
        row = np.zeros(k)
        row[i - 1] = matrix.entries[j - 1, i - 1]
        row[j - 1] = -matrix.entries[i - 1, j - 1]
        rows.append(row)
    return np.asarray(rows)


def _pair_residual(matrix: CostMatrix, weights: np.ndarray) -> float:
    return float(np.max(np.abs(_pair_system(matrix) @ weights), initial=0.0))


def _refine_null_vector(matrix: CostMatrix, rough: np.ndarray) -> np.ndarray | None:
    """Rebuild the weights from exact entry ratios anchored at the largest one."""
    entries = matrix.entries
    anchor = int(np.argmax(np.abs(rough)))
    weights = np.empty(matrix.class_count)
    weights[anchor] = 1.0
    scale = rough[anchor]
    if scale == 0:
        return None
    for other in range(matrix.class_count):
        if other == anchor:
            continue
        i, j = min(anchor, other), max(anchor, other)
        # row for pair (i, j): w_i * C(j, i) = w_j * C(i, j)
        if other > anchor and entries[i, j] != 0:
            weights[other] = entries[j, i] / entries[i, j] * weights[anchor]
        elif other < anchor and entries[j, i] != 0:
            weights[other] = entries[i, j] / entries[j, i] * weights[anchor]
        else:
            weights[other] = rough[other] / scale
    return weights


def cszl_weights(matrix: CostMatrix) -> ClassWeights | None:
    """Class weights solving the pairwise re-weighting system, if they exist.

    Returns None when the pair system has full column rank (inconsistent cost)
    or when its null space holds no nonnegative vector.
    """
    k = matrix.class_count
    if k < 2:
        raise InvalidArgumentError("need at least two classes")
    system = _pair_system(matrix)
    if not np.any(system):
        return ClassWeights(np.ones(k))  # all-zero costs: any weighting works
    _, singular, vh = np.linalg.svd(system)
    rank = int(np.sum(singular > RANK_TOL * singular[0]))
    if rank > k - 1:
        return None
    scale = float(matrix.entries.max())
    null_dim = k - rank
    if null_dim == 1:
        rough = vh[-1]
        if rough.sum() < 0:
            rough = -rough
        candidates = [_refine_null_vector(matrix, rough), rough]
    else:
        result = linprog(
            c=np.zeros(k),
            A_eq=np.vstack([system, np.ones((1, k))]),
            b_eq=np.append(np.zeros(system.shape[0]), 1.0),
            bounds=[(0, None)] * k,
            method="highs",
        )
        candidates = [result.x if result.status == 0 else None]
    for cand in candidates:
        if cand is None:
            continue
        top = np.abs(cand).max()
        if top == 0 or np.any(cand < -1e-9 * top):
            continue
        weights = np.maximum(cand, 0.0)
        weights = weights / weights.max()
        if _pair_residual(matrix, weights) <= PAIR_RESIDUAL_TOL * scale:
            return ClassWeights(weights)
    return None


class CszlModel(MulticlassModel):
    def __init__(self, branch, inner, class_count, weights=None):
        self.branch = branch  # "weighted" or "pairwise"
        self.inner = inner
        self.class_count = class_count
        self.weights = weights

    @property
    def records(self):
        return self.inner.records

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return self.inner.predict_batch(x)


def train_cszl(
    train: Dataset,
    matrix: CostMatrix,
    lam: float,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
) -> CszlModel:
    """Weighted one-versus-one when the cost matrix is consistent, otherwise
    the pairwise cost-sensitive decomposition on the matrix's rows."""
    _check_multiclass(train)
    weights = cszl_weights(matrix)
    if weights is not None:
        inner = train_weighted_ovo(train, weights, lam, kernel, tol, cache)
        return CszlModel("weighted", inner, train.class_count, weights)
    cost_train = attach_costs_from_matrix(train, matrix)
    inner = train_csovo(cost_train, lam, kernel, tol, cache)
    return CszlModel("pairwise", inner, train.class_count)
