"""Data model: examples, labels, cost vectors/matrices, scaling and splitting.

Features are sparse ``index:value`` pairs at the file boundary (1-based,
strictly increasing indices; missing indices read as 0) and dense float64
arrays internally. All containers are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DatasetFormatError,
    EmptyDatasetError,
    InvalidArgumentError,
    InvalidCostMatrixError,
    InvalidLabelError,
)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


class FeatureVector:
    """Sparse feature vector with 1-based, strictly increasing indices."""

    __slots__ = ("indices", "values")

    def __init__(self, indices, values):
        indices = _frozen(np.asarray(indices, dtype=np.int64))
        values = _frozen(np.asarray(values, dtype=np.float64))
        if indices.ndim != 1 or values.ndim != 1 or indices.shape != values.shape:
            raise InvalidArgumentError("indices and values must be 1-d and of equal length")
        if indices.size:
            if indices[0] < 1:
                raise InvalidArgumentError("feature indices are 1-based")
            if np.any(np.diff(indices) <= 0):
                raise InvalidArgumentError("feature indices must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("feature values must be finite")
        self.indices = indices
        self.values = values

    @property
    def max_index(self) -> int:
        return int(self.indices[-1]) if self.indices.size else 0

    def to_dense(self, dim: int | None = None) -> np.ndarray:
        dim = self.max_index if dim is None else dim
        if dim < self.max_index:
            raise InvalidArgumentError(f"dim {dim} smaller than max index {self.max_index}")
        dense = np.zeros(dim, dtype=np.float64)
        dense[self.indices - 1] = self.values
        return dense

    @classmethod
    def from_dense(cls, dense) -> "FeatureVector":
        dense = np.asarray(dense, dtype=np.float64)
        (nz,) = np.nonzero(dense)
        return cls(nz + 1, dense[nz])

    def __eq__(self, other):
        return (
            isinstance(other, FeatureVector)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        pairs = " ".join(f"{i}:{v:g}" for i, v in zip(self.indices, self.values))
        return f"FeatureVector({pairs})"


def validate_label(label: int, class_count: int) -> int:
    label = int(label)
    if not 1 <= label <= class_count:
        raise InvalidLabelError(f"label {label} outside 1..{class_count}")
    return label


class CostVector:
    """Per-example prediction costs; zero at the intended class."""

    __slots__ = ("costs", "intended")

    def __init__(self, costs, intended: int):
        costs = _frozen(np.asarray(costs, dtype=np.float64))
        if costs.ndim != 1 or costs.size < 1:
            raise InvalidArgumentError("costs must be a nonempty 1-d vector")
        intended = validate_label(intended, costs.size)
        if not np.all(np.isfinite(costs)) or np.any(costs < 0):
            raise InvalidArgumentError("costs must be finite and nonnegative")
        if costs[intended - 1] != 0.0:
            raise InvalidArgumentError("cost of the intended class must be 0")
        self.costs = costs
        self.intended = intended

    @property
    def class_count(self) -> int:
        return self.costs.size

    def __getitem__(self, label: int) -> float:
        return float(self.costs[validate_label(label, self.class_count) - 1])

    def __eq__(self, other):
        return (
            isinstance(other, CostVector)
            and self.intended == other.intended
            and np.array_equal(self.costs, other.costs)
        )

    def __repr__(self):
        return f"CostVector({self.costs.tolist()}, intended={self.intended})"


def regular_cost_vector(label: int, class_count: int) -> CostVector:
    """0/1 cost vector encoding plain misclassification error for ``label``."""
    label = validate_label(label, class_count)
    costs = np.ones(class_count)
    costs[label - 1] = 0.0
    return CostVector(costs, label)


class CostMatrix:
    """K x K class-dependent costs with a zero diagonal."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        entries = _frozen(np.asarray(entries, dtype=np.float64))
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise InvalidCostMatrixError(f"cost matrix must be square, got {entries.shape}")
        if not np.all(np.isfinite(entries)) or np.any(entries < 0):
            raise InvalidCostMatrixError("cost matrix entries must be finite and nonnegative")
        if np.any(np.diag(entries) != 0.0):
            raise InvalidCostMatrixError("cost matrix diagonal must be zero")
        self.entries = entries

    @property
    def class_count(self) -> int:
        return self.entries.shape[0]

    def row(self, label: int) -> CostVector:
        label = validate_label(label, self.class_count)
        return CostVector(self.entries[label - 1], label)

    def __eq__(self, other):
        return isinstance(other, CostMatrix) and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"CostMatrix({self.entries.tolist()})"


class ClassWeights:
    """Per-class nonnegative weights, at least one positive."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        weights = _frozen(np.asarray(weights, dtype=np.float64))
        if weights.ndim != 1 or weights.size < 1:
            raise InvalidArgumentError("weights must be a nonempty 1-d vector")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidArgumentError("weights must be finite and nonnegative")
        if weights.max() <= 0:
            raise InvalidArgumentError("at least one weight must be positive")
        self.weights = weights

    @property
    def class_count(self) -> int:
        return self.weights.size

    def __getitem__(self, label: int) -> float:
        return float(self.weights[validate_label(label, self.class_count) - 1])

    def __eq__(self, other):
        return isinstance(other, ClassWeights) and np.array_equal(self.weights, other.weights)

    def __repr__(self):
        return f"ClassWeights({self.weights.tolist()})"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense feature matrix plus 1-based labels."""

    x: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(np.asarray(self.x, dtype=np.float64)))
        object.__setattr__(self, "labels", _frozen(np.asarray(self.labels, dtype=np.int64)))
        if self.x.ndim != 2:
            raise InvalidArgumentError("x must be 2-d (examples by features)")
        if self.labels.shape != (self.x.shape[0],):
            raise InvalidArgumentError("labels length must match example count")
        if self.class_count < 1:
            raise InvalidArgumentError("class_count must be positive")
        if self.labels.size and not (
            self.labels.min() >= 1 and self.labels.max() <= self.class_count
        ):
            raise InvalidLabelError(f"labels must lie in 1..{self.class_count}")

    @property
    def size(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count + 1)[1:]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.x[indices], self.labels[indices], self.class_count)

    def feature_vector(self, n: int) -> FeatureVector:
        return FeatureVector.from_dense(self.x[n])


@dataclass(frozen=True, eq=False)
class CostSensitiveDataset(Dataset):
    """Dataset whose examples carry prediction-cost vectors."""

    costs: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        if self.costs is None:
            raise InvalidArgumentError("costs array is required")
        object.__setattr__(self, "costs", _frozen(np.asarray(self.costs, dtype=np.float64)))
        if self.costs.shape != (self.size, self.class_count):
            raise InvalidArgumentError(
                f"costs must have shape ({self.size}, {self.class_count}), got {self.costs.shape}"
            )
        if not np.all(np.isfinite(self.costs)) or np.any(self.costs < 0):
            raise InvalidArgumentError("costs must be finite and nonnegative")
        if self.size and np.any(self.costs[np.arange(self.size), self.labels - 1] != 0.0):
            raise InvalidArgumentError("cost of each example's own label must be 0")

    def subset(self, indices) -> "CostSensitiveDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return CostSensitiveDataset(
            self.x[indices], self.labels[indices], self.class_count, self.costs[indices]
        )

    def cost_vector(self, n: int) -> CostVector:
        return CostVector(self.costs[n], int(self.labels[n]))

    def without_costs(self) -> Dataset:
        return Dataset(self.x, self.labels, self.class_count)


def attach_costs_from_matrix(dataset: Dataset, matrix: CostMatrix) -> CostSensitiveDataset:
    """Attach row ``y`` of ``matrix`` to every example with label ``y``."""
    if matrix.class_count != dataset.class_count:
        raise InvalidCostMatrixError(
            f"matrix is {matrix.class_count}x{matrix.class_count}, "
            f"dataset has {dataset.class_count} classes"
        )
    costs = matrix.entries[dataset.labels - 1]
    return CostSensitiveDataset(dataset.x, dataset.labels, dataset.class_count, costs)


def attach_regular_costs(dataset: Dataset) -> CostSensitiveDataset:
    """Attach 0/1 misclassification-cost vectors to every example."""
    naive = naive_cost_matrix(dataset.class_count)
    return attach_costs_from_matrix(dataset, naive)


def naive_cost_matrix(class_count: int) -> CostMatrix:
    """All-ones off-diagonal cost matrix (plain misclassification error)."""
    if class_count < 1:
        raise InvalidArgumentError("class_count must be positive")
    return CostMatrix(np.ones((class_count, class_count)) - np.eye(class_count))


@dataclass(frozen=True)
class ScalerState:
    """Per-feature training min/max for the affine map onto [0, 1]."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "minimum", _frozen(np.asarray(self.minimum, dtype=np.float64)))
        object.__setattr__(self, "maximum", _frozen(np.asarray(self.maximum, dtype=np.float64)))
        if self.minimum.shape != self.maximum.shape or self.minimum.ndim != 1:
            raise InvalidArgumentError("min/max must be 1-d and of equal length")
        if np.any(self.minimum > self.maximum):
            raise InvalidArgumentError("per-feature min must not exceed max")

    @property
    def dim(self) -> int:
        return self.minimum.size


def fit_scaler(train: Dataset) -> ScalerState:
    """Fit per-feature min/max on the training set."""
    if train.size == 0:
        raise EmptyDatasetError("cannot fit a scaler on an empty dataset")
    return ScalerState(train.x.min(axis=0), train.x.max(axis=0))


def _scale_matrix(state: ScalerState, x: np.ndarray) -> np.ndarray:
    span = state.maximum - state.minimum
    # constant training features map to 0 rather than dividing by zero
    safe = np.where(span > 0, span, 1.0)
    scaled = (x - state.minimum) / safe
    scaled[:, span == 0] = 0.0
    return scaled


def apply_scaler(state: ScalerState, features: FeatureVector) -> FeatureVector:
    """Scale one sparse vector with a fitted state; no clipping is applied."""
    if features.max_index > state.dim:
        raise InvalidArgumentError(
            f"feature index {features.max_index} exceeds fitted dimension {state.dim}"
        )
    dense = features.to_dense(state.dim)
    scaled = _scale_matrix(state, dense[None, :])[0]
    return FeatureVector.from_dense(scaled)


def scale_dataset(state: ScalerState, dataset: Dataset) -> Dataset:
    """Scale every example of a dataset with a fitted state."""
    if dataset.dim != state.dim:
        raise InvalidArgumentError(
            f"dataset dimension {dataset.dim} does not match scaler dimension {state.dim}"
        )
    scaled = _scale_matrix(state, dataset.x)
    if isinstance(dataset, CostSensitiveDataset):
        return CostSensitiveDataset(scaled, dataset.labels, dataset.class_count, dataset.costs)
    return Dataset(scaled, dataset.labels, dataset.class_count)


def split_train_test(dataset: Dataset, fraction: float, seed) -> tuple[Dataset, Dataset]:
    """Random split with ceil(fraction * N) training examples."""
    if not 0.0 < fraction < 1.0:
        raise InvalidArgumentError(f"fraction must lie in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(dataset.size)
    n_train = int(np.ceil(fraction * dataset.size))
    return dataset.subset(order[:n_train]), dataset.subset(order[n_train:])


def stratified_split(dataset: Dataset, fraction: float, seed) -> tuple[Dataset, Dataset]:
    """Per-class random split; every class lands in both halves when it can."""
    if not 0.0 < fraction < 1.0:
        raise InvalidArgumentError(f"fraction must lie in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for k in range(1, dataset.class_count + 1):
        (members,) = np.nonzero(dataset.labels == k)
        members = members[rng.permutation(members.size)]
        n_train = int(np.ceil(fraction * members.size))
        if members.size > 1:
            n_train = min(n_train, members.size - 1)
        train_idx.append(members[:n_train])
        test_idx.append(members[n_train:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return dataset.subset(train_idx), dataset.subset(test_idx)


# ---------------------------------------------------------------------------
# file formats


def parse_dataset(path) -> Dataset:
    """Read the ``label idx:value ...`` text format (indices 1-based)."""
    rows = []
    labels = []
    max_index = 0
    with open(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            tokens = line.split()
            if not tokens:
                continue
            try:
                label = int(tokens[0])
            except ValueError:
                raise DatasetFormatError(path, line_no, f"bad label {tokens[0]!r}") from None
            if label < 1:
                raise DatasetFormatError(path, line_no, f"label must be positive, got {label}")
            indices, values = [], []
            for token in tokens[1:]:
                try:
                    idx_text, val_text = token.split(":", 1)
                    idx, val = int(idx_text), float(val_text)
                except ValueError:
                    raise DatasetFormatError(
                        path, line_no, f"bad index:value pair {token!r}"
                    ) from None
                indices.append(idx)
                values.append(val)
            try:
                fv = FeatureVector(indices, values)
            except InvalidArgumentError as exc:
                raise DatasetFormatError(path, line_no, str(exc)) from None
            rows.append(fv)
            labels.append(label)
            max_index = max(max_index, fv.max_index)
    if not rows:
        raise EmptyDatasetError(f"{path}: no examples")
    x = np.zeros((len(rows), max_index))
    for n, fv in enumerate(rows):
        x[n, fv.indices - 1] = fv.values
    return Dataset(x, np.asarray(labels), class_count=max(labels))


def write_dataset(path, dataset: Dataset) -> None:
    """Write a dataset in the sparse text format (zero entries omitted)."""
    with open(path, "w") as handle:
        for n in range(dataset.size):
            fv = dataset.feature_vector(n)
            pairs = " ".join(f"{i}:{float(v)!r}" for i, v in zip(fv.indices, fv.values))
            handle.write(f"{dataset.labels[n]} {pairs}".rstrip() + "\n")


def parse_cost_matrix(path) -> CostMatrix:
    """Read K rows of K comma-separated reals; the diagonal must be zero."""
    rows = []
    with open(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                rows.append([float(tok) for tok in line.strip().split(",")])
            except ValueError:
                raise DatasetFormatError(path, line_no, f"bad row {line.strip()!r}") from None
    if not rows:
        raise DatasetFormatError(path, 0, "empty cost matrix file")
    k = len(rows)
    if any(len(row) != k for row in rows):
        raise DatasetFormatError(path, 0, f"expected a square {k}x{k} matrix")
    try:
        return CostMatrix(np.asarray(rows))
    except InvalidCostMatrixError as exc:
        raise InvalidCostMatrixError(f"{path}: {exc}") from None


def write_cost_matrix(path, matrix: CostMatrix) -> None:
    with open(path, "w") as handle:
        for row in matrix.entries:
            handle.write(",".join(repr(float(v)) for v in row) + "\n")
