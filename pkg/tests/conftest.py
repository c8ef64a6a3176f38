import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from costblend.data import CostMatrix, Dataset, attach_costs_from_matrix
from costblend.synth import three_clusters


SERS_PATH = Path(__file__).parent.parent / "src" / "costblend" / "fixtures" / "sers_cost_matrix.csv"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def clusters3():
    """Well-separated three-class training data."""
    return three_clusters(counts=(15, 15, 15), seed=7, spread=0.25)


def random_cost_dataset(rng, n=30, k=3, dim=2, scale=2.0):
    """Random features with random nonnegative costs (zero at the label)."""
    x = rng.normal(size=(n, dim))
    labels = rng.integers(1, k + 1, size=n)
    costs = rng.uniform(0.0, scale, size=(n, k))
    costs[np.arange(n), labels - 1] = 0.0
    from costblend.data import CostSensitiveDataset

    return CostSensitiveDataset(x, labels, k, costs)


def random_cost_matrix(rng, k=3, scale=2.0):
    entries = rng.uniform(0.1, scale, size=(k, k))
    np.fill_diagonal(entries, 0.0)
    return CostMatrix(entries)
