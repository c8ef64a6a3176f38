import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from costblend.data import (
    ClassWeights,
    CostSensitiveDataset,
    attach_costs_from_matrix,
    naive_cost_matrix,
    parse_cost_matrix,
)
from costblend.errors import InvalidArgumentError, UndefinedRecallError
from costblend.evaluation import (
    A_BETTER,
    B_BETTER,
    TIE,
    aggregate,
    error_rate,
    g_mean,
    incomplete_beta,
    mean_cost,
    paired_t_one_tailed,
    t_critical,
    weighted_error,
)
from costblend.soft import SoftParams, soften_dataset

from conftest import SERS_PATH, random_cost_dataset


def naive_mean_cost(predictions, test):
    per_example = []
    for n in range(test.size):
        for k in range(1, test.class_count + 1):
            if k == predictions[n]:
                per_example.append(test.costs[n, k - 1])
    return float(np.mean(np.asarray(per_example)))


def naive_weighted_error(predictions, labels, weights):
    per_example = []
    for n in range(len(labels)):
        per_example.append(weights.weights[labels[n] - 1] * (predictions[n] != labels[n]))
    return float(np.mean(np.asarray(per_example)))


def naive_g_mean(predictions, labels, class_count):
    recalls = []
    for k in range(1, class_count + 1):
        hit = total = 0
        for n in range(len(labels)):
            if labels[n] == k:
                total += 1
                hit += predictions[n] == k
        recalls.append(hit / total)
    product = 1.0
    for r in recalls:
        product *= r
    return float(product ** (1.0 / class_count))


def test_mean_cost_zero_when_all_correct(rng):
    ds = random_cost_dataset(rng, n=15, k=3)
    assert mean_cost(ds.labels, ds) == 0.0


def test_mean_cost_sers_single_example():
    matrix = parse_cost_matrix(SERS_PATH)
    ds = CostSensitiveDataset(
        np.zeros((1, 1)), np.array([1]), 10, matrix.entries[[0]]
    )  # one Ab example
    assert mean_cost(np.array([3]), ds) == 10.0  # predicted HI


def test_mean_cost_matches_naive_double_loop(rng):
    for _ in range(20):
        ds = random_cost_dataset(rng, n=10, k=4)
        preds = rng.integers(1, 5, size=10)
        assert mean_cost(preds, ds) == naive_mean_cost(preds, ds)


def test_mean_cost_rejects_length_mismatch(rng):
    ds = random_cost_dataset(rng, n=5, k=3)
    with pytest.raises(InvalidArgumentError):
        mean_cost(np.ones(4, dtype=int), ds)


def test_error_rate_values():
    assert error_rate([1, 2, 3], [1, 2, 3]) == 0.0
    assert error_rate([1, 1], [2, 2]) == 1.0
    preds = [1] * 9 + [2] * 3
    labels = [1] * 12
    assert error_rate(preds, labels) == 0.25


def test_weighted_error_reduces_to_error_rate(rng):
    labels = rng.integers(1, 4, 30)
    preds = rng.integers(1, 4, 30)
    w = ClassWeights(np.ones(3))
    assert weighted_error(preds, labels, w) == error_rate(preds, labels)


def test_weighted_error_zero_weight_class():
    w = ClassWeights(np.array([0.0, 1.0]))
    assert weighted_error([2], [1], w) == 0.0


def test_weighted_error_matches_naive(rng):
    for _ in range(10):
        labels = rng.integers(1, 5, 20)
        preds = rng.integers(1, 5, 20)
        w = ClassWeights(rng.uniform(0.1, 1.0, 4))
        assert weighted_error(preds, labels, w) == naive_weighted_error(preds, labels, w)


def test_g_mean_values():
    # recalls (1.0, 0.25) -> sqrt(0.25) = 0.5
    labels = [1, 1, 2, 2, 2, 2]
    preds = [1, 1, 2, 1, 1, 1]
    assert g_mean(preds, labels, 2) == 0.5
    assert g_mean(labels, labels, 2) == 1.0
    assert g_mean([1, 1, 1, 1], [1, 1, 2, 2], 2) == 0.0  # class 2 fully missed


def test_g_mean_absent_class_is_an_error():
    with pytest.raises(UndefinedRecallError):
        g_mean([1, 1], [1, 1], 2)


def test_g_mean_permutation_invariant(rng):
    labels = np.array([1] * 6 + [2] * 9 + [3] * 5)
    preds = rng.integers(1, 4, labels.size)
    base = g_mean(preds, labels, 3)
    swap = {1: 2, 2: 3, 3: 1}
    relabeled = np.vectorize(swap.get)(labels)
    repreds = np.vectorize(swap.get)(preds)
    assert g_mean(repreds, relabeled, 3) == pytest.approx(base, abs=1e-12)


def test_g_mean_bounded_by_max_recall(rng):
    labels = np.array([1] * 8 + [2] * 8)
    preds = rng.integers(1, 3, 16)
    recalls = [np.mean(preds[labels == k] == k) for k in (1, 2)]
    assert g_mean(preds, labels, 2) <= max(recalls) + 1e-12


def test_g_mean_matches_naive(rng):
    labels = np.array([1] * 5 + [2] * 7 + [3] * 4)
    for _ in range(10):
        preds = rng.integers(1, 4, labels.size)
        assert g_mean(preds, labels, 3) == naive_g_mean(preds, labels, 3)


def test_aggregate_values():
    assert aggregate([3.0, 3.0, 3.0]).mean == 3.0
    assert aggregate([3.0, 3.0, 3.0]).stderr == 0.0
    agg = aggregate([0.0, 2.0])
    assert (agg.mean, agg.stderr, agg.count) == (1.0, 1.0, 2)


def test_aggregate_matches_direct_formula(rng):
    runs = rng.normal(size=20)
    agg = aggregate(runs)
    assert agg.mean == float(np.mean(runs))
    assert agg.stderr == float(np.std(runs, ddof=1) / math.sqrt(20))


def test_aggregate_needs_two_runs():
    with pytest.raises(InvalidArgumentError):
        aggregate([1.0])


# ---------------------------------------------------------------------------
# statistical identities from the cost/error definitions


def test_regular_costs_make_mean_cost_equal_error_rate(rng, clusters3):
    cs = attach_costs_from_matrix(clusters3, naive_cost_matrix(3))
    for _ in range(5):
        preds = rng.integers(1, 4, clusters3.size)
        assert mean_cost(preds, cs) == error_rate(preds, clusters3.labels)


def test_blended_cost_affine_identity(rng):
    ds = random_cost_dataset(rng, n=40, k=4)
    weights = ClassWeights(rng.uniform(0.1, 1.0, 4))
    for alpha in (0.0, 0.25, 0.6, 1.0):
        for w in (None, weights):
            blended = soften_dataset(ds, SoftParams(alpha, w))
            preds = rng.integers(1, 5, ds.size)
            base = mean_cost(preds, ds)
            err = (
                error_rate(preds, ds.labels)
                if w is None
                else weighted_error(preds, ds.labels, w)
            )
            expected = (1 - alpha) * base + alpha * err
            assert mean_cost(preds, blended) == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------------------
# Student-t


def t_density(x, df):
    return (
        math.gamma((df + 1) / 2)
        / (math.sqrt(df * math.pi) * math.gamma(df / 2))
        * (1 + x * x / df) ** (-(df + 1) / 2)
    )


def t_tail_by_quadrature(t, df):
    value, _ = quad(t_density, t, np.inf, args=(df,))
    return value


def t_critical_by_quadrature(df, level):
    lo, hi = 0.0, 50.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if t_tail_by_quadrature(mid, df) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_t_critical_against_numeric_integration():
    for df, level in [(19, 0.05), (19, 0.10), (9, 0.05), (30, 0.01)]:
        assert t_critical(df, level) == pytest.approx(
            t_critical_by_quadrature(df, level), abs=1e-6
        )


def test_t_critical_table_values():
    assert t_critical(19, 0.05) == pytest.approx(1.729, abs=1e-3)
    assert t_critical(19, 0.10) == pytest.approx(1.328, abs=1e-3)


def test_incomplete_beta_endpoints():
    assert incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert incomplete_beta(2.0, 3.0, 1.0) == 1.0
    # symmetric case I_0.5(a, a) = 0.5
    assert incomplete_beta(4.0, 4.0, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_paired_t_identical_sequences_tie(rng):
    runs = rng.normal(size=20)
    assert paired_t_one_tailed(runs, runs) == TIE


def test_paired_t_constant_shift():
    b = np.linspace(1.0, 2.0, 20)
    assert paired_t_one_tailed(b - 1.0, b) == A_BETTER
    assert paired_t_one_tailed(b, b - 1.0) == B_BETTER


def test_paired_t_zero_variance_nonzero_difference():
    a = np.full(5, 1.0)
    b = np.full(5, 2.0)
    assert paired_t_one_tailed(a, b) == A_BETTER


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_paired_t_antisymmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=12)
    b = rng.normal(size=12) + rng.normal() * 0.5
    forward = paired_t_one_tailed(a, b, 0.1)
    backward = paired_t_one_tailed(b, a, 0.1)
    flip = {A_BETTER: B_BETTER, B_BETTER: A_BETTER, TIE: TIE}
    assert backward == flip[forward]


def test_paired_t_requires_paired_runs():
    with pytest.raises(InvalidArgumentError):
        paired_t_one_tailed([1.0, 2.0], [1.0, 2.0, 3.0])
