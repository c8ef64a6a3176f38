"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete. Directional criteria use seeded synthetic data and
allow one standard error of slack on each paired comparison.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from costblend.costgen import balanced_class_weights, gen_consistent, gen_inconsistent
from costblend.data import (
    ClassWeights,
    CostMatrix,
    CostSensitiveDataset,
    attach_costs_from_matrix,
    naive_cost_matrix,
    write_cost_matrix,
    write_dataset,
)
from costblend.evaluation import (
    aggregate,
    error_rate,
    g_mean,
    mean_cost,
    paired_t_one_tailed,
    t_critical,
    weighted_error,
)
from costblend.harness import CostSource, ExperimentConfig, emit_report, run_emphasis_sweep, run_experiment
from costblend.kernels import PERCEPTRON_KERNEL
from costblend.learner import (
    OneSidedProblem,
    WeightedBinaryProblem,
    dual_objective,
    fitted_one_sided_loss,
    one_sided_loss,
    one_sided_loss_grad,
    solve_weighted_binary,
    train_one_sided,
)
from costblend.reductions import (
    cszl_weights,
    train_csft,
    train_csovo,
    train_cszl,
    train_ft,
    train_osr,
    train_ova,
    train_ovo,
)
from costblend.soft import SoftParams, train_soft
from costblend.synth import three_clusters, two_gaussians

from qp_oracle import brute_force_dual


def _pass(number, text):
    print(f"\nACCEPTANCE {number}: PASS - {text}")


def record_equal(a, b, fields=("indices", "signs", "weights", "targets", "directions")):
    assert a.key == b.key
    for name in fields:
        fa, fb = getattr(a, name), getattr(b, name)
        assert (fa is None) == (fb is None), f"{name} presence differs"
        if fa is not None:
            assert np.array_equal(fa, fb), f"{name} differs for {a.key}"


def paired_slack(lhs, rhs):
    """mean(lhs - rhs) and the one-stderr slack of the paired differences."""
    diff = np.asarray(lhs, dtype=float) - np.asarray(rhs, dtype=float)
    slack = float(diff.std(ddof=1) / math.sqrt(diff.size)) if diff.size > 1 else 0.0
    return float(diff.mean()), slack


def assert_leq_with_slack(lhs, rhs, label):
    mean, slack = paired_slack(lhs, rhs)
    assert mean <= slack + 1e-12, f"{label}: mean diff {mean:.6g} exceeds slack {slack:.6g}"


# ---------------------------------------------------------------------------


def test_acceptance_01_endpoint_equivalence(rng):
    checked = 0
    for seed in range(5):
        base = three_clusters(counts=(12, 12, 12), seed=100 + seed, spread=0.5)
        matrix = gen_inconsistent(base.class_counts(), np.random.default_rng(seed))
        ds = attach_costs_from_matrix(base, matrix)
        lam = 0.5

        # alpha = 0 reproduces the hard sibling exactly
        for name, hard in (
            ("osr", train_osr(ds, lam)),
            ("csovo", train_csovo(ds, lam)),
            ("csft", train_csft(ds, lam)),
        ):
            soft = train_soft(name, ds, SoftParams(0.0), lam)
            for a, b in zip(soft.records, hard.records):
                record_equal(a, b)
        hard_cszl = train_cszl(base, matrix, lam)
        soft_cszl = train_soft("cszl", base, SoftParams(0.0), lam, cost_matrix=matrix)
        assert soft_cszl.branch == hard_cszl.branch
        for a, b in zip(soft_cszl.records, hard_cszl.records):
            record_equal(a, b)

        # alpha = 1 reproduces the regular sibling's constructions exactly
        soft = train_soft("csovo", ds, SoftParams(1.0), lam)
        for a, b in zip(soft.records, train_ovo(base, lam).records):
            record_equal(a, b)
        soft = train_soft("csft", ds, SoftParams(1.0), lam)
        for a, b in zip(soft.records, train_ft(base, lam).records):
            record_equal(a, b)
        soft = train_soft("cszl", base, SoftParams(1.0), lam, cost_matrix=matrix)
        assert soft.branch == "weighted"
        assert np.array_equal(soft.weights.weights, np.ones(3))
        for a, b in zip(soft.records, train_ovo(base, lam).records):
            record_equal(a, b)
        # one-sided regression: 0/1 targets with directions matching the
        # one-versus-all signs (the problems differ only in loss type)
        soft = train_soft("osr", ds, SoftParams(1.0), lam)
        ova = train_ova(base, lam)
        for rec, ova_rec in zip(soft.records, ova.records):
            assert np.array_equal(rec.directions, ova_rec.signs)
            assert np.array_equal(rec.targets, (ova_rec.signs < 0).astype(float))
        checked += 1
    assert checked == 5
    _pass(1, "alpha endpoints rebuild hard/regular sibling constructions bit-for-bit "
             "on 5 seeded datasets")


def test_acceptance_02_solver_oracle(rng):
    worst_rel = 0.0
    for trial in range(50):
        n = int(rng.integers(3, 7))
        x = rng.normal(size=(n, 2))
        signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        signs[0], signs[1] = 1.0, -1.0
        weights = rng.uniform(0.2, 2.0, size=n)
        lam = float(rng.choice([0.25, 1.0, 4.0]))
        problem = WeightedBinaryProblem(x, signs, weights, lam)

        # contract check at the default tolerance
        _, _, _, default_residual, _ = solve_weighted_binary(problem, PERCEPTRON_KERNEL)
        assert default_residual <= 1e-3

        keep, alpha, _, residual, _ = solve_weighted_binary(
            problem, PERCEPTRON_KERNEL, tol=1e-8
        )
        assert keep.size == n and residual <= 1e-3
        achieved = dual_objective(problem, alpha, PERCEPTRON_KERNEL)
        gram = PERCEPTRON_KERNEL.gram(x)
        expected, _ = brute_force_dual(gram, signs, -np.ones(n), weights / lam)
        rel = abs(achieved - expected) / max(1.0, abs(expected))
        worst_rel = max(worst_rel, rel)
        assert rel <= 1e-4, f"trial {trial}: solver {achieved} vs oracle {expected}"
    _pass(2, f"50 random duals match the active-set oracle (worst rel err {worst_rel:.2e}) "
             "with KKT residual <= 1e-3")


def test_acceptance_03_one_sided_regression(rng):
    # subgradient against central finite differences away from kinks
    n = 15
    targets = rng.uniform(0.0, 4.0, size=n)
    directions = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    checked = 0
    while checked < 20:
        values = rng.uniform(-5.0, 9.0, size=n)
        if np.any(np.abs(values - targets) < 1e-3):
            continue
        checked += 1
        grad = one_sided_loss_grad(values, targets, directions)
        h = 1e-6
        for i in range(n):
            up, down = values.copy(), values.copy()
            up[i] += h
            down[i] -= h
            fd = (
                one_sided_loss(up, targets, directions)
                - one_sided_loss(down, targets, directions)
            ) / (2 * h)
            assert abs(grad[i] - fd) <= 1e-4

    # constant-feasible problems reach (near) zero loss
    for seed in range(10):
        local = np.random.default_rng(seed)
        x = local.normal(size=(12, 2))
        t = float(local.uniform(0.5, 6.0))
        dirs = np.where(local.random(12) < 0.5, 1.0, -1.0)
        dirs[0], dirs[1] = 1.0, -1.0
        problem = OneSidedProblem(x, np.full(12, t), dirs, 1.0)
        model = train_one_sided(problem, PERCEPTRON_KERNEL)
        assert fitted_one_sided_loss(model, problem) <= 1e-6
    _pass(3, "one-sided loss subgradient matches finite differences at 20 points; "
             "constant-feasible problems fit to loss <= 1e-6")


def test_acceptance_04_cszl_consistency_round_trip():
    # 100 generated consistent matrices across K in {3, 4, 6}
    shapes = [(3, (40, 25, 10)), (4, (40, 25, 10, 5)), (6, (60, 40, 25, 10, 8, 4))]
    done = 0
    worst_ratio_spread = 0.0
    for seed in range(100):
        k, counts = shapes[seed % len(shapes)]
        matrix, generated = gen_consistent(counts, np.random.default_rng(1000 + seed))
        recovered = cszl_weights(matrix)
        assert recovered is not None, f"seed {seed}: consistent matrix not detected"
        ratio = recovered.weights / generated.weights
        spread = float(np.max(np.abs(ratio / ratio[0] - 1.0)))
        worst_ratio_spread = max(worst_ratio_spread, spread)
        assert spread <= 1e-6, f"seed {seed}: weight ratios differ by {spread}"
        done += 1
    assert done == 100

    # 100 random K=3 matrices are inconsistent
    for seed in range(100):
        local = np.random.default_rng(2000 + seed)
        entries = local.uniform(0.05, 2.0, size=(3, 3))
        np.fill_diagonal(entries, 0.0)
        assert cszl_weights(CostMatrix(entries)) is None, f"seed {seed}"

    # the binary rescaling case is exact
    weights = cszl_weights(CostMatrix([[0.0, 1.0], [30.0, 0.0]]))
    assert weights.weights[0] == 1.0 / 30.0 and weights.weights[1] == 1.0
    _pass(4, f"100 consistent matrices recovered (worst ratio spread "
             f"{worst_ratio_spread:.2e}), 100 random K=3 matrices rejected, "
             "binary weights exactly (1/30, 1)")


def test_acceptance_05_metric_oracles(rng):
    from costblend.soft import soften_dataset

    for trial in range(1000):
        k = int(rng.integers(2, 7))
        n = int(rng.integers(k + 1, 40))
        labels = np.concatenate([np.arange(1, k + 1), rng.integers(1, k + 1, n - k)])
        preds = rng.integers(1, k + 1, n)
        costs = rng.uniform(0.0, 3.0, size=(n, k))
        costs[np.arange(n), labels - 1] = 0.0
        ds = CostSensitiveDataset(np.zeros((n, 1)), labels, k, costs)
        w = ClassWeights(rng.uniform(0.1, 1.0, k))

        per_example_cost = np.array(
            [costs[i, preds[i] - 1] for i in range(n)]
        )
        assert mean_cost(preds, ds) == float(np.mean(per_example_cost))

        mistakes = np.array([float(preds[i] != labels[i]) for i in range(n)])
        assert error_rate(preds, labels) == float(np.mean(mistakes))

        weighted = np.array(
            [w.weights[labels[i] - 1] * (preds[i] != labels[i]) for i in range(n)]
        )
        assert weighted_error(preds, labels, w) == float(np.mean(weighted))

        recalls = []
        for c in range(1, k + 1):
            members = [i for i in range(n) if labels[i] == c]
            recalls.append(
                sum(1 for i in members if preds[i] == c) / len(members)
            )
        product = 1.0
        for r in recalls:
            product *= r
        assert g_mean(preds, labels, k) == float(product ** (1.0 / k))

        # regular costs collapse mean cost onto the error rate exactly
        regular = attach_costs_from_matrix(ds.without_costs(), naive_cost_matrix(k))
        assert mean_cost(preds, regular) == error_rate(preds, labels)

        # blended-cost affine identity
        alpha = float(rng.uniform(0.0, 1.0))
        blended = soften_dataset(ds, SoftParams(alpha, w))
        expected = (1 - alpha) * mean_cost(preds, ds) + alpha * weighted_error(
            preds, labels, w
        )
        assert abs(mean_cost(preds, blended) - expected) <= 1e-12
    _pass(5, "1000 random prediction sets: cost/error/weighted-error/G-mean equal "
             "naive recomputation; regular-cost and affine identities hold")


@pytest.fixture(scope="module")
def tradeoff_report(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("tradeoff")
    dataset = two_gaussians(n_per_class=150, seed=424242)
    data_path = tmp / "gauss2.txt"
    write_dataset(data_path, dataset)
    matrix_path = tmp / "cost.csv"
    write_cost_matrix(matrix_path, CostMatrix([[0.0, 1.0], [30.0, 0.0]]))
    config = ExperimentConfig(
        dataset=str(data_path),
        algorithms=("ova", "osr", "soft-osr"),
        cost=CostSource("matrix", path=str(matrix_path)),
        runs=10,
        seed=7,
    )
    return run_experiment(config, threads=2)


def test_acceptance_06_tradeoff_directions(tradeoff_report):
    report = tradeoff_report
    ova_cost = report.result("ova").per_run["test_cost"]
    osr_cost = report.result("osr").per_run["test_cost"]
    soft_cost = report.result("soft-osr").per_run["test_cost"]
    ova_err = report.result("ova").per_run["test_error"]
    osr_err = report.result("osr").per_run["test_error"]
    soft_err = report.result("soft-osr").per_run["test_error"]
    assert_leq_with_slack(osr_cost, ova_cost, "cost-sensitive training lowers cost")
    assert_leq_with_slack(ova_err, osr_err, "plain training keeps error lower")
    assert_leq_with_slack(soft_cost, ova_cost, "soft blending keeps cost below plain")
    assert_leq_with_slack(soft_err, osr_err, "soft blending keeps error below hard")
    _pass(6, "two-Gaussian task over 10 seeds reproduces the cost/error trade-off "
             f"directions (osr cost {np.mean(osr_cost):.3f} <= ova {np.mean(ova_cost):.3f}; "
             f"ova err {np.mean(ova_err):.3f} <= osr {np.mean(osr_err):.3f})")


def test_acceptance_07_emphasis_stability(tmp_path):
    dataset = three_clusters(counts=(50, 50, 50), seed=515151, spread=0.6)
    data_path = tmp_path / "tri.txt"
    write_dataset(data_path, dataset)
    u_values = tuple(10.0**p for p in range(2, 7))
    config = ExperimentConfig(
        dataset=str(data_path),
        algorithms=("osr", "soft-osr"),
        cost=CostSource("inconsistent", emphasize_u=u_values),
        runs=10,
        seed=13,
    )
    reports = run_emphasis_sweep(config, threads=2)
    top = reports[10.0**6]
    soft_scaled = top.result("soft-osr").per_run["scaled_cost"]
    osr_scaled = top.result("osr").per_run["scaled_cost"]
    assert_leq_with_slack(soft_scaled, osr_scaled, "soft scaled cost at u=1e6")
    _pass(7, f"emphasis sweep u in 1e2..1e6: scaled cost at 1e6 is "
             f"{np.mean(soft_scaled):.4g} (soft) vs {np.mean(osr_scaled):.4g} (hard)")


def test_acceptance_08_unbalanced_directions(tmp_path):
    dataset = three_clusters(counts=(300, 60, 15), seed=626262, spread=0.7)
    data_path = tmp_path / "imb.txt"
    write_dataset(data_path, dataset)
    config = ExperimentConfig(
        dataset=str(data_path),
        algorithms=("weighted-ova", "osr", "soft-osr"),
        cost=CostSource("inconsistent"),
        weighted_error=True,
        runs=20,
        seed=29,
    )
    report = run_experiment(config, threads=2)
    wova = report.result("weighted-ova").per_run
    osr = report.result("osr").per_run
    soft = report.result("soft-osr").per_run

    assert_leq_with_slack(wova["weighted_error"], osr["weighted_error"],
                          "weighted-ova lowest weighted error vs osr")
    assert_leq_with_slack(wova["weighted_error"], soft["weighted_error"],
                          "weighted-ova lowest weighted error vs soft")
    assert_leq_with_slack(soft["weighted_error"], osr["weighted_error"],
                          "soft between on weighted error")
    assert_leq_with_slack(osr["test_cost"], wova["test_cost"],
                          "osr lowest cost vs weighted-ova")
    assert_leq_with_slack(osr["test_cost"], soft["test_cost"],
                          "osr lowest cost vs soft")
    assert_leq_with_slack(soft["test_cost"], wova["test_cost"],
                          "soft between on cost")
    assert_leq_with_slack(osr["g_mean"], soft["g_mean"], "soft G-mean >= osr G-mean")
    _pass(8, "unbalanced protocol (300/60/15): weighted-ova best weighted error, "
             "osr best cost, soft in between, soft G-mean >= osr G-mean")


def test_acceptance_09_t_test_correctness(rng):
    def density(x, df):
        return (
            math.gamma((df + 1) / 2)
            / (math.sqrt(df * math.pi) * math.gamma(df / 2))
            * (1 + x * x / df) ** (-(df + 1) / 2)
        )

    def crit_by_quadrature(df, level):
        lo, hi = 0.0, 50.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            tail, _ = quad(density, mid, np.inf, args=(df,))
            if tail > level:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    for df, level, table in [(19, 0.05, 1.729), (19, 0.10, 1.328)]:
        ours = t_critical(df, level)
        assert abs(ours - crit_by_quadrature(df, level)) <= 1e-3
        assert abs(ours - table) <= 1e-3

    flip = {"a_better": "b_better", "b_better": "a_better", "tie": "tie"}
    for _ in range(100):
        a = rng.normal(size=10)
        b = rng.normal(size=10) + rng.normal() * 0.4
        assert paired_t_one_tailed(b, a) == flip[paired_t_one_tailed(a, b)]
    _pass(9, "t critical values match numeric integration (1.729 / 1.328 at df=19); "
             "verdicts antisymmetric on 100 paired samples")


def test_acceptance_10_deterministic_reports(tmp_path):
    dataset = three_clusters(counts=(14, 14, 14), seed=737373, spread=0.5)
    data_path = tmp_path / "det.txt"
    write_dataset(data_path, dataset)
    config = ExperimentConfig(
        dataset=str(data_path),
        algorithms=("ova", "osr", "soft-osr"),
        cost=CostSource("inconsistent"),
        runs=3,
        folds=3,
        lambda_grid=(2.0**4, 2.0**-2),
        alpha_grid=(0.0, 0.5, 1.0),
        seed=3,
    )
    first = emit_report(run_experiment(config), "csv")
    second = emit_report(run_experiment(config, threads=3), "csv")
    assert first == second
    _pass(10, "repeated runs emit byte-identical CSV reports (threading included)")
