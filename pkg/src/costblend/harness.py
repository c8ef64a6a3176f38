"""Experiment orchestration: cross-validated model selection, the multi-run
benchmark protocol, and report assembly.

Each run derives its own random streams from (master seed, run index, purpose
tag), so adding algorithms or re-ordering work never perturbs existing
streams and reports are byte-identical under a fixed configuration.
"""

from __future__ import annotations

import json
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .costgen import (
    balance_rows,
    balanced_class_weights,
    emphasize_column,
    gen_consistent,
    gen_inconsistent,
    normalize_matrix_sum,
)
from .data import (
    ClassWeights,
    CostMatrix,
    CostSensitiveDataset,
    Dataset,
    attach_costs_from_matrix,
    fit_scaler,
    parse_cost_matrix,
    parse_dataset,
    scale_dataset,
    split_train_test,
    stratified_split,
)
from .errors import DegenerateProblemError, InvalidArgumentError
from .evaluation import (
    Aggregate,
    RunResult,
    aggregate,
    error_rate,
    g_mean,
    mean_cost,
    paired_t_one_tailed,
    weighted_error,
)
from .kernels import PERCEPTRON_KERNEL, Kernel, KernelCache
from .learner import DEFAULT_TOL
from .reductions import (
    train_cszl,
    train_csft,
    train_csovo,
    train_ft,
    train_osr,
    train_ova,
    train_ovo,
    train_weighted_ova,
)
from .soft import SoftParams, train_soft

REGULAR_ALGORITHMS = ("ova", "ovo", "ft")
HARD_ALGORITHMS = ("osr", "csovo", "csft", "cszl")
SOFT_ALGORITHMS = ("soft-osr", "soft-csovo", "soft-csft", "soft-cszl")
WEIGHTED_ALGORITHMS = ("weighted-ova",)
ALL_ALGORITHMS = REGULAR_ALGORITHMS + HARD_ALGORITHMS + SOFT_ALGORITHMS + WEIGHTED_ALGORITHMS

COST_SOURCES = ("inconsistent", "consistent", "matrix")
CV_CRITERIA = ("cost", "error", "max_error_normcost")

DEFAULT_LAMBDA_GRID = (2.0**10, 2.0**7, 2.0**4, 2.0**1, 2.0**-2)
DEFAULT_ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
CV_TIE_TOL = 1e-12
SIGNIFICANCE_LEVEL = 0.05
FOLD_RETRIES = 5


@dataclass(frozen=True)
class CostSource:
    """Where per-run cost matrices come from, plus composable transforms."""

    source: str
    path: str | None = None
    emphasize_u: tuple[float, ...] | None = None
    emphasize_column: int | None = None
    balance: bool = False

    def __post_init__(self):
        if self.source not in COST_SOURCES:
            raise InvalidArgumentError(f"unknown cost source {self.source!r}")
        if self.source == "matrix" and not self.path:
            raise InvalidArgumentError("matrix cost source needs a path")
        if self.emphasize_u is not None:
            object.__setattr__(self, "emphasize_u", tuple(float(u) for u in self.emphasize_u))
            if any(u <= 0 for u in self.emphasize_u) or not self.emphasize_u:
                raise InvalidArgumentError("emphasis values must be positive")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    algorithms: tuple[str, ...]
    cost: CostSource
    weighted_error: bool = False
    runs: int = 20
    split_fraction: float = 0.75
    folds: int = 5
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    cv_criterion: str = "cost"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "lambda_grid", tuple(float(v) for v in self.lambda_grid))
        object.__setattr__(self, "alpha_grid", tuple(float(v) for v in self.alpha_grid))
        for algo in self.algorithms:
            if algo not in ALL_ALGORITHMS:
                raise InvalidArgumentError(f"unknown algorithm {algo!r}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise InvalidArgumentError("duplicate algorithm in configuration")
        if not self.algorithms:
            raise InvalidArgumentError("need at least one algorithm")
        if not self.lambda_grid or not self.alpha_grid:
            raise InvalidArgumentError("parameter grids must be nonempty")
        if any(not 0 <= a <= 1 for a in self.alpha_grid):
            raise InvalidArgumentError("alpha grid values must lie in [0, 1]")
        if self.runs < 2:
            raise InvalidArgumentError("need at least two runs")
        if self.folds < 2:
            raise InvalidArgumentError("need at least two folds")
        if not 0 < self.split_fraction < 1:
            raise InvalidArgumentError("split fraction must lie in (0, 1)")
        if self.cv_criterion not in CV_CRITERIA:
            raise InvalidArgumentError(f"unknown CV criterion {self.cv_criterion!r}")
        if any(a in WEIGHTED_ALGORITHMS for a in self.algorithms) and not self.weighted_error:
            raise InvalidArgumentError("weighted algorithms need weighted_error: true")


_CONFIG_KEYS = {
    "dataset",
    "algorithms",
    "cost",
    "weighted_error",
    "runs",
    "split_fraction",
    "folds",
    "lambda_grid",
    "alpha_grid",
    "cv_criterion",
    "seed",
}
_COST_KEYS = {"source", "path", "emphasize_u", "emphasize_column", "balance_rows"}


def config_from_dict(raw: dict) -> ExperimentConfig:
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
    if "dataset" not in raw or "algorithms" not in raw or "cost" not in raw:
        raise InvalidArgumentError("config needs dataset, algorithms, and cost")
    cost_raw = dict(raw["cost"])
    unknown = set(cost_raw) - _COST_KEYS
    if unknown:
        raise InvalidArgumentError(f"unknown cost keys: {sorted(unknown)}")
    cost = CostSource(
        source=cost_raw.get("source", "inconsistent"),
        path=cost_raw.get("path"),
        emphasize_u=tuple(cost_raw["emphasize_u"]) if "emphasize_u" in cost_raw else None,
        emphasize_column=cost_raw.get("emphasize_column"),
        balance=bool(cost_raw.get("balance_rows", False)),
    )
    kwargs = {k: v for k, v in raw.items() if k not in ("cost",)}
    kwargs["cost"] = cost
    kwargs["algorithms"] = tuple(raw["algorithms"])
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path) as handle:
        return config_from_dict(json.load(handle))


# ---------------------------------------------------------------------------
# seeding and folds


def derive_rng(master_seed: int, *path) -> np.random.Generator:
    key = tuple(
        p if isinstance(p, int) else zlib.crc32(str(p).encode()) for p in path
    )
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=key))


def stratified_folds(labels: np.ndarray, folds: int, rng: np.random.Generator):
    """Per-class round-robin assignment; returns validation index arrays."""
    assignments = np.empty(labels.size, dtype=np.int64)
    for k in np.unique(labels):
        (members,) = np.nonzero(labels == k)
        members = members[rng.permutation(members.size)]
        assignments[members] = np.arange(members.size) % folds
    return [np.nonzero(assignments == f)[0] for f in range(folds)]


def _folds_with_retry(labels, class_count, folds, master_seed, run_index):
    for attempt in range(FOLD_RETRIES):
        rng = derive_rng(master_seed, run_index, "folds", attempt)
        val_sets = stratified_folds(labels, folds, rng)
        ok = True
        for val in val_sets:
            train_mask = np.ones(labels.size, dtype=bool)
            train_mask[val] = False
            present = np.unique(labels[train_mask])
            if present.size != class_count:
                ok = False
                break
        if ok:
            return val_sets
    raise DegenerateProblemError(
        f"could not build {folds} folds with every class in each training part"
    )


# ---------------------------------------------------------------------------
# training dispatch


def algorithm_kind(name: str) -> str:
    if name in REGULAR_ALGORITHMS:
        return "regular"
    if name in HARD_ALGORITHMS:
        return "hard"
    if name in SOFT_ALGORITHMS:
        return "soft"
    return "weighted"


def _train_algorithm(
    name: str,
    train: CostSensitiveDataset,
    matrix: CostMatrix,
    lam: float,
    alpha: float,
    class_weights: ClassWeights | None,
    kernel: Kernel,
    tol: float,
    cache: KernelCache | None,
):
    if name == "ova":
        return train_ova(train, lam, kernel, tol, cache)
    if name == "ovo":
        return train_ovo(train, lam, kernel, tol, cache)
    if name == "ft":
        return train_ft(train, lam, kernel, tol, cache)
    if name == "osr":
        return train_osr(train, lam, kernel, tol, cache)
    if name == "csovo":
        return train_csovo(train, lam, kernel, tol, cache)
    if name == "csft":
        return train_csft(train, lam, kernel, tol, cache)
    if name == "cszl":
        return train_cszl(train, matrix, lam, kernel, tol, cache)
    if name == "weighted-ova":
        if class_weights is None:
            raise InvalidArgumentError("weighted-ova needs class weights")
        return train_weighted_ova(train, class_weights, lam, kernel, tol, cache)
    if name.startswith("soft-"):
        params = SoftParams(alpha, class_weights)
        return train_soft(
            name.removeprefix("soft-"), train, params, lam, matrix, kernel, tol, cache
        )
    raise InvalidArgumentError(f"unknown algorithm {name!r}")


def _criterion_for(name: str, config: ExperimentConfig) -> str:
    kind = algorithm_kind(name)
    if kind == "regular":
        return "error"
    if kind == "weighted":
        return "weighted_error"
    return config.cv_criterion


@dataclass(frozen=True)
class CvSelection:
    lam: float
    alpha: float
    value: float


def cv_select(
    algorithm: str,
    train: CostSensitiveDataset,
    matrix: CostMatrix,
    config: ExperimentConfig,
    fold_validation_sets,
    class_weights: ClassWeights | None = None,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    cache: KernelCache | None = None,
    criterion: str | None = None,
) -> CvSelection:
    """Pick (lambda, alpha) minimizing the k-fold CV criterion.

    Ties within 1e-12 break toward the largest alpha, then the largest
    lambda. Non-soft algorithms only search the lambda grid.
    """
    if train.size == 0:
        raise DegenerateProblemError("empty training set")
    criterion = criterion or _criterion_for(algorithm, config)
    soft = algorithm_kind(algorithm) == "soft"
    alphas = config.alpha_grid if soft else (0.0,)
    lams = config.lambda_grid
    if cache is None:
        cache = KernelCache(train.x, kernel)
    norm_matrix = None
    if criterion == "max_error_normcost":
        norm_matrix = normalize_matrix_sum(matrix)
    values = np.zeros((len(alphas), len(lams)))
    for val_idx in fold_validation_sets:
        train_mask = np.ones(train.size, dtype=bool)
        train_mask[val_idx] = False
        (train_idx,) = np.nonzero(train_mask)
        fold_train = train.subset(train_idx)
        fold_val = train.subset(val_idx)
        fold_cache = cache.restrict(train_idx)
        norm_val = (
            attach_costs_from_matrix(fold_val.without_costs(), norm_matrix)
            if norm_matrix is not None
            else None
        )
        for ia, alpha in enumerate(alphas):
            for il, lam in enumerate(lams):
                model = _train_algorithm(
                    algorithm, fold_train, matrix, lam, alpha, class_weights,
                    kernel, tol, fold_cache,
                )
                preds = model.predict_batch(fold_val.x)
                if criterion == "cost":
                    score = mean_cost(preds, fold_val)
                elif criterion == "error":
                    score = error_rate(preds, fold_val.labels)
                elif criterion == "weighted_error":
                    score = weighted_error(preds, fold_val.labels, class_weights)
                else:
                    score = max(
                        error_rate(preds, fold_val.labels), mean_cost(preds, norm_val)
                    )
                values[ia, il] += score
    values /= len(fold_validation_sets)
    best = values.min()
    best_ia, best_il = -1, -1
    for ia, alpha in enumerate(alphas):
        for il, lam in enumerate(lams):
            if values[ia, il] <= best + CV_TIE_TOL:
                if (
                    best_ia < 0
                    or alpha > alphas[best_ia]
                    or (alpha == alphas[best_ia] and lam > lams[best_il])
                ):
                    best_ia, best_il = ia, il
    return CvSelection(lams[best_il], alphas[best_ia], float(values[best_ia, best_il]))


# ---------------------------------------------------------------------------
# the run protocol


@dataclass(frozen=True)
class AlgorithmResult:
    algorithm: str
    metrics: dict[str, Aggregate]
    per_run: dict[str, tuple[float, ...]]
    selections: tuple[tuple[float, float], ...]  # (lambda, alpha) per run


@dataclass(frozen=True)
class Report:
    algorithms: tuple[AlgorithmResult, ...]
    metric_names: tuple[str, ...]
    t_tests: dict[str, dict[tuple[str, str], str]]
    emphasis_u: float | None = None

    def result(self, algorithm: str) -> AlgorithmResult:
        for entry in self.algorithms:
            if entry.algorithm == algorithm:
                return entry
        raise KeyError(algorithm)


def _build_run_matrix(config, train: Dataset, master_seed, run_index, base_matrix):
    counts = train.class_counts()
    if config.cost.source == "matrix":
        matrix = base_matrix
    else:
        if np.any(counts == 0):
            raise DegenerateProblemError("a class is absent from the training split")
        rng = derive_rng(master_seed, run_index, "cost")
        if config.cost.source == "inconsistent":
            matrix = gen_inconsistent(counts, rng)
        else:
            matrix, _ = gen_consistent(counts, rng)
    u = None
    if config.cost.emphasize_u is not None:
        u = config.cost.emphasize_u[0]
        column = config.cost.emphasize_column
        if column is None:
            column = int(np.argmin(counts)) + 1  # least frequent class
        matrix = emphasize_column(matrix, column, u)
    if config.cost.balance:
        matrix = balance_rows(matrix, counts)
    return matrix, u


def _single_run(config, dataset, base_matrix, run_index, kernel, tol):
    split_rng = derive_rng(config.seed, run_index, "split")
    splitter = stratified_split if config.weighted_error else split_train_test
    train, test = splitter(dataset, config.split_fraction, split_rng)
    scaler = fit_scaler(train)
    train = scale_dataset(scaler, train)
    test = scale_dataset(scaler, test)
    matrix, u = _build_run_matrix(config, train, config.seed, run_index, base_matrix)
    weights = balanced_class_weights(train.class_counts()) if config.weighted_error else None
    cs_train = attach_costs_from_matrix(train, matrix)
    cs_test = attach_costs_from_matrix(test, matrix)
    folds = _folds_with_retry(
        train.labels, train.class_count, config.folds, config.seed, run_index
    )
    cache = KernelCache(train.x, kernel)
    results = {}
    selections = {}
    for name in config.algorithms:
        chosen = cv_select(
            name, cs_train, matrix, config, folds, weights, kernel, tol, cache
        )
        model = _train_algorithm(
            name, cs_train, matrix, chosen.lam, chosen.alpha, weights, kernel, tol, cache
        )
        preds = model.predict_batch(test.x)
        results[name] = RunResult(
            test_cost=mean_cost(preds, cs_test),
            test_error=error_rate(preds, test.labels),
            weighted_error=(
                weighted_error(preds, test.labels, weights) if weights is not None else None
            ),
            g_mean=(
                g_mean(preds, test.labels, test.class_count)
                if config.weighted_error
                else None
            ),
        )
        selections[name] = (chosen.lam, chosen.alpha)
    return results, selections, u


def run_experiment(
    config: ExperimentConfig,
    threads: int = 1,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    dataset: Dataset | None = None,
) -> Report:
    """Execute the full multi-run protocol and aggregate a report.

    Deterministic end-to-end for a fixed configuration: runs are independent
    work items whose results merge by run index.
    """
    if config.cost.emphasize_u is not None and len(config.cost.emphasize_u) > 1:
        raise InvalidArgumentError(
            "run_experiment takes a single emphasis value; use run_emphasis_sweep"
        )
    if dataset is None:
        dataset = parse_dataset(config.dataset)
    base_matrix = parse_cost_matrix(config.cost.path) if config.cost.source == "matrix" else None

    def job(run_index):
        return _single_run(config, dataset, base_matrix, run_index, kernel, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(job, range(config.runs)))
    else:
        outcomes = [job(r) for r in range(config.runs)]
    return _assemble_report(config, outcomes)


def _assemble_report(config, outcomes) -> Report:
    emphasis_u = outcomes[0][2]
    metric_names = ["test_cost", "test_error"]
    if config.weighted_error:
        metric_names += ["weighted_error", "g_mean"]
    if emphasis_u is not None:
        metric_names.append("scaled_cost")
    algorithms = []
    for name in config.algorithms:
        per_run = {}
        for metric in metric_names:
            if metric == "scaled_cost":
                series = [res[0][name].test_cost / emphasis_u for res in outcomes]
            else:
                series = [res[0][name].metric(metric) for res in outcomes]
            per_run[metric] = tuple(float(v) for v in series)
        metrics = {m: aggregate(v) for m, v in per_run.items()}
        selections = tuple(res[1][name] for res in outcomes)
        algorithms.append(AlgorithmResult(name, metrics, per_run, selections))
    t_tests = {}
    for metric in metric_names:
        table = {}
        for i, a in enumerate(algorithms):
            for b in algorithms[i + 1 :]:
                table[(a.algorithm, b.algorithm)] = paired_t_one_tailed(
                    a.per_run[metric], b.per_run[metric], SIGNIFICANCE_LEVEL
                )
        t_tests[metric] = table
    return Report(tuple(algorithms), tuple(metric_names), t_tests, emphasis_u)


def run_emphasis_sweep(
    config: ExperimentConfig,
    threads: int = 1,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    dataset: Dataset | None = None,
) -> dict[float, Report]:
    """One report per emphasis value; base cost draws are shared across values."""
    if config.cost.emphasize_u is None:
        raise InvalidArgumentError("config has no emphasis values to sweep")
    if dataset is None:
        dataset = parse_dataset(config.dataset)
    reports = {}
    for u in config.cost.emphasize_u:
        sub = replace(config, cost=replace(config.cost, emphasize_u=(u,)))
        reports[u] = run_experiment(sub, threads, kernel, tol, dataset)
    return reports


def sweep_alpha(
    config: ExperimentConfig,
    algorithm: str,
    threads: int = 1,
    kernel: Kernel = PERCEPTRON_KERNEL,
    tol: float = DEFAULT_TOL,
    dataset: Dataset | None = None,
) -> list[tuple[float, Aggregate, Aggregate]]:
    """Per-alpha (cost, error) aggregates for one soft algorithm.

    Each alpha runs the full protocol with the alpha grid pinned to that
    single value (lambda still cross-validated).
    """
    if algorithm_kind(algorithm) != "soft":
        raise InvalidArgumentError("alpha sweeps need a soft algorithm")
    if dataset is None:
        dataset = parse_dataset(config.dataset)
    rows = []
    for alpha in config.alpha_grid:
        sub = replace(config, algorithms=(algorithm,), alpha_grid=(alpha,))
        report = run_experiment(sub, threads, kernel, tol, dataset)
        entry = report.result(algorithm)
        rows.append((alpha, entry.metrics["test_cost"], entry.metrics["test_error"]))
    return rows


# ---------------------------------------------------------------------------
# report emission

HIGHER_IS_BETTER = {"g_mean"}


def metric_marks(report: Report, metric: str):
    """Starred (best-mean) algorithm and the set within one stderr of it."""
    means = {a.algorithm: a.metrics[metric].mean for a in report.algorithms}
    higher = metric in HIGHER_IS_BETTER
    best_algo = (max if higher else min)(means, key=lambda name: (means[name],))
    best = report.result(best_algo).metrics[metric]
    bold = set()
    for name, mean in means.items():
        if higher:
            if mean >= best.mean - best.stderr:
                bold.add(name)
        elif mean <= best.mean + best.stderr:
            bold.add(name)
    return best_algo, bold


def emit_report(report: Report, fmt: str = "table") -> str:
    if fmt == "table":
        return _emit_table(report)
    if fmt == "csv":
        return _emit_csv(report)
    if fmt == "json-like":
        return _emit_json(report)
    raise InvalidArgumentError(f"unknown report format {fmt!r}")


def _emit_table(report: Report) -> str:
    lines = []
    if report.emphasis_u is not None:
        lines.append(f"# emphasis u = {report.emphasis_u:g}")
    width = max(len(a.algorithm) for a in report.algorithms)
    for metric in report.metric_names:
        lines.append(f"== {metric} ==")
        star, bold = metric_marks(report, metric)
        for entry in report.algorithms:
            agg = entry.metrics[metric]
            cell = f"{agg.mean:.6f} +/- {agg.stderr:.6f}"
            if entry.algorithm in bold:
                cell = f"**{cell}**"
            if entry.algorithm == star:
                cell += " *"
            lines.append(f"{entry.algorithm:<{width}}  {cell}")
        if len(report.algorithms) > 1:
            lines.append("-- pairwise one-tailed t-test --")
            for (a, b), verdict in report.t_tests[metric].items():
                lines.append(f"{a} vs {b}: {verdict}")
        lines.append("")
    return "\n".join(lines)


def _emit_csv(report: Report) -> str:
    lines = ["algorithm,metric,mean,stderr,values"]
    for entry in report.algorithms:
        for metric in report.metric_names:
            agg = entry.metrics[metric]
            values = ";".join(repr(v) for v in entry.per_run[metric])
            lines.append(f"{entry.algorithm},{metric},{agg.mean!r},{agg.stderr!r},{values}")
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str):
    """Inverse of the CSV emitter: {(algorithm, metric): (mean, stderr, values)}."""
    rows = {}
    lines = text.strip().splitlines()
    if not lines or lines[0] != "algorithm,metric,mean,stderr,values":
        raise InvalidArgumentError("not a report CSV")
    for line in lines[1:]:
        algorithm, metric, mean, stderr, values = line.split(",")
        rows[(algorithm, metric)] = (
            float(mean),
            float(stderr),
            tuple(float(v) for v in values.split(";") if v),
        )
    return rows


def _emit_json(report: Report) -> str:
    payload = {
        "emphasis_u": report.emphasis_u,
        "metrics": list(report.metric_names),
        "algorithms": [
            {
                "name": entry.algorithm,
                "selections": [list(sel) for sel in entry.selections],
                "metrics": {
                    m: {
                        "mean": entry.metrics[m].mean,
                        "stderr": entry.metrics[m].stderr,
                        "values": list(entry.per_run[m]),
                    }
                    for m in report.metric_names
                },
            }
            for entry in report.algorithms
        ],
        "t_tests": {
            metric: {f"{a}|{b}": verdict for (a, b), verdict in table.items()}
            for metric, table in report.t_tests.items()
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True)
