"""Cross-validated comparison of the forest combiners.

Every outer fold fits one forest. All methods combine the same base outputs,
so they differ only in the combining rule. Seeds are derived from
(global seed, dataset name, fold, ...), which makes parallel and sequential
runs produce identical results.
"""

import csv
import hashlib
import io
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from sklearn.utils import check_random_state

from ._validation import check_bipolar, to_bipolar_labels
from .data import fit_apply_standardizer, stratified_kfold_split
from .ensemble import RCAMEnsembleClassifier, combine
from .forest import ForestConfig, fit_forest, forest_base_outputs
from .memory import Exponential

METHODS = ("voting", "identity_rcam", "exp_rcam", "exp_rcam_gs")
METHOD_ALIASES = {"exp_rcam_gridsearch": "exp_rcam_gs", "random_forest": "voting"}
_RULES = {"voting": "voting", "identity_rcam": "identity",
          "exp_rcam": "exponential", "exp_rcam_gs": "exponential"}
DEFAULT_ALPHA_GRID = (0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 20.0, 50.0)


def canonical_method(name):
    name = METHOD_ALIASES.get(name, name)
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return name


@dataclass(frozen=True)
class EvalConfig:
    outer_folds: int = 10
    inner_folds: int = 5
    alpha_grid: Tuple[float, ...] = DEFAULT_ALPHA_GRID
    n_trees: int = 30
    seed: int = 0
    alpha: float = 1.0
    max_iter: int = 100
    timing_repeats: int = 5

    def __post_init__(self):
        if self.outer_folds < 2 or self.inner_folds < 2:
            raise ValueError("fold counts must be >= 2")
        if not self.alpha_grid or any(a <= 0 for a in self.alpha_grid):
            raise ValueError("alpha_grid must be a non-empty list of positive values")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.n_trees < 1 or self.timing_repeats < 1:
            raise ValueError("n_trees and timing_repeats must be >= 1")
        object.__setattr__(self, "alpha_grid", tuple(sorted(float(a) for a in self.alpha_grid)))


def derive_seed(*parts):
    """Deterministic 32-bit seed from ints and strings."""
    entropy = [zlib.crc32(p.encode()) if isinstance(p, str) else int(p) for p in parts]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def f_measure(predictions, truth):
    """F1 score of the +1 class; 0 when there are no true or predicted positives."""
    p = check_bipolar(predictions, "predictions", ndim=1)
    t = check_bipolar(truth, "truth", ndim=1)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch ({p.shape[0]} != {t.shape[0]})")
    tp = int(np.count_nonzero((p == 1) & (t == 1)))
    fp = int(np.count_nonzero((p == 1) & (t == -1)))
    fn = int(np.count_nonzero((p == -1) & (t == 1)))
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


@dataclass
class GridSearchResult:
    alpha: float
    mean_scores: Dict[float, float] = field(default_factory=dict)


def _fold_outputs(X_train, y_train, X_test, n_trees, seed):
    _, X_train, X_test = fit_apply_standardizer(X_train, X_test)
    forest = fit_forest(X_train, y_train, ForestConfig(n_trees=n_trees, rng_seed=seed))
    return forest, forest_base_outputs(forest, X_train), forest_base_outputs(forest, X_test)


def grid_search_alpha(features, labels, config, key=()):
    """Choose the exponential gain by inner stratified cross-validation.

    Each inner fold fits one forest, shared by every candidate alpha. The
    alpha with the highest mean inner F1 wins; ties go to the smallest alpha.
    When a class has fewer members than ``config.inner_folds`` the number of
    inner folds shrinks to the class size; with fewer than two members the
    smallest alpha is returned unscored.
    """
    grid = config.alpha_grid
    if len(grid) == 1:
        return GridSearchResult(grid[0])
    X = np.asarray(features, dtype=np.float64)
    y = check_bipolar(labels, "labels", ndim=1)
    k = min(config.inner_folds, int(np.count_nonzero(y == 1)), int(np.count_nonzero(y == -1)))
    if k < 2:
        return GridSearchResult(grid[0])

    plan = stratified_kfold_split(y, k, derive_seed(config.seed, *key, "inner"))
    scores = {a: [] for a in grid}
    for i, (tr, te) in enumerate(plan.split()):
        _, H_train, H_test = _fold_outputs(X[tr], y[tr], X[te], config.n_trees,
                                           derive_seed(config.seed, *key, "inner", i))
        for a in grid:
            pred = combine("exponential", y[tr], H_train, H_test, a, config.max_iter)
            scores[a].append(f_measure(pred, y[te]))
    means = {a: float(np.mean(s)) for a, s in scores.items()}
    best = grid[0]
    for a in grid[1:]:
        if means[a] > means[best]:
            best = a
    return GridSearchResult(best, means)


@dataclass
class FoldResult:
    dataset: str
    method: str
    fold: int
    f1: float
    predict_ms: float
    alpha_chosen: Optional[float] = None
    forest_fingerprint: str = ""
    base_checksum: str = ""

    def to_record(self):
        rec = {"dataset": self.dataset, "method": self.method, "fold": self.fold,
               "f1": self.f1, "predict_ms": self.predict_ms}
        if self.alpha_chosen is not None:
            rec["alpha_chosen"] = self.alpha_chosen
        return rec


def _timed(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return out, 1000.0 * float(np.median(times))


@dataclass
class FoldData:
    """Standardized base outputs of one outer fold, shared by every combiner."""

    fold: int
    train_targets: np.ndarray
    test_targets: np.ndarray
    train_outputs: np.ndarray
    test_outputs: np.ndarray
    forest_fingerprint: str

    @property
    def checksum(self):
        return hashlib.sha256(self.train_outputs.tobytes() + self.test_outputs.tobytes()).hexdigest()


def outer_plan(dataset, config):
    return stratified_kfold_split(dataset.labels, config.outer_folds,
                                  derive_seed(config.seed, dataset.name, "outer"))


def prepare_fold(dataset, plan, fold, config):
    """Fit the fold's forest on the standardized training rows."""
    train, test = list(plan.split())[fold]
    X, y = dataset.features, dataset.labels
    forest, H_train, H_test = _fold_outputs(X[train], y[train], X[test], config.n_trees,
                                            derive_seed(config.seed, dataset.name, fold))
    return FoldData(fold, y[train], y[test], H_train, H_test, forest.fingerprint())


def _evaluate_fold(dataset, plan, fold, methods, config):
    data = prepare_fold(dataset, plan, fold, config)
    train = plan.assignments != fold
    out = []
    for method in methods:
        alpha = None
        rule, gain = _RULES[method], config.alpha
        if method == "exp_rcam_gs":
            gain = alpha = grid_search_alpha(dataset.features[train], dataset.labels[train],
                                             config, (dataset.name, fold)).alpha
        pred, ms = _timed(lambda: combine(rule, data.train_targets, data.train_outputs,
                                          data.test_outputs, gain, config.max_iter),
                          config.timing_repeats)
        out.append(FoldResult(dataset.name, method, fold, f_measure(pred, data.test_targets), ms,
                              alpha, data.forest_fingerprint, data.checksum))
    return out


def cross_validate(dataset, methods, config=None, n_jobs=1):
    """Stratified k-fold evaluation of one or more methods on ``dataset``.

    Returns a list of :class:`FoldResult` ordered by fold, then by method.
    The whole test fold is presented to the combiners as one batch.
    """
    config = config or EvalConfig()
    if isinstance(methods, str):
        methods = [methods]
    methods = [canonical_method(m) for m in methods]
    plan = outer_plan(dataset, config)
    jobs = [(dataset, plan, fold, methods, config) for fold in range(plan.k)]
    if n_jobs and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            chunks = list(pool.map(_evaluate_fold, *zip(*jobs)))
    else:
        chunks = [_evaluate_fold(*job) for job in jobs]
    return [r for chunk in chunks for r in chunk]


def summarize(results):
    """Mean and population std of F1 per method, in method order."""
    by_method = {}
    for r in results:
        by_method.setdefault(r.method, []).append(r.f1)
    return {m: (float(np.mean(s)), float(np.std(s))) for m, s in by_method.items()}


@dataclass
class EvalReport:
    datasets: List[str]
    methods: List[str]
    table: Dict[str, Dict[str, dict]]
    normalized: Dict[str, Dict[str, float]]
    best: Dict[str, List[str]]
    failures: List[dict] = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        """Table of ``mean±std`` F-measures in percent; rows are datasets."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset"] + self.methods)
        for ds in self.datasets:
            cells = []
            for m in self.methods:
                cell = self.table[ds].get(m)
                cells.append(f"{100 * cell['mean']:.1f}±{100 * cell['std']:.1f}" if cell else "")
            writer.writerow([ds] + cells)
        return buf.getvalue()

    def timing_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset"] + self.methods)
        for ds in self.datasets:
            writer.writerow([ds] + [f"{self.table[ds][m]['predict_ms_mean']:.4f}"
                                    if m in self.table[ds] else "" for m in self.methods])
        return buf.getvalue()


def benchmark_report(results, failures=()):
    """Aggregate per-fold results (FoldResult objects or JSON records).

    Per dataset and method: mean and population std of F1, per-fold scores,
    chosen alphas and mean prediction time. Mean F1 values are also
    normalized across the methods of each dataset to zero mean and unit
    population std (all zeros when the std vanishes).
    """
    records = [r.to_record() if isinstance(r, FoldResult) else dict(r) for r in results]
    if not records and not failures:
        raise ValueError("no results to report")
    datasets = list(dict.fromkeys(r["dataset"] for r in records))
    present = {r["method"] for r in records}
    methods = [m for m in METHODS if m in present] + sorted(present - set(METHODS))

    table, normalized, best = {}, {}, {}
    for ds in datasets:
        table[ds] = {}
        for m in methods:
            rows = sorted((r for r in records if r["dataset"] == ds and r["method"] == m),
                          key=lambda r: r["fold"])
            if not rows:
                continue
            f1 = [float(r["f1"]) for r in rows]
            cell = {"mean": float(np.mean(f1)), "std": float(np.std(f1)), "folds": f1,
                    "predict_ms_mean": float(np.mean([r["predict_ms"] for r in rows]))}
            if any("alpha_chosen" in r for r in rows):
                cell["alphas"] = [r.get("alpha_chosen") for r in rows]
            table[ds][m] = cell
        means = np.array([table[ds][m]["mean"] for m in table[ds]])
        spread = float(np.std(means))
        z = (means - means.mean()) / spread if spread > 0 else np.zeros_like(means)
        normalized[ds] = {m: float(v) for m, v in zip(table[ds], z)}
        top = means.max()
        best[ds] = [m for m in table[ds] if table[ds][m]["mean"] == top]
    return EvalReport(datasets, methods, table, normalized, best, list(failures))


class RCAMEnsembleCV(RCAMEnsembleClassifier):
    """Exponential recall ensemble whose gain is picked by inner cross-validation.

    Parameters are those of :class:`RCAMEnsembleClassifier` plus ``alphas``
    (candidate gains) and ``cv`` (inner folds). The chosen gain is stored in
    ``alpha_`` and the final model is refit on all training data with it.
    """

    combiner = "exponential"

    def __init__(self, n_estimators=30, alphas=DEFAULT_ALPHA_GRID, cv=5,
                 max_features=None, min_samples_split=2, max_depth=None,
                 max_iter=100, random_state=None, n_jobs=None):
        self.n_estimators = n_estimators
        self.alphas = alphas
        self.cv = cv
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.max_depth = max_depth
        self.max_iter = max_iter
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _activation(self):
        return Exponential(float(getattr(self, "alpha_", self.alphas[0])))

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        classes = np.unique(y)
        if classes.shape[0] != 2:
            raise ValueError(f"binary targets required, got {classes.shape[0]} classes")
        seed = self.random_state
        if not isinstance(seed, (int, np.integer)):
            seed = int(check_random_state(seed).randint(np.iinfo(np.int32).max))
        config = EvalConfig(inner_folds=self.cv, alpha_grid=tuple(self.alphas),
                            n_trees=self.n_estimators, seed=int(seed), max_iter=self.max_iter)
        search = grid_search_alpha(X, to_bipolar_labels(y, classes), config)
        self.alpha_ = search.alpha
        self.cv_scores_ = search.mean_scores
        return super().fit(X, y)
