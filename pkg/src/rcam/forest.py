"""Bagged random-forest construction and (weighted) majority voting."""

import hashlib
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._validation import check_bipolar
from .tree import DecisionTree, _check_samples, fit_tree


@dataclass(frozen=True)
class ForestConfig:
    """Forest hyper-parameters.

    ``max_features`` is the number of features tried per split; ``None``
    resolves to ``floor(sqrt(n_features))`` at fit time.
    """

    n_trees: int = 30
    max_features: Optional[int] = None
    min_samples_split: int = 2
    max_depth: Optional[int] = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")


@dataclass
class Forest:
    trees: List[DecisionTree]
    tree_seeds: List[int]
    n_features: int
    bootstrap_indices: List[np.ndarray] = field(default_factory=list, repr=False)

    def fingerprint(self):
        """SHA-256 over every tree's arrays; equal forests hash equal."""
        h = hashlib.sha256()
        for tree in self.trees:
            for arr in (tree.feature, tree.threshold, tree.left, tree.right, tree.label):
                h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()

    def to_dict(self):
        return {
            "n_features": self.n_features,
            "tree_seeds": [int(s) for s in self.tree_seeds],
            "trees": [t.to_dict() for t in self.trees],
        }


def tree_seed(rng_seed, index):
    """Seed of tree ``index``; depends only on (rng_seed, index)."""
    return int(np.random.SeedSequence([rng_seed, index]).generate_state(1)[0])


def _fit_one(X, y, config, seed):
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, X.shape[0], X.shape[0])
    return fit_tree(X[idx], y[idx], config, rng), idx


def fit_forest(features, labels, config=None, n_jobs=None):
    """Fit ``config.n_trees`` trees, each on its own bootstrap sample.

    Every tree draws from a generator seeded by :func:`tree_seed`, so the
    result is identical whether trees are fitted sequentially or by
    ``n_jobs`` worker processes.
    """
    config = config or ForestConfig()
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"features must be a non-empty 2-d array, got shape {X.shape}")
    y = check_bipolar(labels, "labels", ndim=1)
    if y.shape[0] != X.shape[0]:
        raise ValueError("features and labels disagree on the number of samples")

    seeds = [tree_seed(config.rng_seed, t) for t in range(config.n_trees)]
    if n_jobs is not None and n_jobs != 1:
        from joblib import Parallel, delayed

        fitted = Parallel(n_jobs=n_jobs)(delayed(_fit_one)(X, y, config, s) for s in seeds)
    else:
        fitted = [_fit_one(X, y, config, s) for s in seeds]
    trees, indices = zip(*fitted)
    return Forest(list(trees), seeds, X.shape[1], list(indices))


def forest_base_outputs(forest, samples):
    """P x K matrix of base-classifier outputs, row ``k`` from tree ``k``."""
    X = _check_samples(samples, forest.n_features)
    return np.stack([tree.predict(X) for tree in forest.trees]).astype(np.int8)


def weighted_majority_vote(base_outputs, weights=None):
    """Sign of the weighted vote per column; a zero sum yields +1.

    ``weights=None`` is the plain (unit weight) majority vote.
    """
    H = check_bipolar(np.atleast_2d(base_outputs), "base_outputs", ndim=2)
    if weights is None:
        total = H.astype(np.int64).sum(axis=0)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != H.shape[0]:
            raise ValueError(f"expected {H.shape[0]} weights, got shape {w.shape}")
        if np.any(w < 0) or not np.any(w > 0):
            raise ValueError("vote weights must be non-negative and not all zero")
        total = w @ H
    return np.where(total >= 0, 1, -1).astype(np.int8)
