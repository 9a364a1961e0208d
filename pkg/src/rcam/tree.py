"""CART decision trees for bipolar labels with Gini impurity splits."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_bipolar

_EPS = 1e-12


@dataclass(frozen=True)
class TreeParams:
    max_features: Optional[int] = None
    min_samples_split: int = 2
    max_depth: Optional[int] = None


@dataclass
class DecisionTree:
    """Flat array representation of a fitted binary tree.

    Node 0 is the root. ``feature[i] == -1`` marks a leaf; internal nodes send
    ``x[feature] <= threshold`` to ``left`` and everything else to ``right``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray
    n_features: int

    @property
    def n_nodes(self):
        return int(self.feature.shape[0])

    @property
    def n_leaves(self):
        return int(np.count_nonzero(self.feature < 0))

    @property
    def depth(self):
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X):
        """Index of the leaf reached by every row of ``X``."""
        X = _check_samples(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.nonzero(self.feature[node] >= 0)[0]
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict(self, X):
        return self.label[self.apply(X)]

    def to_dict(self, node=0):
        if self.feature[node] < 0:
            return {"label": int(self.label[node])}
        return {
            "feature": int(self.feature[node]),
            "threshold": float(self.threshold[node]),
            "left": self.to_dict(int(self.left[node])),
            "right": self.to_dict(int(self.right[node])),
        }

    @classmethod
    def from_dict(cls, tree, n_features):
        rows = []

        def visit(d):
            i = len(rows)
            rows.append(None)
            if "label" in d:
                rows[i] = (-1, np.nan, -1, -1, int(d["label"]))
            else:
                left = visit(d["left"])
                right = visit(d["right"])
                rows[i] = (int(d["feature"]), float(d["threshold"]), left, right, 0)
            return i

        visit(tree)
        f, t, l, r, lab = zip(*rows)
        return cls(np.array(f), np.array(t), np.array(l), np.array(r),
                   np.array(lab, dtype=np.int8), int(n_features))


def _check_samples(X, n_features):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ValueError(f"expected samples with {n_features} features, got shape {X.shape}")
    return X


def _best_split_on(col, pos, n_pos):
    """Best Gini split of one feature column; returns (score, threshold) or None.

    ``score`` is the size-weighted child impurity up to a constant factor:
    ``sum over children of pos * neg / size``.
    """
    order = np.argsort(col, kind="stable")
    v = col[order]
    valid = v[1:] > v[:-1]
    if not valid.any():
        return None
    n = v.shape[0]
    left_pos = np.cumsum(pos[order])[:-1]
    n_left = np.arange(1, n)
    n_right = n - n_left
    right_pos = n_pos - left_pos
    score = (left_pos * (n_left - left_pos) / n_left
             + right_pos * (n_right - right_pos) / n_right)
    score[~valid] = np.inf
    k = int(np.argmin(score))
    lo, hi = v[k], v[k + 1]
    threshold = lo / 2.0 + hi / 2.0
    if not lo < threshold < hi:
        threshold = lo
    return float(score[k]), threshold


def fit_tree(features, labels, params=None, rng=None):
    """Grow a CART tree by greedy Gini splitting.

    At every node the features are visited in a fresh random order. The first
    ``max_features`` non-constant ones are always evaluated; if none of them
    decreases the impurity the remaining features are visited until one does.
    A node becomes a leaf when it is pure, has fewer than ``min_samples_split``
    samples, sits at ``max_depth``, or no feature decreases its impurity.
    Leaf labels are the majority class, ties going to +1.
    """
    params = params or TreeParams()
    rng = np.random.default_rng(rng)
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"features must be a non-empty 2-d array, got shape {X.shape}")
    y = check_bipolar(labels, "labels", ndim=1)
    if y.shape[0] != X.shape[0]:
        raise ValueError("features and labels disagree on the number of samples")

    n_features = X.shape[1]
    max_features = params.max_features or max(1, int(np.sqrt(n_features)))
    if not 1 <= max_features <= n_features:
        raise ValueError(f"max_features must be in [1, {n_features}], got {max_features}")

    pos_all = (y == 1).astype(np.float64)
    feature, threshold, left, right, label = [], [], [], [], []

    def new_node(n_pos, n):
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        label.append(1 if 2 * n_pos >= n else -1)
        return len(feature) - 1

    root_idx = np.arange(X.shape[0])
    stack = [(new_node(pos_all.sum(), X.shape[0]), root_idx, 0)]
    while stack:
        node, idx, depth = stack.pop()
        n = idx.shape[0]
        pos = pos_all[idx]
        n_pos = pos.sum()
        if n_pos == 0 or n_pos == n or n < params.min_samples_split:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue

        parent = n_pos * (n - n_pos) / n
        best_score, best = parent - _EPS * max(1.0, parent), None
        visited = 0
        for j in rng.permutation(n_features):
            if visited >= max_features and best is not None:
                break
            found = _best_split_on(X[idx, j], pos, n_pos)
            if found is None:
                continue
            visited += 1
            if found[0] < best_score:
                best_score, best = found[0], (int(j), found[1])
        if best is None:
            continue

        j, thr = best
        goes_left = X[idx, j] <= thr
        li, ri = idx[goes_left], idx[~goes_left]
        feature[node], threshold[node] = j, thr
        left[node] = new_node(pos_all[li].sum(), li.shape[0])
        right[node] = new_node(pos_all[ri].sum(), ri.shape[0])
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return DecisionTree(
        np.array(feature, dtype=np.int64), np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
        np.array(label, dtype=np.int8), n_features)


def predict_tree(tree, sample):
    """Label (+1/-1) of a single sample."""
    sample = np.asarray(sample, dtype=np.float64)
    if sample.ndim != 1:
        raise ValueError("predict_tree expects a single 1-d sample")
    return int(tree.predict(sample)[0])
