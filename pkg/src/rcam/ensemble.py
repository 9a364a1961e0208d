"""Ensemble classification by associative recall over base-classifier outputs.

Each base classifier ``h_k`` contributes one fundamental memory: its outputs on
the M training samples followed by its outputs on the L batch samples.  The
memory is probed with the training targets followed by L zeros; the last L
entries of the recalled fixed point are the batch labels.  At a zero-free fixed
point the memory weights satisfy ``w_k = f(2 * Sim(H, h_k) - 1)`` where ``Sim``
is the agreement rate between the ensemble output and ``h_k`` over all M + L
samples, so the combiner is a weighted majority vote whose weights grow with
agreement.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils import check_random_state
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import check_bipolar, check_memories, to_bipolar_labels
from .forest import ForestConfig, fit_forest, forest_base_outputs, weighted_majority_vote
from .memory import Exponential, Identity, RecallConfig, make_activation, recall

COMBINERS = ("voting", "identity", "exponential")


@dataclass
class EnsembleProblem:
    train_targets: np.ndarray
    train_outputs: np.ndarray
    batch_outputs: np.ndarray

    def __post_init__(self):
        self.train_targets = check_bipolar(self.train_targets, "train_targets", ndim=1)
        self.train_outputs = check_bipolar(np.atleast_2d(self.train_outputs), "train_outputs", ndim=2)
        self.batch_outputs = check_bipolar(np.atleast_2d(self.batch_outputs), "batch_outputs", ndim=2)
        m = self.train_targets.shape[0]
        if m < 1:
            raise ValueError("at least one training sample is required")
        if self.train_outputs.shape[1] != m:
            raise ValueError(
                f"train_outputs has {self.train_outputs.shape[1]} columns for {m} training targets")
        if self.batch_outputs.shape[1] < 1:
            raise ValueError("the batch must contain at least one sample")
        if self.train_outputs.shape[0] != self.batch_outputs.shape[0]:
            raise ValueError("train_outputs and batch_outputs disagree on the number of classifiers")

    @property
    def n_train(self):
        return self.train_targets.shape[0]

    @property
    def n_batch(self):
        return self.batch_outputs.shape[1]


@dataclass
class EnsemblePrediction:
    batch_labels: np.ndarray
    recalled_state: np.ndarray
    weights: np.ndarray
    iterations: int
    converged: bool
    changes: List[int] = field(default_factory=list)


def build_memories(problem):
    """Concatenate every classifier's training and batch outputs into one memory."""
    return np.hstack([problem.train_outputs, problem.batch_outputs]).astype(np.int8)


def build_stimulus(train_targets, n_batch):
    """Probe vector: training targets followed by ``n_batch`` neutral zeros."""
    d = check_bipolar(train_targets, "train_targets", ndim=1)
    if d.shape[0] < 1 or int(n_batch) < 1:
        raise ValueError("need at least one training target and one batch sample")
    return np.concatenate([d, np.zeros(int(n_batch), dtype=np.int8)])


def classify_batch(problem, f, config=None):
    """Label a whole batch by recall; positions left at zero resolve to +1."""
    memories = build_memories(problem)
    result = recall(build_stimulus(problem.train_targets, problem.n_batch), memories, f, config)
    tail = result.final_state[problem.n_train:]
    labels = np.where(tail == 0, 1, tail).astype(np.int8)
    return EnsemblePrediction(labels, result.final_state, result.weights,
                              result.iterations, result.converged, result.changes)


def classifier_similarity(a_outputs, b_outputs):
    """Fraction of samples on which two bipolar output vectors agree."""
    a = check_bipolar(a_outputs, "a_outputs", ndim=1)
    b = check_bipolar(b_outputs, "b_outputs", ndim=1)
    if a.shape != b.shape or a.size == 0:
        raise ValueError("output vectors must be non-empty and of equal length")
    return float(np.count_nonzero(a == b)) / a.shape[0]


def verify_weight_identity(prediction, memories, f, printed_form=False):
    """Absolute residuals ``|w_k - f(2 * Sim(y, u_k) - 1)|`` at the fixed point.

    ``printed_form=True`` checks ``f(1 - 2 * Sim)`` instead; that variant has
    the wrong sign and is kept only to show that it fails.
    """
    y = np.asarray(prediction.recalled_state)
    if np.any(y == 0):
        raise ValueError(
            f"recalled state has {int(np.count_nonzero(y == 0))} zero entries; "
            "similarity is only defined for bipolar outputs")
    U = check_memories(memories)
    sims = np.array([classifier_similarity(y, u) for u in U])
    arg = 1.0 - 2.0 * sims if printed_form else 2.0 * sims - 1.0
    return np.abs(np.asarray(prediction.weights, dtype=np.float64) - f(arg))


def combine(combiner, train_targets, train_outputs, batch_outputs, alpha=1.0, max_iter=100):
    """Batch labels from precomputed base outputs for any supported combiner."""
    if combiner == "voting":
        return weighted_majority_vote(batch_outputs)
    problem = EnsembleProblem(train_targets, train_outputs, batch_outputs)
    return classify_batch(problem, make_activation(combiner, alpha), RecallConfig(max_iter)).batch_labels


class RCAMEnsembleClassifier(ClassifierMixin, BaseEstimator):
    """Random forest whose trees are combined by associative recall.

    ``predict`` is transductive: the rows passed in one call form a single
    batch and are labelled jointly, so a sample's label may depend on the
    other samples in its batch.

    Parameters
    ----------
    n_estimators : int, default=30
        Number of bagged trees.
    combiner : {'exponential', 'identity', 'voting'}, default='exponential'
        Recall activation, or plain majority voting over the same trees.
    alpha : float, default=1.0
        Gain of the exponential activation.
    max_features : int or None, default=None
        Features tried per split; None means ``floor(sqrt(n_features))``.
    min_samples_split : int, default=2
    max_depth : int or None, default=None
    max_iter : int, default=100
        Cap on synchronous recall steps.
    random_state : int, RandomState or None, default=None
    n_jobs : int or None, default=None
        Worker processes used to fit trees.

    Attributes
    ----------
    classes_ : ndarray of shape (2,)
        ``classes_[1]`` is encoded as +1.
    forest_ : Forest
    train_outputs_ : ndarray of shape (n_estimators, n_train)
    last_recall_ : EnsemblePrediction or None
        Recall details of the most recent ``predict`` call.
    """

    def __init__(self, n_estimators=30, combiner="exponential", alpha=1.0,
                 max_features=None, min_samples_split=2, max_depth=None,
                 max_iter=100, random_state=None, n_jobs=None):
        self.n_estimators = n_estimators
        self.combiner = combiner
        self.alpha = alpha
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.max_depth = max_depth
        self.max_iter = max_iter
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _activation(self):
        if self.combiner not in COMBINERS:
            raise ValueError(f"combiner must be one of {COMBINERS}, got {self.combiner!r}")
        if self.combiner == "voting":
            return None
        return Identity() if self.combiner == "identity" else Exponential(float(self.alpha))

    def fit(self, X, y):
        self._activation()
        X, y = validate_data(self, X, y, dtype=np.float64)
        check_classification_targets(y)
        self.classes_ = np.unique(y)
        if self.classes_.shape[0] != 2:
            raise ValueError(f"binary targets required, got {self.classes_.shape[0]} classes")
        targets = to_bipolar_labels(y, self.classes_)
        seed = self.random_state
        if not isinstance(seed, (int, np.integer)):
            seed = int(check_random_state(seed).randint(np.iinfo(np.int32).max))
        config = ForestConfig(self.n_estimators, self.max_features, self.min_samples_split,
                              self.max_depth, int(seed))
        self.forest_ = fit_forest(X, targets, config, n_jobs=self.n_jobs)
        self.train_targets_ = targets
        self.train_outputs_ = forest_base_outputs(self.forest_, X)
        self.last_recall_ = None
        return self

    def predict_bipolar(self, X):
        check_is_fitted(self, "forest_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        batch = forest_base_outputs(self.forest_, X)
        f = self._activation()
        if f is None:
            self.last_recall_ = None
            return weighted_majority_vote(batch)
        problem = EnsembleProblem(self.train_targets_, self.train_outputs_, batch)
        self.last_recall_ = classify_batch(problem, f, RecallConfig(self.max_iter))
        return self.last_recall_.batch_labels

    def predict(self, X):
        check_is_fitted(self, "forest_")
        return self.classes_[(self.predict_bipolar(X) == 1).astype(np.int64)]
