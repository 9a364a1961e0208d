"""Recurrent correlation associative memories with synchronous updates.

The memory stores ``P`` bipolar vectors ``u`` of length ``N`` as the rows of
an int8 matrix.  One synchronous step maps a ternary state ``z`` to

    w_k  = f(<z, u_k> / N)
    a_i  = sum_k w_k u_k[i]
    z'_i = sign(a_i) if a_i != 0 else z_i

and recall iterates the step until the state stops changing.

Exact zeros of ``a`` decide whether a neuron keeps its state, so the
potentials are never formed naively in floating point.  Correlations are
integers; for the identity activation ``N * a`` is an integer too, and for the
exponential activation memories sharing a correlation level are first summed
into integer counts.  ``a_i`` is then zero exactly when every per-level count
vanishes.  These integers are far below 2**53, so they are computed with
float64 BLAS products without any rounding.  The exponential weights are shifted by the largest
correlation before exponentiation; a common positive factor never changes a
sign.
"""

from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_memories, check_ternary


@dataclass(frozen=True)
class Identity:
    """Identity activation; the correlation RCAM (Hopfield with self-feedback)."""

    name = "identity"

    def __call__(self, x):
        return np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class Exponential:
    """Exponential activation ``exp(alpha * x)``."""

    alpha: float = 1.0
    name = "exponential"

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha <= 0:
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha!r}")

    def __call__(self, x):
        return np.exp(self.alpha * np.asarray(x, dtype=np.float64))


ActivationFn = Union[Identity, Exponential]


def make_activation(kind, alpha=1.0):
    if kind in ("identity", "identity_rcam"):
        return Identity()
    if kind in ("exponential", "exp_rcam"):
        return Exponential(float(alpha))
    raise ValueError(f"unknown activation {kind!r}; expected 'identity' or 'exponential'")


@dataclass(frozen=True)
class RecallConfig:
    max_iters: int = 100
    update_mode: str = "synchronous"

    def __post_init__(self):
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if self.update_mode != "synchronous":
            raise ValueError("only synchronous updates are supported")


@dataclass
class RecallResult:
    """Outcome of :func:`recall`.

    ``weights`` are the unscaled activations ``f(<y, u_k> / N)`` at the final
    state. ``changes[t]`` is the number of neurons flipped by step ``t + 1``.
    """

    final_state: np.ndarray
    weights: np.ndarray
    iterations: int
    converged: bool
    changes: List[int] = field(default_factory=list)


def _check_pair(state, memories):
    z = check_ternary(state)
    U = check_memories(memories)
    if z.shape[0] != U.shape[1]:
        raise ValueError(
            f"state length {z.shape[0]} does not match memory length {U.shape[1]}")
    return z, U


def _correlations(z, U):
    # integer inner products <z, u_k>, exact in float64
    return U.astype(np.float64) @ z.astype(np.float64)


def compute_weights(state, memories, f):
    """Weights ``f(<z, u_k> / N)`` of every stored memory for state ``z``."""
    z, U = _check_pair(state, memories)
    return f(_correlations(z, U) / U.shape[1])


def activation_potentials(weights, memories):
    """Weighted sum of the stored memories, one potential per neuron."""
    U = check_memories(memories)
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != U.shape[0]:
        raise ValueError(f"expected {U.shape[0]} weights, got shape {w.shape}")
    return w @ U


def _potential_signs(z, Uf, f):
    # Uf: the memories as float64
    corr = Uf @ z
    n = Uf.shape[1]
    if isinstance(f, Identity):
        return np.sign(corr @ Uf)
    if isinstance(f, Exponential):
        levels, inverse = np.unique(corr, return_inverse=True)
        grouping = np.zeros((levels.shape[0], Uf.shape[0]))
        grouping[inverse, np.arange(Uf.shape[0])] = 1.0
        counts = grouping @ Uf
        scaled = np.exp(f.alpha * (levels - levels[-1]) / n)
        signs = np.sign(scaled @ counts)
        signs[~counts.any(axis=0)] = 0
        return signs
    # any other monotone callable: plain floating-point evaluation
    return np.sign(f(corr / n) @ Uf)


def _step(z, Uf, f):
    signs = _potential_signs(z, Uf, f)
    return np.where(signs != 0, signs, z)


def synchronous_step(state, memories, f):
    """Update every neuron at once; neurons with zero potential keep their value."""
    z, U = _check_pair(state, memories)
    return _step(z.astype(np.float64), U.astype(np.float64), f).astype(np.int8)


def recall(initial, memories, f, config=None):
    """Iterate :func:`synchronous_step` from ``initial`` until a fixed point.

    Hitting ``config.max_iters`` without reaching a fixed point is reported
    through ``converged=False`` rather than raised.
    """
    config = config or RecallConfig()
    z, U = _check_pair(initial, memories)
    z, Uf = z.astype(np.float64), U.astype(np.float64)
    changes = []
    converged = False
    iterations = 0
    while iterations < config.max_iters:
        nxt = _step(z, Uf, f)
        iterations += 1
        changed = int(np.count_nonzero(nxt != z))
        changes.append(changed)
        z = nxt
        if changed == 0:
            converged = True
            break
    weights = f((Uf @ z) / Uf.shape[1])
    return RecallResult(z.astype(np.int8), weights, iterations, converged, changes)


class RecurrentCorrelationMemory(TransformerMixin, BaseEstimator):
    """Estimator wrapper: ``fit`` stores memories, ``transform`` recalls stimuli.

    Parameters
    ----------
    activation : {'exponential', 'identity'}, default='exponential'
    alpha : float, default=1.0
        Exponential gain; ignored by the identity activation.
    max_iter : int, default=100
    """

    def __init__(self, activation="exponential", alpha=1.0, max_iter=100):
        self.activation = activation
        self.alpha = alpha
        self.max_iter = max_iter

    def fit(self, X, y=None):
        self.memories_ = check_memories(X)
        self.activation_ = make_activation(self.activation, self.alpha)
        self.n_features_in_ = self.memories_.shape[1]
        return self

    def recall(self, stimulus):
        check_is_fitted(self, "memories_")
        return recall(stimulus, self.memories_, self.activation_, RecallConfig(self.max_iter))

    def transform(self, X):
        X = np.atleast_2d(np.asarray(X))
        return np.stack([self.recall(row).final_state for row in X])
