"""Input validation helpers shared by the estimators and functional API."""

import numpy as np


def check_bipolar(values, name="values", ndim=None):
    """Return ``values`` as an int8 array, raising if any entry is not +/-1."""
    arr = np.asarray(values)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"{name} must contain only -1 and +1")
    return arr.astype(np.int8, copy=False)


def check_ternary(values, name="state"):
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have length >= 1")
    if not np.all((arr == 1) | (arr == -1) | (arr == 0)):
        raise ValueError(f"{name} entries must lie in {{-1, 0, +1}}")
    return arr.astype(np.int8, copy=False)


def check_memories(memories):
    """Validate a fundamental memory set given as a P x N array of +/-1."""
    arr = check_bipolar(np.atleast_2d(memories), "memories", ndim=2)
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"memories must hold P >= 1 vectors of length N >= 1, got {arr.shape}")
    return arr


def check_same_length(a, b, what):
    if len(a) != len(b):
        raise ValueError(f"{what}: length mismatch ({len(a)} != {len(b)})")


def to_bipolar_labels(y, classes):
    """Map a binary label vector onto {-1, +1}; ``classes[1]`` becomes +1."""
    y = np.asarray(y)
    out = np.where(y == classes[1], 1, -1).astype(np.int8)
    if not np.all((y == classes[0]) | (y == classes[1])):
        raise ValueError("y contains labels outside the fitted classes")
    return out
