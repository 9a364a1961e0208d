"""CSV ingestion, imputation, standardisation and stratified fold splitting."""

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import check_bipolar

MISSING = ("", "?")


class DatasetError(ValueError):
    """The dataset could not be read or parsed."""


class DegenerateDatasetError(DatasetError):
    """The dataset is readable but unusable for binary stratified evaluation."""


@dataclass(frozen=True)
class Dataset:
    """Encoded binary classification data; ``NaN`` marks a missing cell."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: List[str]
    positive_class_name: str
    name: str = ""

    @property
    def n_samples(self):
        return self.features.shape[0]


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    path: Path
    label_column: str
    positive_class: str


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        return None


def load_csv_dataset(path, label_column, positive_class, name=""):
    """Read a headed UTF-8 CSV into a :class:`Dataset`.

    Numeric columns are parsed as floats. Any other column is one-hot encoded
    with one indicator per distinct value (sorted); a missing categorical cell
    becomes ``NaN`` in all of its indicators. The label becomes +1 for
    ``positive_class`` and -1 for the other value.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise DatasetError(f"{path}: no data rows")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DatasetError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
    if label_column not in header:
        raise DatasetError(f"{path}: label column {label_column!r} not found")

    label_idx = header.index(label_column)
    raw_labels = [row[label_idx].strip() for row in body]
    if any(v in MISSING for v in raw_labels):
        raise DatasetError(f"{path}: missing label values")
    distinct = sorted(set(raw_labels))
    if len(distinct) != 2:
        raise DegenerateDatasetError(
            f"{path}: binary labels required, found {len(distinct)} distinct values")
    if positive_class not in distinct:
        raise DatasetError(f"{path}: positive class {positive_class!r} not among {distinct}")
    labels = np.array([1 if v == positive_class else -1 for v in raw_labels], dtype=np.int8)

    columns, names = [], []
    for j, col_name in enumerate(header):
        if j == label_idx:
            continue
        cells = [row[j].strip() for row in body]
        observed = [c for c in cells if c not in MISSING]
        parsed = [_parse_float(c) for c in observed]
        if all(p is not None for p in parsed):
            columns.append(np.array([np.nan if c in MISSING else float(c) for c in cells]))
            names.append(col_name)
            continue
        for value in sorted(set(observed)):
            columns.append(np.array([np.nan if c in MISSING else float(c == value) for c in cells]))
            names.append(f"{col_name}={value}")
    features = np.column_stack(columns) if columns else np.empty((len(body), 0))
    return Dataset(features, labels, names, positive_class, name or path.stem)


def impute_missing(dataset):
    """Replace ``NaN`` cells by their column mean over the whole dataset.

    Columns with no observed value are filled with 0.
    """
    X = dataset.features
    missing = np.isnan(X)
    if not missing.any():
        return dataset
    counts = (~missing).sum(axis=0)
    sums = np.where(missing, 0.0, X).sum(axis=0)
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    return replace(dataset, features=np.where(missing, means, X))


class Standardizer(TransformerMixin, BaseEstimator):
    """Per-feature ``(x - mean) / std`` with population std; a zero std becomes 1."""

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return (X - self.mean_) / self.scale_


def fit_apply_standardizer(train_rows, other_rows):
    train_rows = np.asarray(train_rows, dtype=np.float64)
    if train_rows.ndim != 2 or train_rows.shape[0] == 0:
        raise ValueError("train_rows must be a non-empty 2-d array")
    scaler = Standardizer().fit(train_rows)
    return scaler, scaler.transform(train_rows), scaler.transform(other_rows)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray

    def split(self):
        """Yield ``(train_index, test_index)`` for every fold in order."""
        for fold in range(self.k):
            test = self.assignments == fold
            yield np.nonzero(~test)[0], np.nonzero(test)[0]


def stratified_kfold_split(labels, k, seed=0):
    """Assign each sample to one of ``k`` folds, stratified by class.

    Members of each class are shuffled with a generator seeded by ``seed`` and
    dealt round-robin; the deal continues across classes so fold sizes differ
    by at most one.
    """
    y = check_bipolar(labels, "labels", ndim=1)
    k = int(k)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    assignments = np.empty(y.shape[0], dtype=np.int64)
    offset = 0
    for cls in (-1, 1):
        members = np.nonzero(y == cls)[0]
        if members.shape[0] < k:
            raise DegenerateDatasetError(
                f"class {cls:+d} has {members.shape[0]} samples, fewer than k={k} folds")
        members = rng.permutation(members)
        assignments[members] = (offset + np.arange(members.shape[0])) % k
        offset = (offset + members.shape[0]) % k
    return FoldPlan(k, assignments)


class StratifiedRoundRobinKFold:
    """scikit-learn style splitter around :func:`stratified_kfold_split`.

    Labels are mapped onto {-1, +1} by sorted order before splitting.
    """

    def __init__(self, n_splits=10, random_state=0):
        self.n_splits = n_splits
        self.random_state = random_state

    def get_n_splits(self, X=None, y=None, groups=None):
        return self.n_splits

    def split(self, X, y, groups=None):
        y = np.asarray(y)
        classes = np.unique(y)
        if classes.shape[0] != 2:
            raise ValueError("StratifiedRoundRobinKFold needs binary targets")
        bipolar = np.where(y == classes[1], 1, -1)
        yield from stratified_kfold_split(bipolar, self.n_splits, self.random_state).split()


def load_manifest(path):
    """Parse a JSON list of ``{name, path, label_column, positive_class}``.

    Relative dataset paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DatasetError(f"cannot read manifest {path}: {exc}") from exc
    if isinstance(entries, dict):
        entries = entries.get("datasets", [])
    out = []
    for item in entries:
        try:
            data_path = Path(item["path"])
            if not data_path.is_absolute():
                data_path = path.parent / data_path
            out.append(ManifestEntry(str(item["name"]), data_path,
                                     str(item["label_column"]), str(item["positive_class"])))
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"malformed manifest entry {item!r}") from exc
    return out


def find_entry(entries, name):
    for entry in entries:
        if entry.name == name:
            return entry
    raise DatasetError(f"dataset {name!r} not in manifest")


def load_entry(entry):
    """Load and impute one manifest dataset."""
    return impute_missing(load_csv_dataset(entry.path, entry.label_column,
                                           entry.positive_class, entry.name))
