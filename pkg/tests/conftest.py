import json

import numpy as np
import pytest

from rcam.data import Dataset


def toy_dataset(n=60, f=3, noise=0.0, seed=0, name="toy"):
    """Gaussian features labelled by the sign of the first one, with a wide margin.

    ``noise`` flips that fraction of labels after the margin is added.
    """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, f))
    y = np.where(X[:, 0] > 0, 1, -1).astype(np.int8)
    X[:, 0] += y
    flip = rng.random(n) < noise
    y[flip] = -y[flip]
    return Dataset(X, y, [f"x{i}" for i in range(f)], "pos", name)


def write_csv(path, dataset):
    lines = [",".join(dataset.feature_names + ["label"])]
    for row, lab in zip(dataset.features, dataset.labels):
        lines.append(",".join(f"{v:.6f}" for v in row) + ("," + ("pos" if lab == 1 else "neg")))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def toy_manifest(tmp_path):
    """Manifest with two readable toy datasets."""
    entries = []
    for i, name in enumerate(["alpha", "beta"]):
        write_csv(tmp_path / f"{name}.csv", toy_dataset(40, 3, noise=0.1 * i, seed=i, name=name))
        entries.append({"name": name, "path": f"{name}.csv", "label_column": "label",
                        "positive_class": "pos"})
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(entries), encoding="utf-8")
    return path


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts, one line per criterion, after the run."""
    lines = []
    for key in ("passed", "failed"):
        for report in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(report, "user_properties", ()) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
