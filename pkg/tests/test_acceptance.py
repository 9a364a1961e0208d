"""Acceptance gate: one test, and one PASS/FAIL line, per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``; the verdict lines are also
repeated in the terminal summary.
"""

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from oracles import naive_trajectory, naive_weights, random_ensemble, random_instance, weights_as_float
from rcam.cli import main as cli_main
from rcam.data import DatasetError, find_entry, load_entry, load_manifest
from rcam.ensemble import (EnsembleProblem, build_memories, classify_batch, verify_weight_identity)
from rcam.evaluation import EvalConfig, cross_validate, f_measure, summarize
from rcam.forest import weighted_majority_vote
from rcam.memory import Exponential, Identity, recall, synchronous_step

MANIFEST = Path(__file__).resolve().parents[1] / "data" / "manifest.json"
ACTIVATIONS = {"identity": Identity(), "exp(0.5)": Exponential(0.5),
               "exp(1)": Exponential(1.0), "exp(5)": Exponential(5.0)}


@pytest.fixture
def verdict(record_property):
    def emit(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        print("\n" + line)
        record_property("acceptance", line)
        assert bool(ok), line
    return emit


def _sweep():
    """Randomized ensemble instances, recalled under every activation (cached)."""
    if not hasattr(_sweep, "cache"):
        rng = np.random.default_rng(20240601)
        out = {name: [] for name in ACTIVATIONS}
        start = time.perf_counter()
        for name, f in ACTIVATIONS.items():
            zero_free = 0
            while zero_free < 1000:
                problem = EnsembleProblem(*random_ensemble(rng, max_p=20, min_n=5, max_n=60))
                pred = classify_batch(problem, f)
                residual = None
                if not np.any(pred.recalled_state == 0):
                    residual = verify_weight_identity(pred, build_memories(problem), f).max()
                    zero_free += 1
                out[name].append((pred, residual))
        _sweep.cache = out, time.perf_counter() - start
    return _sweep.cache


def test_criterion_1_weight_identity(verdict):
    sweep, elapsed = _sweep()
    worst = {name: max(r for _, r in runs if r is not None) for name, runs in sweep.items()}
    counts = {name: sum(r is not None for _, r in runs) for name, runs in sweep.items()}

    witness = EnsembleProblem([1, -1], [[1, -1], [1, 1]], [[-1], [1]])
    pred = classify_batch(witness, Identity())
    memories = build_memories(witness)
    exact = (pred.weights.tolist() == [1.0, -1 / 3]
             and pred.batch_labels.tolist() == [-1])
    corrected = verify_weight_identity(pred, memories, Identity()).max()
    printed = verify_weight_identity(pred, memories, Identity(), printed_form=True).max()

    ok = (all(c >= 1000 for c in counts.values()) and all(w <= 1e-9 for w in worst.values())
          and elapsed < 30 and exact and corrected <= 1e-9 and printed > 1e-9)
    detail = ", ".join(f"{n} max {worst[n]:.1e} over {counts[n]}" for n in ACTIVATIONS)
    verdict(1, ok, f"{detail}; {elapsed:.1f}s; witness w={pred.weights.tolist()} "
                   f"label={pred.batch_labels.tolist()}, printed-form residual {printed:.3f}")


def test_criterion_2_convergence(verdict):
    sweep, _ = _sweep()
    preds = [p for runs in sweep.values() for p, _ in runs]
    converged = sum(p.converged and p.iterations <= 100 for p in preds)
    median = float(np.median([p.iterations for p in preds]))
    verdict(2, converged == len(preds) and median <= 10,
            f"{converged}/{len(preds)} converged, median iterations {median:g}")


def test_criterion_3_oracle_equivalence(verdict):
    rng = np.random.default_rng(7)
    kinds = [("identity", 1.0), ("exponential", 0.5), ("exponential", 1.0), ("exponential", 5.0)]
    mismatches, worst, n = 0, 0.0, 500
    for i in range(n):
        kind, alpha = kinds[i % 4]
        f = Identity() if kind == "identity" else Exponential(alpha)
        memories, z0 = random_instance(rng, max_p=20, min_n=5, max_n=60)
        expected = naive_trajectory(z0, memories, kind, alpha)
        z, ours = z0, [z0.tolist()]
        while len(ours) < len(expected):
            z = synchronous_step(z, memories, f)
            ours.append(z.tolist())
        res = recall(z0, memories, f)
        ref = weights_as_float(naive_weights(expected[-1], memories, kind, alpha))
        worst = max(worst, float(np.max(np.abs(res.weights - ref) / np.maximum(1.0, np.abs(ref)))))
        if ours != expected or res.final_state.tolist() != expected[-1]:
            mismatches += 1
    verdict(3, mismatches == 0 and worst <= 1e-12,
            f"{n - mismatches}/{n} trajectories identical, max weight deviation {worst:.1e}")


def test_criterion_4_reductions(verdict):
    rng = np.random.default_rng(11)
    single = identical = 0
    for _ in range(200):
        d, tr, ba = random_ensemble(rng, max_p=1)
        alpha = float(rng.choice([0.5, 1.0, 5.0]))
        pred = classify_batch(EnsembleProblem(d, tr, ba), Exponential(alpha))
        single += pred.batch_labels.tolist() == ba[0].tolist()
        p = int(rng.integers(2, 21))
        pred = classify_batch(EnsembleProblem(d, np.repeat(tr, p, 0), np.repeat(ba, p, 0)),
                              Exponential(alpha))
        identical += pred.batch_labels.tolist() == ba[0].tolist()
    verdict(4, single == 200 and identical == 200,
            f"P=1 {single}/200, identical classifiers {identical}/200")


def test_criterion_5_majority_vote(verdict):
    checked = bad = 0
    for p in range(1, 11):
        columns = np.array(list(itertools.product([-1, 1], repeat=p)), dtype=np.int8).T
        got = weighted_majority_vote(columns)
        for c in range(columns.shape[1]):
            col = columns[:, c]
            if col.sum() == 0:
                continue
            # hard voting: the class with the most supporting classifiers
            argmax = max((-1, 1), key=lambda lab: np.count_nonzero(col == lab))
            checked += 1
            bad += int(got[c] != argmax)
    verdict(5, bad == 0, f"{checked - bad}/{checked} non-tied columns agree for P=1..10")


def _load(name):
    try:
        return load_entry(find_entry(load_manifest(MANIFEST), name)), None
    except DatasetError as exc:
        return None, str(exc)


@pytest.mark.slow
def test_criterion_6_desk_reproduction(verdict):
    start = time.perf_counter()
    seeds = (0, 1, 2)
    plans = {"banknote": ["voting", "exp_rcam"],
             "tic-tac-toe": ["voting", "exp_rcam_gs"],
             "monks-2": ["voting", "exp_rcam_gs"]}
    means, errors = {}, {}
    for name, methods in plans.items():
        dataset, err = _load(name)
        if dataset is None:
            errors[name] = err
            continue
        per_seed = [summarize(cross_validate(dataset, methods, EvalConfig(seed=s)))
                    for s in seeds]
        means[name] = {m: 100 * float(np.mean([s[m][0] for s in per_seed])) for m in methods}
    elapsed = time.perf_counter() - start

    parts = []
    if "banknote" in means:
        v, e = means["banknote"]["voting"], means["banknote"]["exp_rcam"]
        parts.append((abs(v - 99.3) <= 2.0 and abs(e - 99.2) <= 2.0,
                      f"banknote voting {v:.1f} (99.3±2), exp {e:.1f} (99.2±2)"))
    else:
        parts.append((False, f"banknote unavailable ({errors['banknote']}); "
                             "run scripts/build_datasets.py --banknote <uci txt>"))
    for name, bound, text in (("tic-tac-toe", -1.0, ">= -1.0"), ("monks-2", 3.0, ">= 3.0")):
        if name not in means:
            parts.append((False, f"{name} unavailable ({errors[name]})"))
            continue
        v, g = means[name]["voting"], means[name]["exp_rcam_gs"]
        parts.append((g - v >= bound, f"{name} gs {g:.1f} - voting {v:.1f} = {g - v:+.2f} ({text})"))
    ok = all(p for p, _ in parts) and elapsed < 600
    verdict(6, ok, "; ".join(("ok " if p else "MISS ") + t for p, t in parts) + f"; {elapsed:.0f}s")


def test_criterion_7_f_measure(verdict):
    cases = [(f_measure([1, -1, 1], [1, -1, 1]), 1.0),
             (f_measure([-1, -1, -1], [-1, -1, -1]), 0.0),
             (f_measure([1, 1, 1, -1, -1], [1, 1, -1, 1, -1]), 2 / 3)]
    verdict(7, all(got == want for got, want in cases),
            "values " + ", ".join(f"{got:.6f}" for got, _ in cases))


def _available():
    names = []
    for entry in load_manifest(MANIFEST):
        if entry.path.exists():
            names.append(entry.name)
    return names


@pytest.mark.slow
def test_criterion_8_bench_determinism(verdict, tmp_path):
    names = ",".join(_available())
    flags = ["bench", "--manifest", str(MANIFEST), "--datasets", names, "--seed", "3",
             "--trees", "10", "--folds", "5", "--inner-folds", "3"]
    codes = [cli_main(flags + ["--out", str(tmp_path / "a")]),
             cli_main(flags + ["--out", str(tmp_path / "b"), "--jobs", "3"])]
    a = (tmp_path / "a" / "report.csv").read_bytes()
    b = (tmp_path / "b" / "report.csv").read_bytes()
    verdict(8, codes == [0, 0] and a == b and len(a.splitlines()) > 1,
            f"datasets {names}; sequential vs --jobs 3 CSV {'identical' if a == b else 'DIFFER'}")


@pytest.mark.slow
def test_criterion_9_timing(verdict, tmp_path):
    names = ",".join(_available())
    code = cli_main(["bench", "--manifest", str(MANIFEST), "--datasets", names,
                     "--methods", "voting,exp_rcam", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "report.json").read_text())
    ratios = {ds: report["table"][ds]["exp_rcam"]["predict_ms_mean"]
              / report["table"][ds]["voting"]["predict_ms_mean"] for ds in report["datasets"]}
    verdict(9, code == 0 and ratios and all(r <= 100 for r in ratios.values()),
            ", ".join(f"{ds} exp/voting {r:.1f}x" for ds, r in ratios.items()) + " (bound 100x)")
