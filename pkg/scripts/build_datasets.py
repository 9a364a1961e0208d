"""Write the benchmark CSVs under ``data/``.

* monks-2: the complete MONK's problem 2 attribute space (432 rows), labelled
  ``1`` when exactly two attributes take their first value.
* tic-tac-toe: the UCI endgame table, copied from the ``keel-ds`` wheel
  (``pip download --no-deps keel-ds``); pass the wheel path as argument.
* banknote: converted from the UCI ``data_banknote_authentication.txt`` file
  when its path is given with ``--banknote``.

Usage::

    python scripts/build_datasets.py --keel-wheel keel_ds-0.2.5-py3-none-any.whl \
        [--banknote data_banknote_authentication.txt]
"""

import argparse
import csv
import itertools
import zipfile
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"
MONKS_DOMAINS = (3, 3, 2, 3, 4, 2)
TTT_COLUMNS = [
    "top-left", "top-middle", "top-right",
    "middle-left", "middle-middle", "middle-right",
    "bottom-left", "bottom-middle", "bottom-right",
]


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def build_monks2():
    rows = []
    for attrs in itertools.product(*(range(1, k + 1) for k in MONKS_DOMAINS)):
        label = int(sum(a == 1 for a in attrs) == 2)
        rows.append([*attrs, label])
    write_csv(DATA / "monks-2.csv", [f"a{i}" for i in range(1, 7)] + ["class"], rows)


def build_tictactoe(wheel):
    with zipfile.ZipFile(wheel) as zf:
        text = zf.read("keel_ds/data/balanced/raw/tic-tac-toe.dat").decode()
    rows = [[v.strip() for v in line.split(",")] for line in text.splitlines() if line.strip()]
    write_csv(DATA / "tic-tac-toe.csv", TTT_COLUMNS + ["class"], rows)


def build_banknote(path):
    rows = [line.strip().split(",") for line in open(path, encoding="utf-8") if line.strip()]
    write_csv(DATA / "banknote.csv", ["variance", "skewness", "curtosis", "entropy", "class"], rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--keel-wheel", type=Path)
    parser.add_argument("--banknote", type=Path)
    args = parser.parse_args()
    DATA.mkdir(exist_ok=True)
    build_monks2()
    if args.keel_wheel:
        build_tictactoe(args.keel_wheel)
    if args.banknote:
        build_banknote(args.banknote)


if __name__ == "__main__":
    main()
