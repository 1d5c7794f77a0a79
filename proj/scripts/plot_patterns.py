#!/usr/bin/env python3
"""Bar chart of mean SLNR per fault pattern from patterns.csv."""
import argparse
import csv
from collections import defaultdict

import matplotlib.pyplot as plt
import numpy as np

ORDER = ["quadrant", "uniform", "top_rows", "left_columns"]
METHODS = ["baseline", "naive", "max_slnr", "robust"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", help="patterns.csv")
    ap.add_argument("--out", default="patterns.png")
    args = ap.parse_args()

    data = defaultdict(dict)
    with open(args.csv) as f:
        for row in csv.DictReader(f):
            data[row["method"]][row["pattern"]] = float(row["mean_slnr_db"])

    x = np.arange(len(ORDER))
    width = 0.2
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, method in enumerate(METHODS):
        vals = [data[method].get(p, np.nan) for p in ORDER]
        ax.bar(x + (i - 1.5) * width, vals, width, label=method)
    ax.set_xticks(x, ORDER)
    ax.set_ylabel("mean SLNR [dB]")
    ax.grid(alpha=0.3, axis="y")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
