#!/usr/bin/env python3
"""Plot mean SLNR and SNR versus the number of faulty elements from sweep.csv."""
import argparse
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

LABELS = {"baseline": "Baseline", "naive": "Naive max-SNR",
          "max_slnr": "Max SLNR", "robust": "Max avg SLNR (partial CSI)"}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", help="sweep.csv")
    ap.add_argument("--out", default="sweep.png")
    args = ap.parse_args()

    series = defaultdict(list)
    with open(args.csv) as f:
        for row in csv.DictReader(f):
            series[row["method"]].append((int(row["fault_count"]),
                                          float(row["mean_slnr_db"]),
                                          float(row["mean_snr_db"])))
    fig, (ax_slnr, ax_snr) = plt.subplots(1, 2, figsize=(9, 3.5))
    for method, rows in series.items():
        rows.sort()
        b = [r[0] for r in rows]
        ax_slnr.plot(b, [r[1] for r in rows], marker="o", label=LABELS.get(method, method))
        ax_snr.plot(b, [r[2] for r in rows], marker="o", label=LABELS.get(method, method))
    ax_slnr.set_xlabel("faulty elements")
    ax_slnr.set_ylabel("mean SLNR [dB]")
    ax_snr.set_xlabel("faulty elements")
    ax_snr.set_ylabel("mean SNR [dB]")
    ax_slnr.legend(fontsize=8)
    for ax in (ax_slnr, ax_snr):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
