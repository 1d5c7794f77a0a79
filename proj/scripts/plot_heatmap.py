#!/usr/bin/env python3
"""Render heatmap.csv (received power in dBm) with fault_mask.csv markers."""
import argparse
import csv

import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", help="heatmap.csv")
    ap.add_argument("--mask", help="fault_mask.csv", default=None)
    ap.add_argument("--out", default="heatmap.png")
    args = ap.parse_args()

    xs, ys, ps = [], [], []
    with open(args.csv) as f:
        for row in csv.DictReader(f):
            xs.append(float(row["x_m"]))
            ys.append(float(row["y_m"]))
            ps.append(float(row["power_dbm"]))
    n = int(round(len(ps) ** 0.5))
    grid = np.array(ps).reshape(n, n)

    fig, axes = plt.subplots(1, 2 if args.mask else 1, figsize=(9 if args.mask else 5, 4))
    ax = axes[0] if args.mask else axes
    im = ax.imshow(grid, origin="lower",
                   extent=[min(xs), max(xs), min(ys), max(ys)], cmap="inferno")
    ax.set_xlabel("x - x_UE [m]")
    ax.set_ylabel("y - y_UE [m]")
    fig.colorbar(im, ax=ax, label="received power [dBm]")

    if args.mask:
        mask = {}
        with open(args.mask) as f:
            for row in csv.DictReader(f):
                mask[(int(row["ix"]), int(row["iy"]))] = int(row["faulty"])
        nx = max(k[0] for k in mask) + 1
        ny = max(k[1] for k in mask) + 1
        m = np.zeros((ny, nx))
        for (ix, iy), v in mask.items():
            m[iy, ix] = v
        axes[1].imshow(m, origin="lower", cmap="Reds", vmin=0, vmax=1)
        axes[1].set_title("faulty elements")
        axes[1].set_xlabel("ix")
        axes[1].set_ylabel("iy")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
