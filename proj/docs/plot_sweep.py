#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Plot delay against energy for every plan in a sweep.

    offsim sweep -o sweep.csv
    python3 docs/plot_sweep.py sweep.csv front.png
"""
import csv
import sys

import matplotlib.pyplot as plt


def main(src, dst):
    with open(src, newline="") as f:
        rows = list(csv.DictReader(f))
    fig, ax = plt.subplots(figsize=(6, 4))
    for exit_ in sorted({r["exit"] for r in rows}, key=int):
        sub = [r for r in rows if r["exit"] == exit_]
        ax.scatter([float(r["t_total_ms"]) for r in sub], [float(r["e_total_j"]) for r in sub], label=f"exit {exit_}")
        for r in sub:
            ax.annotate(r["split"], (float(r["t_total_ms"]), float(r["e_total_j"])), fontsize=7)
    ax.set_xlabel("total delay [ms]")
    ax.set_ylabel("device energy [J]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
