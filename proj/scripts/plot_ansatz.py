#!/usr/bin/env python3
"""Plot the analytic loss trade-off curves produced by `forge reproduce fig10`.

Usage: plot_ansatz.py ansatz.csv [out.png]
"""
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    rows = []
    with open(sys.argv[1]) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("eta,"):
                continue
            eta, L, y = line.strip().split(",")
            rows.append((float(eta), int(L), float(y)))
    out = sys.argv[2] if len(sys.argv) > 2 else "ansatz.png"
    by_size = defaultdict(list)
    for eta, L, y in rows:
        by_size[L].append((eta, y))
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for L in sorted(by_size):
        pts = sorted(by_size[L])
        ax.plot([p[0] for p in pts], [max(p[1], 1e-12) for p in pts], label=f"L={L}", lw=1)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("eta (loss per qubit, natural-log units)")
    ax.set_ylabel("logical error rate (ansatz)")
    ax.legend(ncol=2, fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print("wrote", out)


if __name__ == "__main__":
    main()
