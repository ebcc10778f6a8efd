#!/usr/bin/env python3
"""Plot logical error rate vs loss per qubit from a break-even scan CSV.

Usage: plot_breakeven.py breakeven.csv [out.png]
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
            if line.startswith("#") or line.startswith("L,"):
                continue
            parts = line.strip().split(",")
            if len(parts) < 8:
                continue
            rows.append(
                dict(L=int(parts[0]), db=float(parts[2]), p_logic=float(parts[6]), err=float(parts[7]))
            )
    out = sys.argv[2] if len(sys.argv) > 2 else "breakeven.png"
    by_size = defaultdict(list)
    for r in rows:
        by_size[r["L"]].append(r)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for L in sorted(by_size):
        pts = sorted(by_size[L], key=lambda r: r["db"])
        ax.errorbar(
            [r["db"] for r in pts],
            [max(r["p_logic"], 1e-7) for r in pts],
            yerr=[r["err"] for r in pts],
            marker="o",
            ms=3,
            label=f"L={L}",
        )
    ax.axhline(1e-3, color="k", ls="--", lw=0.8)
    ax.axvline(5.7e-3, color="gray", ls=":", lw=0.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("loss per qubit [dB]")
    ax.set_ylabel("logical error rate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print("wrote", out)


if __name__ == "__main__":
    main()
