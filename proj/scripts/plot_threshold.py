#!/usr/bin/env python3
"""Plot logical error rate curves from a forge rate table CSV.

Usage: plot_threshold.py results.csv [collapse.json] [out.png]
"""
import csv
import json
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("L,"):
                continue
            parts = line.strip().split(",")
            if len(parts) < 7:
                continue
            rows.append(
                dict(
                    L=int(parts[0]),
                    p=float(parts[1]),
                    p_loss=float(parts[2]),
                    n=int(parts[3]),
                    fails=int(parts[4]),
                    p_logic=float(parts[5]),
                    stderr=float(parts[6]),
                )
            )
    return rows


def main():
    rows = load(sys.argv[1])
    fit = None
    out = "threshold.png"
    for arg in sys.argv[2:]:
        if arg.endswith(".json"):
            fit = json.load(open(arg))
        else:
            out = arg
    by_size = defaultdict(list)
    for r in rows:
        by_size[r["L"]].append(r)

    fig, axes = plt.subplots(1, 2 if fit else 1, figsize=(11 if fit else 6, 4.2))
    ax0 = axes[0] if fit else axes
    for L in sorted(by_size):
        pts = sorted(by_size[L], key=lambda r: r["p"])
        ax0.errorbar(
            [r["p"] for r in pts],
            [r["p_logic"] for r in pts],
            yerr=[r["stderr"] for r in pts],
            marker="o",
            ms=3,
            label=f"L={L}",
        )
    ax0.set_xlabel("p")
    ax0.set_ylabel("logical error rate")
    ax0.legend()
    if fit and fit.get("ok"):
        ax0.axvline(fit["p_th"], color="k", ls="--", lw=0.8)
        ax1 = axes[1]
        pth, nu = fit["p_th"], fit["nu"]
        for L in sorted(by_size):
            pts = sorted(by_size[L], key=lambda r: r["p"])
            ps = [r["p"] for r in pts]
            ys = [r["p_logic"] for r in pts]
            yc = None
            for i in range(len(ps) - 1):
                if ps[i] <= pth <= ps[i + 1]:
                    t = (pth - ps[i]) / (ps[i + 1] - ps[i])
                    yc = ys[i] + t * (ys[i + 1] - ys[i])
            if yc is None:
                continue
            xs = [(p - pth) * L ** (1.0 / nu) for p in ps]
            ax1.plot(xs, [y - yc for y in ys], "o-", ms=3, label=f"L={L}")
        ax1.set_xlabel("(p - p_th) L^(1/nu)")
        ax1.set_ylabel("y_L(x)")
        ax1.set_title(f"p_th={pth:.4f}, nu={nu:.2f}")
        ax1.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print("wrote", out)


if __name__ == "__main__":
    main()
