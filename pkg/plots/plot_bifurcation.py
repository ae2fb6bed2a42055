"""Hopf curve and fold curves in the (alpha, T) plane from ``reproduce fig7``."""
from __future__ import annotations

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dir", default=".", help="directory holding fig7_hopf.csv and fig7_folds.csv")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    d = Path(args.dir)
    hopf = np.genfromtxt(d / "fig7_hopf.csv", delimiter=",", names=True)
    folds = np.genfromtxt(d / "fig7_folds.csv", delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(hopf["alpha"], hopf["T_crit"], "k", label="Hopf")
    for n in np.unique(folds["n"]):
        sel = folds["n"] == n
        ax.plot(folds["alpha"][sel], folds["T"][sel], "--", label=f"fold n={int(n)}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("T")
    ax.set_xlim(0.0, 3.0)
    ax.set_ylim(0.0, 3.0)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out) if args.out else plt.show()


if __name__ == "__main__":
    main()
