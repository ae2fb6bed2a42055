"""Plot M(a1, T) from fig2.csv / fig3.csv (written by ``delaycycles reproduce fig2|fig3``)."""
from __future__ import annotations

import argparse

import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("--out", default=None, help="save instead of showing")
    args = ap.parse_args()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for path in args.csv:
        data = np.genfromtxt(path, delimiter=",", names=True)
        ax.plot(data["a1"], data["value"], label=path)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("a1")
    ax.set_ylabel("M(a1, T)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out) if args.out else plt.show()


if __name__ == "__main__":
    main()
