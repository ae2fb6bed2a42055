"""Time series from ``reproduce fig1`` or ``simulate --csv`` output."""
from __future__ import annotations

import argparse

import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    data = np.genfromtxt(args.csv, delimiter=",", names=True)
    t = data["t"]
    fig, ax = plt.subplots(figsize=(7, 3))
    for name in data.dtype.names[1:]:
        if name == "xdot":
            continue
        ax.plot(t, data[name], lw=0.8, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out) if args.out else plt.show()


if __name__ == "__main__":
    main()
