#!/usr/bin/env python3
# Plot a covsim sweep CSV: first column on x, every other column as a line.
#
#   python docs/plot_sweeps.py results/fig6.csv [--log-y] [--save fig6.png]
#
# Needs the plot extra: pip install -e ".[plot]"

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from covsim.utils.table_io import read_table

AXIS_LABELS = {
    "distance_m": "Distance UAV to relay (m)",
    "p_los": "LoS probability",
    "channels": "Number of channels",
    "n_hops": "Number of hops",
    "altitude_m": "UAV altitude (m)",
}


def plot_table(path: Path, log_y: bool = False):
    table = read_table(path)
    x_name, series = table.columns[0], table.columns[1:]
    if x_name not in AXIS_LABELS:
        raise SystemExit(f"❌ {path} is not a sweep table (first column {x_name!r})")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    x = table.column(x_name)
    for name in series:
        style = "--" if name.startswith(("accept_", "capalt_")) else "-"
        ax.plot(x, table.column(name), style, marker="o", markersize=3, label=name)
    ax.set_xlabel(AXIS_LABELS[x_name])
    ax.set_title(path.stem)
    if log_y:
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    return fig


def main():
    parser = argparse.ArgumentParser(description="Plot a covsim sweep CSV")
    parser.add_argument("csv", type=Path)
    parser.add_argument("--log-y", action="store_true")
    parser.add_argument("--save", type=Path, help="Write the figure instead of showing it")
    args = parser.parse_args()

    fig = plot_table(args.csv, args.log_y)
    if args.save:
        fig.savefig(args.save, dpi=150)
        print(f"💾 Saved {args.save}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
