#!/usr/bin/env python3
"""Render achievable-rate charts from a `de rates` CSV.

Two x-axis modes mirror the two standard views: ``capacity`` plots each
curve against the underlying channel capacity (the unquantized/unquantized
curve is then the diagonal), ``ebn0`` against Eb/N0, using each curve's own
parametric Eb/N0 column.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import ferplot

CURVES = [
    ("rate_unq_unq", "ebn0_unq_unq_db", "unq. SC, unq. channel", "#1f78b4", "-"),
    ("rate_unq_3q", "ebn0_unq_3q_db", "unq. SC, 3-lvl channel", "#111111", ":"),
    ("rate_3q_3q", "ebn0_3q_3q_db", "3-lvl. SC, 3-lvl channel", "#b01f24", "-"),
]


def render(csv_path: str, mode: str, out_path: str) -> None:
    cols = ferplot.read_csv_columns(csv_path)
    for rate_col, ebn0_col, _, _, _ in CURVES:
        for need in ([rate_col, "capacity_bits"] if mode == "capacity"
                     else [rate_col, ebn0_col]):
            if need not in cols:
                raise ferplot.SchemaError(f"{csv_path}: missing column {need}")
    plt.rcParams["svg.hashsalt"] = "polarq-plots"
    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=120)
    for rate_col, ebn0_col, label, color, ls in CURVES:
        ys = cols[rate_col]
        xs = cols["capacity_bits"] if mode == "capacity" else cols[ebn0_col]
        pairs = sorted((x, y) for x, y in zip(xs, ys))
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs], label=label,
                color=color, linestyle=ls, linewidth=1.6)
    if mode == "capacity":
        ax.set_xlabel("BiAWGN capacity [bits]")
        ax.set_xlim(0, 1)
        ax.plot([0, 1], [0, 1], color="#cccccc", linewidth=0.6, zorder=0)
    else:
        ax.set_xlabel(r"$E_b/N_0$ [dB]")
    ax.set_ylabel("Max. achievable rate")
    ax.set_ylim(0, 1.05)
    ax.grid(True, linewidth=0.3, alpha=0.6)
    ax.legend(fontsize=8, loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None} if out_path.endswith(".svg") else None)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--csv", required=True)
    parser.add_argument("--mode", choices=["capacity", "ebn0"], default="ebn0")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        render(args.csv, args.mode, args.out)
    except (ferplot.SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
