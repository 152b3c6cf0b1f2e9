#!/usr/bin/env python3
"""Render an FER-versus-Eb/N0 chart from simulation harness CSVs.

The curve set JSON lists what to draw:

    {"title": "...",
     "target_fer": 1e-3,
     "curves": [{"label": "L3-SCL", "csv": "a.csv", "metric": "pm",
                 "role": "l3-pm"}, ...]}

Each curve selects one metric column of one CSV; ``role`` picks the house
style for that curve type. Zero-FER points cannot sit on a log axis and
are dropped with a warning. If ``target_fer`` is set, each curve's
log-linear crossing is marked; these crossings are the same numbers the
CLI's gap subcommand reports.
"""

from __future__ import annotations

import argparse
import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import ferplot


def render(spec: dict, out_path: str) -> None:
    plt.rcParams["svg.hashsalt"] = "polarq-plots"
    fig, ax = plt.subplots(figsize=(7.2, 4.6), dpi=120)
    target = spec.get("target_fer")
    for entry in spec["curves"]:
        curve = ferplot.load_fer_curve(entry["csv"], entry.get("metric", "pm"),
                                       entry["label"], entry.get("role"))
        xs, fs, lo, hi = [], [], [], []
        for x, f, l, h in zip(curve.ebn0_db, curve.fer, curve.ci_low, curve.ci_high):
            if f <= 0:
                print(f"warning: dropping zero-FER point at {x} dB "
                      f"({curve.label})", file=sys.stderr)
                continue
            xs.append(x)
            fs.append(f)
            lo.append(max(f - l, 0.0))
            hi.append(max(h - f, 0.0))
        if not xs:
            raise ferplot.SchemaError(f"curve {curve.label!r} has no plottable points")
        ax.errorbar(xs, fs, yerr=[lo, hi], label=curve.label, capsize=2.0,
                    linewidth=1.4, markersize=4.5, **curve.style)
        if target:
            try:
                x_cross = ferplot.crossing_ebn0(xs, fs, target)
                color = curve.style.get("color")
                ax.plot([x_cross], [target], marker="*", markersize=11,
                        color=color, zorder=5)
            except ValueError:
                pass
    ax.set_yscale("log")
    ax.set_xlabel(r"$E_b/N_0$ [dB]")
    ax.set_ylabel("Frame Error Rate")
    if target:
        ax.axhline(target, color="gray", linewidth=0.7, linestyle=":")
    if spec.get("title"):
        ax.set_title(spec["title"])
    ax.grid(True, which="both", linewidth=0.3, alpha=0.6)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None} if out_path.endswith(".svg") else None)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spec", required=True, help="curve set JSON")
    parser.add_argument("--out", required=True, help="output image (svg/pdf/png)")
    args = parser.parse_args(argv)
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
        if "curves" not in spec or not spec["curves"]:
            raise ferplot.SchemaError("curve set lists no curves")
        render(spec, args.out)
    except (ferplot.SchemaError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
