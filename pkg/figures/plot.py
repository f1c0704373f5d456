#!/usr/bin/env python3
"""Render figures from the solver's CSV outputs.

Usage:
    python figures/plot.py convergence forward.csv out.png
    python figures/plot.py boundary posterior.csv out.png

Read-only consumers: the CSVs are never modified.  Exit codes: 0 on success,
1 on bad usage or malformed input.
"""

from __future__ import annotations

import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


class FigureInputError(Exception):
    """Missing column, empty table, or unusable values."""


def read_csv(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FigureInputError(f"{path}: empty CSV (no header)")
        rows = list(reader)
    if not rows:
        raise FigureInputError(f"{path}: no data rows")
    return list(reader.fieldnames), rows


def require_columns(path, fieldnames, needed) -> None:
    missing = [c for c in needed if c not in fieldnames]
    if missing:
        raise FigureInputError(f"{path}: missing column(s) {', '.join(missing)}")


def fit_slopes(rows) -> dict[str, float]:
    """Least-squares log2-log2 slope of error vs N, per rule."""
    series = defaultdict(list)
    for row in rows:
        series[row["rule"]].append((float(row["N"]), float(row["error"])))
    slopes = {}
    for rule, pairs in series.items():
        pairs.sort()
        n = np.array([p[0] for p in pairs])
        err = np.array([p[1] for p in pairs])
        if np.any(err <= 0.0) or len(pairs) < 2:
            raise FigureInputError(
                f"rule {rule!r}: need >= 2 rows with positive errors to fit a slope"
            )
        slopes[rule] = float(np.polyfit(np.log2(n), np.log2(err), 1)[0])
    return slopes


def plot_convergence(csv_path, out_path) -> dict[str, float]:
    fieldnames, rows = read_csv(csv_path)
    require_columns(csv_path, fieldnames, ("rule", "N", "error"))
    slopes = fit_slopes(rows)

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    series = defaultdict(list)
    for row in rows:
        series[row["rule"]].append((float(row["N"]), float(row["error"])))
    all_n = np.array(sorted({float(r["N"]) for r in rows}))
    for rule, pairs in sorted(series.items()):
        pairs.sort()
        n = [p[0] for p in pairs]
        err = [p[1] for p in pairs]
        ax.loglog(n, err, "o-", label=f"{rule} (slope {slopes[rule]:.2f})")
    # reference-slope guide lines anchored at the first data point
    first_err = max(max(p[1] for p in pairs) for pairs in series.values())
    for power, style in ((-1.0, "--"), (-2.0, ":")):
        guide = first_err * (all_n / all_n[0]) ** power
        ax.loglog(all_n, guide, style, color="gray",
                  label=rf"$N^{{{power:.0f}}}$")
    ax.set_xlabel("number of QMC points N")
    ax.set_ylabel("error vs reference")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return slopes


def plot_boundary(csv_path, out_path) -> bool:
    """Polar overlay of prior mean, posterior mean and (if present) truth.

    Returns True when the truth column was available.
    """
    fieldnames, rows = read_csv(csv_path)
    require_columns(csv_path, fieldnames, ("angle", "prior_mean", "posterior_mean"))
    has_truth = "truth" in fieldnames
    if not has_truth:
        print("warning: no 'truth' column; plotting without the ground truth",
              file=sys.stderr)

    angle = np.array([float(r["angle"]) for r in rows])
    order = np.argsort(angle)
    angle = angle[order]
    # close the curves for a clean polar plot
    angle = np.append(angle, angle[0] + 2.0 * np.pi)

    def closed(column):
        vals = np.array([float(r[column]) for r in rows])[order]
        return np.append(vals, vals[0])

    fig, ax = plt.subplots(figsize=(5.5, 5.5),
                           subplot_kw={"projection": "polar"})
    ax.plot(angle, closed("prior_mean"), "--", label="prior mean")
    ax.plot(angle, closed("posterior_mean"), "-", label="posterior mean")
    if has_truth:
        ax.plot(angle, closed("truth"), ":", label="truth")
    ax.legend(loc="lower left", bbox_to_anchor=(1.0, 0.9))
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return has_truth


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 3 or argv[0] not in ("convergence", "boundary"):
        print("usage: plot.py {convergence|boundary} input.csv output.png",
              file=sys.stderr)
        return 1
    kind, csv_path, out_path = argv
    try:
        if kind == "convergence":
            slopes = plot_convergence(csv_path, out_path)
            for rule, slope in sorted(slopes.items()):
                print(f"{rule}: fitted slope {slope:.2f}")
        else:
            plot_boundary(csv_path, out_path)
    except (FigureInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
