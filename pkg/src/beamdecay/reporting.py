"""CSV and plain-text output. Floats are written with 17 significant digits."""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

TABLE_COLUMNS = ("gamma", "ka_minus", "ka_plus", "beta0", "beta1", "lambda", "M", "sigma")
TRAJECTORY_COLUMNS = ("t", "E", "J", "L", "diss_viscous", "diss_left", "diss_right", "ux0", "uxl", "uxt0", "uxtl")
LEDGER_COLUMNS = ("t", "E", "J", "L", "residual", "envelope", "sigma_measured_running")


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "" if np.isnan(x) else format(x, ".17g")
    return str(x)


def unique_path(directory, name):
    """``directory/name``, or ``stem_1.ext``, ``stem_2.ext``, ... if taken."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    stem, suffix = os.path.splitext(name)
    k = 1
    while path.exists():
        path = directory / f"{stem}_{k}{suffix}"
        k += 1
    return path


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def table_rows(rows):
    """CSV rows for ``stability.TableRow`` objects, with the two beta1 variants appended."""
    return [(r.gamma, r.ka_left, r.ka_right, r.beta0, r.beta1, r.lam, r.M, r.sigma, r.beta1_general, r.beta1_gap)
            for r in rows]


TABLE_CSV_COLUMNS = TABLE_COLUMNS + ("beta1_general", "beta1_gap")


def table_text(rows):
    """Aligned layout: one line per (gamma, dampers) pair, values at two decimals."""
    head = f"{'gamma':>7} | {'<ka-, ka+>':>14} | {'<beta0, beta1>':>16} | {'lambda':>7} | {'M':>8} | {'sigma':>6}"
    lines = [head, "-" * len(head)]
    for r in rows:
        ka = f"<{r.ka_left:g}, {r.ka_right:g}>"
        b = f"<{r.beta0:.2f}, {r.beta1:.2f}>"
        lines.append(f"{r.gamma:>7g} | {ka:>14} | {b:>16} | {r.lam:>7g} | {r.M:>8.2f} | {r.sigma:>6.2f}")
    return "\n".join(lines)
