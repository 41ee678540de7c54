"""Machine-readable suite reports: one JSON summary and one CSV detail file
per suite, named {suite}-{seed}.*; identical configuration and seed produce
byte-identical output."""
from __future__ import annotations

import csv
import json
import os

from . import __version__
from ._kernels import BACKEND

SCHEMA = "1"

# design decisions that affect reported numbers, embedded in every report
FLAGS = {
    "contour_orientation": "clockwise",
    "const_term_stripped": True,
    "flaschka_convention": "a_k = exp((q_k - q_{k+1})/2)/2; b_k = -p_k/2",
    "kdv_sheet_convention": "|w| <= 1 on sheet +1; base point x = 0",
    "gardner_regularization": "kernel jump at base point paired by midpoint value",
}


def check_row(name: str, value: float, tolerance=None, info=None, passed=None) -> dict:
    """One verification check; `tolerance=None` marks a diagnostic-only row."""
    if passed is None and tolerance is not None:
        passed = bool(value < tolerance)
    row = {"name": name, "value": float(value), "tolerance": tolerance, "pass": passed}
    if info:
        row["info"] = info
    return row


def assemble_report(suite: str, seed: int, tolerances: dict, checks: list, extra=None) -> dict:
    gated = [c for c in checks if c["tolerance"] is not None]
    report = {
        "schema": SCHEMA,
        "suite": suite,
        "seed": seed,
        "version": __version__,
        "backend": BACKEND,
        "flags": FLAGS,
        "tolerances": {k: float(v) for k, v in sorted(tolerances.items())},
        "checks": checks,
        "pass": all(c["pass"] for c in gated),
    }
    if extra:
        report["extra"] = extra
    return report


def write_report(report: dict, out_dir: str):
    """Write {suite}-{seed}.json and .csv; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    stem = f"{report['suite']}-{report['seed']}"
    json_path = os.path.join(out_dir, stem + ".json")
    csv_path = os.path.join(out_dir, stem + ".csv")
    with open(json_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "check", "value", "tolerance", "pass"])
        for c in report["checks"]:
            writer.writerow(
                [
                    report["suite"],
                    c["name"],
                    repr(c["value"]),
                    "" if c["tolerance"] is None else repr(c["tolerance"]),
                    "" if c["pass"] is None else str(bool(c["pass"])),
                ]
            )
    return json_path, csv_path
