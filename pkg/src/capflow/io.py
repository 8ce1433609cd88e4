"""CSV persistence for ledgers and profile snapshots.

Floats are written with 17 significant digits so that reading a file back
reproduces the stored doubles exactly.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .geometry import Grid, Profile
from .monitors import LEDGER_COLUMNS, Ledger, LedgerRow

__all__ = ["fmt", "write_timeseries", "read_timeseries", "write_profile", "read_profile"]


def fmt(x: float) -> str:
    return "%.17g" % x


def write_timeseries(path, ledger: Ledger) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LEDGER_COLUMNS)
        for row in ledger.rows:
            w.writerow([fmt(x) for x in row])


def read_timeseries(path, law="AreaPreserving") -> Ledger:
    ledger = Ledger(law=law)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != LEDGER_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        for rec in reader:
            ledger.append_row(LedgerRow(*(float(x) for x in rec)))
    return ledger


def write_profile(path, p: Profile) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("z", "rho"))
        for z, r in zip(p.z, p.rho):
            w.writerow((fmt(z), fmt(r)))


def read_profile(path, n: int = 2) -> Profile:
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    z, rho = data[:, 0], data[:, 1]
    grid = Grid(float(z[-1]), len(z))
    if not np.allclose(z, grid.z, rtol=0, atol=1e-12 * max(1.0, grid.d)):
        raise ValueError(f"{path}: nodes are not a uniform grid starting at 0")
    if not math.isclose(z[0], 0.0, abs_tol=1e-15):
        raise ValueError(f"{path}: first node must be z = 0")
    return Profile(grid, n, rho)
