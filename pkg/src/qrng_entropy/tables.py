"""Regeneration of the optimized-entropy tables for 8- and 16-bit ADCs.

Table I lists the optimized average conditional min-entropy; Tables II and III
list the optimized worst-case conditional min-entropy for 8 and 16 bits over
several excursion bounds.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

from .entropy import ExcursionBound
from .noise import NoiseModel
from .optimize import optimize_r_average, optimize_r_worst_case

QCNR_ROWS = (math.inf, 20.0, 10.0, 0.0, -math.inf)
K_COLUMNS = (0.0, 5.0, 10.0, 15.0, 20.0)
WORST_CASE_BITS = {"II": 8, "III": 16}


@dataclass(frozen=True)
class TableEntry:
    table: str
    qcnr_db: float
    n_bits: int
    k_sigma: Optional[float]
    h_min: float
    optimal_r: Optional[float]


def _r(x: float) -> Optional[float]:
    return None if math.isnan(x) else x


def table_average() -> list[TableEntry]:
    rows = []
    for q in QCNR_ROWS:
        for n in (8, 16):
            res = optimize_r_average(NoiseModel.from_qcnr(q), n)
            rows.append(TableEntry("I", q, n, None, res.achieved_entropy, _r(res.optimal_r)))
    return rows


def table_worst_case(which: str) -> list[TableEntry]:
    n = WORST_CASE_BITS[which]
    rows = []
    for q in QCNR_ROWS:
        for k in K_COLUMNS:
            # a zero-width window is only meaningful without classical noise
            if k == 0.0 and q != math.inf:
                continue
            res = optimize_r_worst_case(NoiseModel.from_qcnr(q), n, ExcursionBound(k))
            rows.append(TableEntry(which, q, n, k, res.achieved_entropy, _r(res.optimal_r)))
    return rows


def build_table(which: str) -> list[TableEntry]:
    if which == "I":
        return table_average()
    if which in WORST_CASE_BITS:
        return table_worst_case(which)
    raise ValueError(f"unknown table {which!r}; expected I, II or III")


def to_csv(entries: list[TableEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "qcnr_db", "n_bits", "k_sigma", "h_min", "optimal_r"])
    for e in entries:
        w.writerow(
            [
                e.table,
                e.qcnr_db,
                e.n_bits,
                "" if e.k_sigma is None else e.k_sigma,
                f"{e.h_min:.6f}",
                "" if e.optimal_r is None else f"{e.optimal_r:.6f}",
            ]
        )
    return buf.getvalue()
