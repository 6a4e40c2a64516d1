"""CSV and text serialization of simulation results.

Floats are written with ``repr`` (shortest round-trip form, always a dot as
decimal separator), so the CSV files are locale independent and re-reading
them gives back the exact values.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .engine import Category
from .ids import sorted_ids
from .market import SimulationResult

SCHEMA = "repute.transcript/1"

TRANSCRIPT_COLUMNS = (
    "step", "buyer", "seller", "good", "x", "f", "v", "delta", "r_next", "shared",
    "alpha", "beta", "or_next", "category",
    # appended after the fixed columns
    "or_prev", "previous_category", "bs_effect",
)
SERIES_COLUMNS = ("step", "buyer", "seller", "overall", "category")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Category):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def transcript_csv(result: SimulationResult) -> str:
    return _csv(TRANSCRIPT_COLUMNS,
                ([getattr(r, c) for c in TRANSCRIPT_COLUMNS] for r in result.transcript))


def series_csv(result: SimulationResult) -> str:
    return _csv(SERIES_COLUMNS,
                ([getattr(p, c) for c in SERIES_COLUMNS] for p in result.series))


def summary_text(result: SimulationResult, name: str = "scenario") -> str:
    out = [
        "repute simulation summary",
        f"scenario: {name}",
        f"seed: {result.seed}",
        f"steps: {result.steps}",
        f"schema: {SCHEMA}",
        f"transactions: {len(result.transcript)}",
        f"no-admissible-seller events: {sum(e.kind == 'NO_SELLER' for e in result.events)}",
    ]
    share = result.order_share()
    out.append(f"order share: honest {share['honest']:.4f} dishonest {share['dishonest']:.4f}")
    orders = result.orders_by_seller()
    out.append("orders by seller: " + " ".join(
        f"{s}={orders.get(s, 0)}" for s in sorted_ids(result.sellers)))
    out += ["", "final seller lists"]
    for bid in sorted_ids(result.buyers):
        idx = result.buyers[bid].categories
        parts = []
        for cat in (Category.REPUTED, Category.NON_REPUTED, Category.DIS_REPUTED, Category.NEW):
            members = " ".join(sorted_ids(idx.members(cat))) or "-"
            parts.append(f"{cat.value}: {members}")
        out.append(f"  {bid}  " + " | ".join(parts))
    out += ["", "final overall reputation"]
    for bid in sorted_ids(result.buyers):
        recs = result.buyers[bid].records
        cells = " ".join(f"{sid}={recs[sid].overall:.4f}" for sid in sorted_ids(recs))
        out.append(f"  {bid}: {cells or '-'}")
    effects = result.bs_effects()
    if effects:
        out += ["", "ballot attack effect (% change over individual reputation)"]
        for r in effects:
            out.append(f"  step {r.step} {r.buyer}->{r.seller}: r={r.r_next:.4f} "
                       f"shared={r.shared:.4f} or={r.or_next:.4f} effect={r.bs_effect:.4f}%")
    if result.events:
        out += ["", "events"]
        out += [f"  step {e.step} {e.kind}: {e.detail}" for e in result.events]
    return "\n".join(out) + "\n"


def write_run(result: SimulationResult, out_dir, name: str = "scenario") -> list:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "transcript.csv": transcript_csv(result),
        "reputation_series.csv": series_csv(result),
        "summary.txt": summary_text(result, name),
    }
    paths = []
    for fname, text in files.items():
        p = out_dir / fname
        # newline="" keeps "\n" on every platform
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        paths.append(p)
    return paths
