"""Summary table (text plus JSON sidecar) and cable CSV."""
from __future__ import annotations

import csv
import io
import json
import os

from ..economics import DesignSummary, EconomicsError

# (key, label, decimals); None decimals means text, 0 means integer
SUMMARY_ROWS = (
    ("node_model", "Compute node model", None),
    ("cpu_model", "CPU model", None),
    ("cpu_frequency_ghz", "CPU clock frequency, GHz", 2),
    ("node_peak_gflops", "Node peak performance, GFLOPS", 1),
    ("node_power_w", "Node power, W", 1),
    ("nodes", "Number of compute nodes", 0),
    ("racks", "Number of racks (incl. UPS)", 0),
    ("floor_area_m2", "Floor space size, m2", 2),
    ("cable_length_m", "Cable length, m", 2),
    ("power_kw", "Power, kW", 3),
    ("weight_t", "Weight, tonnes", 3),
    ("capex_usd", "Capital expenditures, USD", 2),
    ("opex_usd", "Operating expenditures, USD", 2),
    ("tco_usd", "Total cost of ownership, USD", 2),
    ("tomato_kg_day", "Tomato equivalent, kg per day", 0),
)

CABLE_HEADER = ("cable_id", "class", "from_device", "from_rack", "from_u",
                "to_device", "to_rack", "to_u", "length_m")


class WriterError(Exception):
    pass


def _shown(value, decimals):
    if decimals is None:
        return str(value)
    if decimals == 0:
        return int(round(value))
    return round(float(value), decimals)


def summary_values(summary: DesignSummary) -> dict:
    """Values exactly as they appear in the text table."""
    return {key: _shown(getattr(summary, key), d) for key, _, d in SUMMARY_ROWS}


def format_summary(summary: DesignSummary) -> str:
    if summary is None:
        raise EconomicsError("design incomplete: nothing to summarise")
    vals = summary_values(summary)
    width = max(len(label) for _, label, _ in SUMMARY_ROWS) + 2
    lines = []
    for key, label, d in SUMMARY_ROWS:
        v = vals[key]
        text = v if d is None else (str(v) if d == 0 else f"{v:.{d}f}")
        lines.append(f"{label:<{width}}{text}")
    return "\n".join(lines) + "\n"


def parse_summary_text(text: str) -> dict:
    """Read a table written by :func:`format_summary` back into values."""
    by_label = {label: (key, d) for key, label, d in SUMMARY_ROWS}
    out = {}
    for line in text.splitlines():
        for label, (key, d) in by_label.items():
            if line.startswith(label + "  "):
                raw = line[len(label):].strip()
                out[key] = raw if d is None else (int(raw) if d == 0 else float(raw))
    return out


def _open_for_write(path):
    d = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(d, exist_ok=True)
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise WriterError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_summary(summary: DesignSummary, path=None) -> str:
    """Return the text table; with ``path`` also write it and a ``.json`` sidecar."""
    text = format_summary(summary)
    if path is not None:
        with _open_for_write(path) as fh:
            fh.write(text)
        sidecar = os.path.splitext(path)[0] + ".json"
        doc = {"summary": summary_values(summary),
               "labels": {key: label for key, label, _ in SUMMARY_ROWS}}
        with _open_for_write(sidecar) as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return text


def cable_rows(cables):
    rows = []
    for c in sorted(cables, key=lambda c: c.id):
        rows.append((c.id, c.cls, c.a.label, c.a.rack, c.a.slot,
                     c.b.label, c.b.rack, c.b.slot, f"{c.length_m:.2f}"))
    return rows


def format_cable_table(cables) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CABLE_HEADER)
    w.writerows(cable_rows(cables))
    return buf.getvalue()


def write_cable_table(cables, path) -> str:
    text = format_cable_table(cables)
    with _open_for_write(path) as fh:
        fh.write(text)
    return text
