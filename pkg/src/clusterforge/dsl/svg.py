"""Front views of rack rows as SVG."""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

from ..layout import LayoutError

U_PX = 8          # one rack unit
RACK_W = 64
RACK_GAP = 12
MARGIN = 20
LABEL_H = 16
TRAY_GAP = 14
ROW_GAP = 40

COLORS = {
    "core_switch": "#c0392b",
    "edge_switch": "#e67e22",
    "enclosure": "#2e86c1",
    "ups_unit": "#27ae60",
}


def _fmt(v):
    return f"{v:g}"


def _rect(x, y, w, h, **attrs):
    extra = "".join(f" {k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items())
    return f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}"{extra}/>'


def draw_rows(placement, floor, rows=None) -> str:
    """SVG document with one group per selected floor row.

    ``rows`` lists row indices; empty or None selects every row.
    """
    if placement is None or floor is None:
        raise LayoutError("placement required before drawing racks")
    selected = list(range(floor.rows)) if not rows else list(rows)
    for r in selected:
        if not isinstance(r, int) or isinstance(r, bool) or not 0 <= r < floor.rows:
            raise LayoutError(f"unknown row {r!r} (floor has {floor.rows} row(s))")
    rack_h = placement.height_u * U_PX
    row_h = TRAY_GAP + rack_h + LABEL_H + ROW_GAP
    width = 2 * MARGIN + floor.racks_per_row * (RACK_W + RACK_GAP) - RACK_GAP
    height = 2 * MARGIN + len(selected) * row_h - ROW_GAP
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
    ]
    for n, r in enumerate(selected):
        y0 = MARGIN + n * row_h
        top = y0 + TRAY_GAP
        out.append(f'<g id="row{r}" class="row">')
        positions = floor.racks_in_row(r)
        if positions:
            xs = [MARGIN + p.column * (RACK_W + RACK_GAP) for p in positions]
            out.append(f'<line class="tray" x1="{min(xs)}" y1="{y0 + TRAY_GAP // 2}" '
                       f'x2="{max(xs) + RACK_W}" y2="{y0 + TRAY_GAP // 2}" stroke="#555" stroke-width="3"/>')
        for p in positions:
            x = MARGIN + p.column * (RACK_W + RACK_GAP)
            out.append(_rect(x, top, RACK_W, rack_h, id=f"rack{p.index}", class_="rack",
                             fill="#f4f4f4", stroke="#333"))
            out.append(f'<text class="rack-label" x="{x + RACK_W // 2}" y="{top + rack_h + 12}" '
                       f'text-anchor="middle">Rack {p.index}</text>')
            if p.index >= placement.rack_count:
                continue
            for dev in placement.devices_in(p.index):
                slot = placement.slot_of(dev.id)
                dy = top + (placement.height_u - (slot + dev.size_u - 1)) * U_PX
                out.append(_rect(x + 2, dy, RACK_W - 4, dev.size_u * U_PX,
                                 id=f"dev-{dev.id.replace(':', '-')}", class_=f"device {dev.kind}",
                                 fill=COLORS.get(dev.kind, "#999"), stroke="#222"))
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
