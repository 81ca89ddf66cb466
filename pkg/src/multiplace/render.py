"""SVG rendering of a placed, sized floorplan.

Blocks are labeled rectangles (class "block"); each net is drawn as the
dashed bounding box of its pin positions (class "net").  The viewBox is
the floorplan itself, y-flipped so +y points up as in the layout model.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .model import Netlist, SizeVector

_PALETTE = ("#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc", "#fc9272",
            "#c7e9c0", "#fdd0a2", "#dadaeb")


def floorplan_svg(netlist: Netlist, coords: tuple[tuple[int, int], ...],
                  sizes: SizeVector) -> str:
    fw, fh = netlist.floorplan_width, netlist.floorplan_height
    # flip y by drawing at (fh - y - h) so the lower-left anchor renders
    # bottom-up
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {fw} {fh}" '
        f'width="640" height="{640 * fh / fw:.0f}">',
        f'<rect class="floorplan" x="0" y="0" width="{fw}" height="{fh}" '
        f'fill="white" stroke="black" stroke-width="1"/>',
    ]
    for b, (x, y), (w, h) in zip(netlist.blocks, coords, sizes.entries):
        color = _PALETTE[b.id % len(_PALETTE)]
        top = fh - y - h
        parts.append(
            f'<rect class="block" x="{x}" y="{top}" width="{w}" '
            f'height="{h}" fill="{color}" stroke="black" '
            f'stroke-width="0.5"/>')
        parts.append(
            f'<text x="{x + w / 2}" y="{top + h / 2}" '
            f'font-size="{max(3, min(w, h) // 3)}" text-anchor="middle" '
            f'dominant-baseline="middle">{escape(b.name)}</text>')
    for net in netlist.nets:
        xs, ys = [], []
        for pin in net.pins:
            x, y = coords[pin.block]
            w, h = sizes[pin.block]
            xs.append(x + pin.offset_x * w)
            ys.append(y + pin.offset_y * h)
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        parts.append(
            f'<rect class="net" x="{x0:.1f}" y="{fh - y1:.1f}" '
            f'width="{x1 - x0:.1f}" height="{y1 - y0:.1f}" fill="none" '
            f'stroke="#d62728" stroke-width="0.4" '
            f'stroke-dasharray="2,2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_svg(path: str, netlist: Netlist, coords: tuple[tuple[int, int], ...],
             sizes: SizeVector) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(floorplan_svg(netlist, coords, sizes))
