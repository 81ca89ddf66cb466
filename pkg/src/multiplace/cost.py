"""Layout cost evaluation: half-perimeter wirelength plus bounding-box area.

All functions are pure over immutable inputs and cheap enough to sit in
the inner annealing loop.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Net, Netlist, SizeVector, layout_feasible


@dataclass(frozen=True)
class CostWeights:
    wirelength_weight: float = 1.0
    area_weight: float = 1.0

    def __post_init__(self):
        if self.wirelength_weight < 0 or self.area_weight < 0:
            raise ValueError("cost weights must be nonnegative")
        if self.wirelength_weight == 0 and self.area_weight == 0:
            raise ValueError("cost weights must not both be zero")


def net_hpwl(net: Net, netlist: Netlist,
             coords: tuple[tuple[int, int], ...], sizes: SizeVector) -> float:
    """Half-perimeter of the bounding box of the net's pin positions.

    Pin position is (x + ox*w, y + oy*h) for the pin's block.
    """
    min_x = min_y = float("inf")
    max_x = max_y = float("-inf")
    for pin in net.pins:
        x, y = coords[pin.block]
        w, h = sizes[pin.block]
        px = x + pin.offset_x * w
        py = y + pin.offset_y * h
        if px < min_x:
            min_x = px
        if px > max_x:
            max_x = px
        if py < min_y:
            min_y = py
        if py > max_y:
            max_y = py
    return (max_x - min_x) + (max_y - min_y)


def occupied_bbox_area(coords: tuple[tuple[int, int], ...],
                       sizes: SizeVector) -> int:
    """Area of the bounding box around all placed blocks."""
    min_x = min(x for x, _ in coords)
    min_y = min(y for _, y in coords)
    max_x = max(x + w for (x, _), (w, _) in zip(coords, sizes.entries))
    max_y = max(y + h for (_, y), (_, h) in zip(coords, sizes.entries))
    return (max_x - min_x) * (max_y - min_y)


def layout_cost(netlist: Netlist, coords: tuple[tuple[int, int], ...],
                sizes: SizeVector, weights: CostWeights) -> float:
    """Weighted sum of total HPWL and occupied bounding-box area.

    The area term uses the box around the blocks rather than the fixed
    floorplan so compaction is rewarded.  The layout must be feasible.
    """
    if not layout_feasible(netlist, coords, sizes):
        raise ValueError("layout_cost requires a feasible layout")
    wl = 0.0
    if weights.wirelength_weight > 0:
        for net in netlist.nets:
            wl += net_hpwl(net, netlist, coords, sizes)
    area = occupied_bbox_area(coords, sizes) if weights.area_weight > 0 else 0
    return weights.wirelength_weight * wl + weights.area_weight * area
