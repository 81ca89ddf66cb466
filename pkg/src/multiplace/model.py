"""Circuit, floorplan and placement domain types.

Coordinates and dimensions are integers on a unit grid.  Blocks are
axis-aligned rectangles anchored at their lower-left corner, growing
toward +x/+y.  All types are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import NetlistFormatError

Rect = tuple[int, int, int, int]  # (x, y, w, h)


@dataclass(frozen=True)
class Block:
    """A rectangular layout unit with designer-set dimension bounds."""

    id: int
    name: str
    min_width: int
    max_width: int
    min_height: int
    max_height: int

    def __post_init__(self):
        if not (0 < self.min_width <= self.max_width):
            raise ValueError(
                f"block {self.name!r}: need 0 < min_width <= max_width, "
                f"got [{self.min_width}, {self.max_width}]")
        if not (0 < self.min_height <= self.max_height):
            raise ValueError(
                f"block {self.name!r}: need 0 < min_height <= max_height, "
                f"got [{self.min_height}, {self.max_height}]")


@dataclass(frozen=True)
class Pin:
    """A net terminal on a block, at fractional offsets of its size.

    Absolute pin position is (x + offset_x * w, y + offset_y * h) for the
    block's current placement and size.
    """

    block: int
    offset_x: float = 0.5
    offset_y: float = 0.5

    def __post_init__(self):
        if self.block < 0:
            raise ValueError(f"pin block index must be >= 0, got {self.block}")
        if not (0.0 <= self.offset_x <= 1.0 and 0.0 <= self.offset_y <= 1.0):
            raise ValueError(
                f"pin offsets must lie in [0, 1], got "
                f"({self.offset_x}, {self.offset_y})")


@dataclass(frozen=True)
class Net:
    """A connection over two or more pins (repeated blocks allowed)."""

    pins: tuple[Pin, ...]

    def __post_init__(self):
        if len(self.pins) < 2:
            raise ValueError(f"net needs at least 2 pins, got {len(self.pins)}")


@dataclass(frozen=True)
class Netlist:
    """Blocks, nets and the bounded floorplan they live on."""

    blocks: tuple[Block, ...]
    nets: tuple[Net, ...]
    floorplan_width: int
    floorplan_height: int

    def __post_init__(self):
        if len(self.blocks) < 1:
            raise ValueError("netlist needs at least one block")
        for i, b in enumerate(self.blocks):
            if b.id != i:
                raise ValueError(f"block ids must be 0..N-1 in order; "
                                 f"block at position {i} has id {b.id}")
            if b.min_width > self.floorplan_width or b.min_height > self.floorplan_height:
                raise ValueError(
                    f"block {b.name!r} does not fit the "
                    f"{self.floorplan_width}x{self.floorplan_height} floorplan "
                    f"at minimum size")
        n = len(self.blocks)
        for net in self.nets:
            for pin in net.pins:
                if pin.block >= n:
                    raise ValueError(f"net pin references block {pin.block}, "
                                     f"but netlist has {n} blocks")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class DimensionInterval:
    """Closed integer interval of valid values for one block dimension."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} > end {self.end}")

    def __contains__(self, value: int) -> bool:
        return self.start <= value <= self.end

    def span(self) -> int:
        """Number of integer values covered."""
        return self.end - self.start + 1

    def intersects(self, other: "DimensionInterval") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True)
class SizeVector:
    """One (width, height) pair per block."""

    entries: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> tuple[int, int]:
        return self.entries[i]

    def within_designer_bounds(self, netlist: Netlist) -> bool:
        if len(self.entries) != netlist.num_blocks:
            return False
        for b, (w, h) in zip(netlist.blocks, self.entries):
            if not (b.min_width <= w <= b.max_width
                    and b.min_height <= h <= b.max_height):
                return False
        return True


@dataclass(frozen=True)
class Placement:
    """Per-block coordinates plus the size box the placement is valid for.

    `id` is -1 until the placement is admitted into a structure.  The
    invariant that matters downstream: at the maximal sizes of the ranges
    all block rectangles fit the floorplan without pairwise overlap.
    """

    id: int
    coords: tuple[tuple[int, int], ...]
    width_ranges: tuple[DimensionInterval, ...]
    height_ranges: tuple[DimensionInterval, ...]
    best_cost: float = 0.0
    average_cost: float = 0.0
    best_sizes: SizeVector | None = None

    def __post_init__(self):
        n = len(self.coords)
        if len(self.width_ranges) != n or len(self.height_ranges) != n:
            raise ValueError("coords, width_ranges and height_ranges must all "
                             "have one entry per block")
        if self.best_cost > self.average_cost:
            raise ValueError(f"best_cost {self.best_cost} exceeds "
                             f"average_cost {self.average_cost}")

    def max_sizes(self) -> SizeVector:
        """Size vector at the upper ends of all ranges."""
        return SizeVector(tuple(
            (w.end, h.end)
            for w, h in zip(self.width_ranges, self.height_ranges)))

    def contains_sizes(self, sizes: SizeVector) -> bool:
        """Whether every entry of `sizes` lies in this placement's box."""
        if len(sizes) != len(self.coords):
            return False
        for (w, h), wr, hr in zip(sizes.entries, self.width_ranges,
                                  self.height_ranges):
            if w not in wr or h not in hr:
                return False
        return True


def rectangles_overlap(a: Rect, b: Rect) -> bool:
    """True iff the interiors of two (x, y, w, h) rectangles intersect.

    Shared edges do not count as overlap, so abutted blocks are legal.
    """
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def layout_feasible(netlist: Netlist,
                    coords: tuple[tuple[int, int], ...],
                    sizes: SizeVector) -> bool:
    """Whether blocks at the given coords and sizes fit the floorplan
    without pairwise overlap."""
    rects = []
    for (x, y), (w, h) in zip(coords, sizes.entries):
        if x < 0 or y < 0:
            return False
        if x + w > netlist.floorplan_width or y + h > netlist.floorplan_height:
            return False
        rects.append((x, y, w, h))
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            if rectangles_overlap(rects[i], rects[j]):
                return False
    return True


def placement_feasible(placement: Placement, netlist: Netlist,
                       sizes: SizeVector) -> bool:
    """Feasibility of a placement at sizes drawn from its own ranges.

    Raises ValueError when `sizes` falls outside the placement's declared
    ranges; use `layout_feasible` to probe arbitrary size vectors.
    """
    if not placement.contains_sizes(sizes):
        raise ValueError("sizes fall outside the placement's declared ranges")
    return layout_feasible(netlist, placement.coords, sizes)


# --- netlist JSON format ---------------------------------------------------
#
# {
#   "floorplan": {"width": W, "height": H},
#   "blocks": [{"name": "...", "min_w": i, "max_w": i, "min_h": i, "max_h": i}, ...],
#   "nets": [[{"block": i, "ox": f, "oy": f}, ...], ...]
# }
#
# Pin offsets may be omitted; they default to the block center.


def netlist_to_json(netlist: Netlist) -> dict:
    return {
        "floorplan": {"width": netlist.floorplan_width,
                      "height": netlist.floorplan_height},
        "blocks": [
            {"name": b.name, "min_w": b.min_width, "max_w": b.max_width,
             "min_h": b.min_height, "max_h": b.max_height}
            for b in netlist.blocks
        ],
        "nets": [
            [{"block": p.block, "ox": p.offset_x, "oy": p.offset_y}
             for p in net.pins]
            for net in netlist.nets
        ],
    }


def netlist_from_json(doc: dict) -> Netlist:
    try:
        fp = doc["floorplan"]
        blocks = tuple(
            Block(id=i, name=str(b["name"]),
                  min_width=int(b["min_w"]), max_width=int(b["max_w"]),
                  min_height=int(b["min_h"]), max_height=int(b["max_h"]))
            for i, b in enumerate(doc["blocks"]))
        nets = tuple(
            Net(tuple(Pin(block=int(p["block"]),
                          offset_x=float(p.get("ox", 0.5)),
                          offset_y=float(p.get("oy", 0.5)))
                      for p in net))
            for net in doc["nets"])
        return Netlist(blocks=blocks, nets=nets,
                       floorplan_width=int(fp["width"]),
                       floorplan_height=int(fp["height"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise NetlistFormatError(f"invalid netlist document: {exc}") from exc


def load_netlist(path: str) -> Netlist:
    """Read a netlist JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NetlistFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return netlist_from_json(doc)


def save_netlist(netlist: Netlist, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(netlist_to_json(netlist), fh, indent=2, sort_keys=True)
        fh.write("\n")
