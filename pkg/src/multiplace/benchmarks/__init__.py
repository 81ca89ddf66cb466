"""Benchmark netlist fixtures.

The published statistics these mirror give topology scale only (block,
net and terminal counts), so the geometry here is synthetic: every block
uses the default [4, 40] dimension bounds on a 200x200 floorplan, which
keeps minimum-size random placement feasible at every scale.

A net with k pins counts as k - 1 terminals (its spanning connections).
That convention is what makes rows like benchmark24 (48 nets, 48
terminals) representable at all, since every net carries at least two
pins.

Fixtures live as netlist-format JSON under the versioned ``v1/``
directory and are regenerated by ``write_fixtures``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..model import Block, Net, Netlist, Pin, netlist_from_json, netlist_to_json

FIXTURE_VERSION = "v1"

# (name, blocks, nets, terminals)
TABLE: tuple[tuple[str, int, int, int], ...] = (
    ("circ01", 4, 4, 12),
    ("circ02", 6, 4, 18),
    ("circ06", 6, 4, 18),
    ("TwoStage Opamp", 5, 9, 22),
    ("SingleEnded Opamp", 9, 14, 32),
    ("Mixer", 8, 6, 15),
    ("circ08", 8, 8, 24),
    ("tso-cascode", 21, 36, 46),
    ("benchmark24", 24, 48, 48),
)

_DIM_BOUNDS = (4, 40)
_FLOORPLAN = (200, 200)
_PIN_OFFSETS = ((0.5, 0.5), (0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0))


@dataclass(frozen=True)
class BenchmarkCircuit:
    name: str
    netlist: Netlist
    declared_blocks: int
    declared_nets: int
    declared_terminals: int

    def __post_init__(self):
        actual = (self.netlist.num_blocks, len(self.netlist.nets),
                  netlist_terminal_count(self.netlist))
        declared = (self.declared_blocks, self.declared_nets,
                    self.declared_terminals)
        if actual != declared:
            raise ValueError(
                f"{self.name}: fixture has blocks/nets/terminals {actual}, "
                f"declared {declared}")


def net_terminal_count(net: Net) -> int:
    return len(net.pins) - 1


def netlist_terminal_count(netlist: Netlist) -> int:
    return sum(net_terminal_count(net) for net in netlist.nets)


def fixture_slug(name: str) -> str:
    return name.lower().replace(" ", "_").replace("-", "_")


def synthesize(name: str, num_blocks: int, num_nets: int,
               num_terminals: int) -> Netlist:
    """Deterministically build a netlist with the requested counts."""
    if num_terminals < num_nets:
        raise ValueError(f"{name}: {num_nets} nets need at least "
                         f"{num_nets} terminals")
    lo, hi = _DIM_BOUNDS
    blocks = tuple(
        Block(id=i, name=f"b{i:02d}", min_width=lo, max_width=hi,
              min_height=lo, max_height=hi)
        for i in range(num_blocks))

    pin_counts = [2] * num_nets
    for extra in range(num_terminals - num_nets):
        pin_counts[extra % num_nets] += 1

    nets = []
    for k, count in enumerate(pin_counts):
        pins = []
        for j in range(count):
            ox, oy = _PIN_OFFSETS[(k + j) % len(_PIN_OFFSETS)]
            pins.append(Pin(block=(k + j) % num_blocks, offset_x=ox,
                            offset_y=oy))
        nets.append(Net(tuple(pins)))

    return Netlist(blocks=blocks, nets=tuple(nets),
                   floorplan_width=_FLOORPLAN[0],
                   floorplan_height=_FLOORPLAN[1])


def _fixture_dir():
    return resources.files(__package__) / FIXTURE_VERSION


def load_benchmark(name: str) -> BenchmarkCircuit:
    """Load one fixture by its published name."""
    for row_name, nb, nn, nt in TABLE:
        if row_name == name:
            path = _fixture_dir() / f"{fixture_slug(name)}.json"
            doc = json.loads(path.read_text(encoding="utf-8"))
            netlist = netlist_from_json(doc)
            return BenchmarkCircuit(name=name, netlist=netlist,
                                    declared_blocks=nb, declared_nets=nn,
                                    declared_terminals=nt)
    raise KeyError(f"unknown benchmark {name!r}; "
                   f"known: {[row[0] for row in TABLE]}")


def load_benchmarks() -> list[BenchmarkCircuit]:
    """All fixtures, in table order."""
    return [load_benchmark(row[0]) for row in TABLE]


def write_fixtures(directory: str | Path) -> list[Path]:
    """Regenerate the fixture JSON files (used to seed ``v1/``)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, nb, nn, nt in TABLE:
        netlist = synthesize(name, nb, nn, nt)
        path = directory / f"{fixture_slug(name)}.json"
        path.write_text(
            json.dumps(netlist_to_json(netlist), indent=2, sort_keys=True)
            + "\n", encoding="utf-8")
        written.append(path)
    return written
