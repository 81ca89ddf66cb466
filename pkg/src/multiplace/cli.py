"""Command-line surface.

Subcommands: generate, instantiate, sweep, bench, validate.  Exit codes
are a stable contract: 0 success, 1 domain error (infeasible netlist,
corrupted structure, failed validation), 2 usage or IO error.

The generation config is a TOML or JSON file with `explorer`, `bdio` and
`cost` sections (every field optional, defaults documented in the
dataclasses); the MULTIPLACE_CONFIG environment variable overrides the
default config path only, never an explicit --config.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
import time
from dataclasses import dataclass

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .bdio import AnnealSchedule
from .checks import check_structure, random_size_vector
from .cost import CostWeights, layout_cost
from .errors import (InfeasibleNetlistError, MultiplaceError,
                     NetlistFormatError, StructureCorruptionError,
                     StructureFormatError)
from .explorer import ExplorerConfig, generate
from .model import Netlist, SizeVector, layout_feasible, load_netlist
from .render import save_svg
from .structure import MultiPlacementStructure

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

CONFIG_ENV_VAR = "MULTIPLACE_CONFIG"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep through the size space."""

    block: int
    dimension: str  # "width" or "height"
    start: int
    stop: int
    step: int
    fixed: SizeVector

    def __post_init__(self):
        if self.dimension not in ("width", "height"):
            raise ValueError("dimension must be 'width' or 'height'")
        if self.start > self.stop:
            raise ValueError(f"sweep start {self.start} > stop {self.stop}")
        if self.step <= 0:
            raise ValueError("sweep step must be positive")

    def values(self) -> list[int]:
        return list(range(self.start, self.stop + 1, self.step))

    def sizes_at(self, value: int) -> SizeVector:
        entries = list(self.fixed.entries)
        w, h = entries[self.block]
        entries[self.block] = (value, h) if self.dimension == "width" \
            else (w, value)
        return SizeVector(tuple(entries))


# -- config handling --------------------------------------------------------


def load_config_doc(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return {}
    if path.endswith(".toml"):
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _schedule_from(doc: dict) -> AnnealSchedule:
    return AnnealSchedule(
        initial_temperature=doc.get("initial_temperature"),
        cooling_factor=doc.get("cooling_factor", 0.95),
        iterations=int(doc.get("iterations", 1000)),
        perturb_fraction=doc.get("perturb_fraction", 0.2),
    )


def explorer_config_from(doc: dict, seed_override: int | None) -> ExplorerConfig:
    exp = doc.get("explorer", {})
    cost = doc.get("cost", {})
    seed = seed_override if seed_override is not None else doc.get("seed", 0)
    return ExplorerConfig(
        coverage_target=exp.get("coverage_target", 0.9),
        max_outer_iterations=int(exp.get("max_outer_iterations", 100)),
        outer_schedule=_schedule_from(exp.get("outer", {})),
        inner_schedule=_schedule_from(doc.get("bdio", {})),
        perturb_block_fraction=exp.get("perturb_block_fraction", 0.3),
        expansion_step=int(exp.get("expansion_step", 1)),
        weights=CostWeights(
            wirelength_weight=cost.get("wirelength_weight", 1.0),
            area_weight=cost.get("area_weight", 1.0)),
        rng_seed=int(seed),
    )


def parse_sizes(text: str, netlist: Netlist) -> SizeVector:
    """Parse 'w0xh0,w1xh1,...' into a size vector."""
    entries = []
    for part in text.split(","):
        try:
            w, h = part.lower().split("x")
            entries.append((int(w), int(h)))
        except ValueError:
            raise UsageError(f"bad size entry {part!r}; expected WxH")
    if len(entries) != netlist.num_blocks:
        raise UsageError(f"got {len(entries)} sizes for "
                         f"{netlist.num_blocks} blocks")
    return SizeVector(tuple(entries))


def sizes_from_file(path: str, netlist: Netlist) -> SizeVector:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    entries = tuple((int(w), int(h)) for w, h in doc)
    if len(entries) != netlist.num_blocks:
        raise UsageError(f"{path}: got {len(entries)} sizes for "
                         f"{netlist.num_blocks} blocks")
    return SizeVector(entries)


# -- subcommands ------------------------------------------------------------


def cmd_generate(args) -> int:
    netlist = load_netlist(args.netlist)
    cfg = explorer_config_from(load_config_doc(args.config), args.seed)
    t0 = time.perf_counter()
    structure = generate(netlist, cfg)
    elapsed = time.perf_counter() - t0
    structure.save(args.out)
    stats = structure.generation_stats
    stop = ("coverage target reached" if stats.reached_target
            else "iteration bound hit")
    print(f"structure: {args.out}")
    print(f"placements: {stats.num_placements}")
    print(f"coverage: {stats.coverage:.4f} (target {cfg.coverage_target}, "
          f"{stop})")
    print(f"outer iterations: {stats.iterations}")
    print(f"generation time: {elapsed:.2f}s")
    return EXIT_OK


def _load_structure(path: str) -> MultiPlacementStructure:
    return MultiPlacementStructure.load(path)


def cmd_instantiate(args) -> int:
    structure = _load_structure(args.structure)
    netlist = structure.netlist
    if args.sizes_file:
        sizes = sizes_from_file(args.sizes_file, netlist)
    elif args.sizes:
        sizes = parse_sizes(args.sizes, netlist)
    else:
        raise UsageError("need --sizes or --sizes-file")
    if not sizes.within_designer_bounds(netlist):
        raise UsageError("sizes outside the designer bounds of the netlist")

    t0 = time.perf_counter()
    placement = structure.instantiate(sizes)
    latency = time.perf_counter() - t0

    if placement is None:
        print("no placement: size vector uncovered and no fallback installed")
        return EXIT_DOMAIN
    marker = " (fallback)" if (structure.fallback is not None
                               and placement.id == structure.fallback.id) \
        else ""
    print(f"placement: {placement.id}{marker}")
    print(f"coords: {list(placement.coords)}")
    if layout_feasible(netlist, placement.coords, sizes):
        c = layout_cost(netlist, placement.coords, sizes, CostWeights())
        print(f"cost: {c:.6g} (weights 1/1)")
    else:
        print("cost: layout infeasible at these sizes")
    print(f"latency: {latency * 1000:.3f} ms")
    if args.svg:
        save_svg(args.svg, netlist, placement.coords, sizes)
        print(f"svg: {args.svg}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    structure = _load_structure(args.structure)
    netlist = structure.netlist
    if args.fixed_file:
        fixed = sizes_from_file(args.fixed_file, netlist)
    elif args.fixed:
        fixed = parse_sizes(args.fixed, netlist)
    else:
        fixed = SizeVector(tuple((b.min_width, b.min_height)
                                 for b in netlist.blocks))
    if not (0 <= args.block < netlist.num_blocks):
        raise UsageError(f"block index {args.block} out of range")
    spec = SweepSpec(block=args.block, dimension=args.dimension,
                     start=args.start, stop=args.stop, step=args.step,
                     fixed=fixed)
    for v in (spec.start, spec.stop):
        if not spec.sizes_at(v).within_designer_bounds(netlist):
            raise UsageError("sweep range leaves the designer bounds")

    stored = structure.stored()
    weights = CostWeights()
    rows = []
    for v in spec.values():
        sizes = spec.sizes_at(v)
        row = {"sweep_value": v}
        for p in stored:
            feasible = layout_feasible(netlist, p.coords, sizes)
            row[f"cost_p{p.id}"] = (f"{layout_cost(netlist, p.coords, sizes, weights):.6g}"
                                    if feasible else "")
        selected = structure.instantiate(sizes)
        if selected is None:
            row["selected_id"] = ""
            row["selected_cost"] = ""
        else:
            row["selected_id"] = selected.id
            row["selected_cost"] = (
                f"{layout_cost(netlist, selected.coords, sizes, weights):.6g}"
                if layout_feasible(netlist, selected.coords, sizes) else "")
        rows.append(row)

    fieldnames = (["sweep_value"] + [f"cost_p{p.id}" for p in stored]
                  + ["selected_id", "selected_cost"])
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    print(f"sweep: {len(rows)} points -> {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    import random

    structure = _load_structure(args.structure)
    if args.trials < 1:
        raise UsageError("need at least one trial")
    rng = random.Random(args.seed if args.seed is not None else 0)
    vectors = [random_size_vector(structure.netlist, rng)
               for _ in range(args.trials)]
    # warm up caches so the first sample is not an outlier
    structure.instantiate(vectors[0])

    latencies = []
    for vec in vectors:
        t0 = time.perf_counter_ns()
        structure.instantiate(vec)
        latencies.append((time.perf_counter_ns() - t0) / 1e6)
    latencies.sort()
    p99 = latencies[min(len(latencies) - 1, int(len(latencies) * 0.99))]
    print(f"trials: {args.trials}")
    print(f"min: {latencies[0]:.4f} ms")
    print(f"median: {statistics.median(latencies):.4f} ms")
    print(f"p99: {p99:.4f} ms")
    return EXIT_OK


def cmd_validate(args) -> int:
    structure = _load_structure(args.structure)
    problems = check_structure(structure, samples=args.samples,
                               seed=args.seed if args.seed is not None else 0)
    print(f"placements: {len(structure.placements)}")
    print(f"coverage: {structure.coverage():.4f}")
    if problems:
        for msg in problems:
            print(f"FAIL: {msg}")
        print(f"validation: {len(problems)} problem(s)")
        return EXIT_DOMAIN
    print("validation: ok")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multiplace",
        description="Generate and query multi-placement structures for "
                    "block-level floorplanning.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a structure from a netlist")
    g.add_argument("netlist", help="netlist JSON file")
    g.add_argument("--config", help="TOML/JSON generation config")
    g.add_argument("--out", required=True, help="output structure file")
    g.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("instantiate", help="map a size vector to a placement")
    i.add_argument("structure", help="structure JSON file")
    i.add_argument("--sizes", help="comma list w0xh0,w1xh1,...")
    i.add_argument("--sizes-file", help="JSON file [[w,h],...]")
    i.add_argument("--svg", help="write an SVG floorplan rendering here")
    i.set_defaults(func=cmd_instantiate)

    s = sub.add_parser("sweep", help="cost of every placement along one "
                                     "swept dimension")
    s.add_argument("structure")
    s.add_argument("--block", type=int, required=True)
    s.add_argument("--dimension", choices=("width", "height"), required=True)
    s.add_argument("--from", dest="start", type=int, required=True)
    s.add_argument("--to", dest="stop", type=int, required=True)
    s.add_argument("--step", type=int, default=1)
    s.add_argument("--fixed", help="sizes for the non-swept dimensions")
    s.add_argument("--fixed-file", help="JSON file [[w,h],...]")
    s.add_argument("--out", required=True, help="output CSV")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bench", help="instantiation latency statistics")
    b.add_argument("structure")
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--seed", type=int)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate", help="run the invariant suite on a "
                                        "structure file")
    v.add_argument("structure")
    v.add_argument("--samples", type=int, default=10000,
                   help="uniqueness sample count")
    v.add_argument("--seed", type=int)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: cannot open {exc.filename}: {exc.strerror}",
              file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, NetlistFormatError, StructureFormatError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleNetlistError, StructureCorruptionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except MultiplaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
