"""Placement explorer: the outer annealing loop over block coordinates.

Each iteration takes a placement at minimum sizes, expands its size
ranges on the floorplan, lets the dimensions-interval optimizer shrink
them around the best sizes, resolves overlaps against the structure,
stores the survivor, and perturbs the coordinates of the last accepted
placement to propose the next one.  Generation stops once the stored
boxes cover enough of the size space (or a safety iteration bound hits),
then a template-like fallback placement is installed for the remainder.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field, replace

from .bdio import AnnealSchedule, bdio_optimize
from .cost import CostWeights
from .errors import InfeasibleNetlistError, PerturbationError
from .model import (DimensionInterval, Netlist, Placement, SizeVector,
                    rectangles_overlap)
from .structure import MultiPlacementStructure

log = logging.getLogger(__name__)

_PLACE_ATTEMPTS = 300
_PLACE_RESTARTS = 100
_NUDGE_ROUNDS = 200
_OFFSET_RESAMPLES = 8


@dataclass(frozen=True)
class ExplorerConfig:
    """Generation knobs; every field has a usable default."""

    coverage_target: float = 0.9
    max_outer_iterations: int = 100
    outer_schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    inner_schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    perturb_block_fraction: float = 0.3
    expansion_step: int = 1
    weights: CostWeights = field(default_factory=CostWeights)
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.coverage_target < 1.0):
            raise ValueError("coverage_target must lie in (0, 1); full "
                             "coverage is unreachable by construction")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")
        if not (0.0 < self.perturb_block_fraction <= 1.0):
            raise ValueError("perturb_block_fraction must lie in (0, 1]")
        if self.expansion_step < 1:
            raise ValueError("expansion_step must be >= 1")


@dataclass(frozen=True)
class GenerationStats:
    """Why generation stopped: coverage reached or iteration bound hit."""

    iterations: int
    coverage: float
    reached_target: bool
    num_placements: int


def _min_size_placement(netlist: Netlist,
                        coords: tuple[tuple[int, int], ...]) -> Placement:
    widths = tuple(DimensionInterval(b.min_width, b.min_width)
                   for b in netlist.blocks)
    heights = tuple(DimensionInterval(b.min_height, b.min_height)
                    for b in netlist.blocks)
    return Placement(id=-1, coords=coords, width_ranges=widths,
                     height_ranges=heights)


def _min_rect(netlist: Netlist, i: int, x: int, y: int):
    b = netlist.blocks[i]
    return (x, y, b.min_width, b.min_height)


def select_initial_placement(netlist: Netlist,
                             rng: random.Random) -> Placement:
    """Random non-overlapping coordinates at minimum block sizes.

    All size ranges come back as singletons at the minima, ready for
    expansion.  Aborts when the blocks cannot be packed after bounded
    retries.
    """
    w, h = netlist.floorplan_width, netlist.floorplan_height
    for _ in range(_PLACE_RESTARTS):
        coords: list[tuple[int, int]] = []
        ok = True
        for i, b in enumerate(netlist.blocks):
            placed = False
            for _ in range(_PLACE_ATTEMPTS):
                x = rng.randint(0, w - b.min_width)
                y = rng.randint(0, h - b.min_height)
                rect = (x, y, b.min_width, b.min_height)
                if all(not rectangles_overlap(rect, _min_rect(netlist, j, *coords[j]))
                       for j in range(i)):
                    coords.append((x, y))
                    placed = True
                    break
            if not placed:
                ok = False
                break
        if ok:
            return _min_size_placement(netlist, tuple(coords))
    raise InfeasibleNetlistError(
        f"could not place {netlist.num_blocks} blocks at minimum sizes "
        f"inside the {w}x{h} floorplan after bounded retries")


def expand_placement(netlist: Netlist, p: Placement,
                     step: int = 1) -> Placement:
    """Grow every size range's end, round-robin, until nothing moves.

    Pairs are visited as (block 0 width, block 0 height, block 1 width,
    ...); a growth attempt succeeds only if the layout stays feasible with
    every range at its tentative maximum and within the designer bound.  A
    pair that fails once is retired.  Range starts stay put.
    """
    n = netlist.num_blocks
    fw, fh = netlist.floorplan_width, netlist.floorplan_height
    ends_w = [iv.end for iv in p.width_ranges]
    ends_h = [iv.end for iv in p.height_ranges]

    def grows(i: int, dim: str, tentative: int) -> bool:
        x, y = p.coords[i]
        if dim == "w":
            rect = (x, y, tentative, ends_h[i])
        else:
            rect = (x, y, ends_w[i], tentative)
        if rect[0] + rect[2] > fw or rect[1] + rect[3] > fh:
            return False
        for j in range(n):
            if j == i:
                continue
            xo, yo = p.coords[j]
            if rectangles_overlap(rect, (xo, yo, ends_w[j], ends_h[j])):
                return False
        return True

    active = [(i, d) for i in range(n) for d in ("w", "h")]
    while active:
        survivors = []
        for i, d in active:
            b = netlist.blocks[i]
            if d == "w":
                tentative = ends_w[i] + step
                if tentative <= b.max_width and grows(i, d, tentative):
                    ends_w[i] = tentative
                    survivors.append((i, d))
            else:
                tentative = ends_h[i] + step
                if tentative <= b.max_height and grows(i, d, tentative):
                    ends_h[i] = tentative
                    survivors.append((i, d))
        active = survivors

    widths = tuple(DimensionInterval(iv.start, e)
                   for iv, e in zip(p.width_ranges, ends_w))
    heights = tuple(DimensionInterval(iv.start, e)
                    for iv, e in zip(p.height_ranges, ends_h))
    return replace(p, width_ranges=widths, height_ranges=heights)


def accept_new(current_cost: float, candidate_cost: float,
               temperature: float, rng: random.Random) -> bool:
    """Metropolis check: never refuse an improvement, accept a worsening
    with probability exp(-delta/T)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    if candidate_cost <= current_cost:
        return True
    return rng.random() < math.exp(-(candidate_cost - current_cost)
                                   / temperature)


def perturb_placement(netlist: Netlist, p: Placement, fraction: float,
                      rng: random.Random) -> Placement:
    """Move a fraction of the blocks and reset every range to the minima.

    Chosen blocks get uniform coordinate offsets; a move past the
    floorplan edge wraps around to the opposite side instead of being
    discarded.  Blocks left overlapping at minimum sizes are re-drawn a
    bounded number of times; if the layout cannot be untangled the whole
    offset set is resampled, and after that a PerturbationError escapes.
    """
    n = netlist.num_blocks
    w, h = netlist.floorplan_width, netlist.floorplan_height
    k = min(n, math.ceil(fraction * n))
    chosen = rng.sample(range(n), k)

    for _ in range(_OFFSET_RESAMPLES):
        coords = list(p.coords)
        for i in chosen:
            b = netlist.blocks[i]
            dx = dy = 0
            while dx == 0 and dy == 0:
                dx = rng.randint(-(w // 2), w // 2)
                dy = rng.randint(-(h // 2), h // 2)
            span_x = w - b.min_width + 1
            span_y = h - b.min_height + 1
            coords[i] = ((coords[i][0] + dx) % span_x,
                         (coords[i][1] + dy) % span_y)

        untangled = False
        for _ in range(_NUDGE_ROUNDS):
            conflicted = set()
            for i in range(n):
                ri = _min_rect(netlist, i, *coords[i])
                for j in range(i + 1, n):
                    if rectangles_overlap(ri, _min_rect(netlist, j, *coords[j])):
                        conflicted.add(i)
                        conflicted.add(j)
            if not conflicted:
                untangled = True
                break
            i = rng.choice(sorted(conflicted))
            b = netlist.blocks[i]
            coords[i] = (rng.randint(0, w - b.min_width),
                         rng.randint(0, h - b.min_height))
        if untangled:
            return _min_size_placement(netlist, tuple(coords))

    raise PerturbationError(
        "could not untangle the perturbed placement at minimum sizes")


def generate(netlist: Netlist, cfg: ExplorerConfig) -> MultiPlacementStructure:
    """Build a multi-placement structure for the netlist.

    Every explored placement is stored (after overlap resolution)
    regardless of the Metropolis outcome; acceptance only steers which
    placement the next perturbation starts from.  The explorer's cost
    indicator is the optimizer's average cost.  Stops at the coverage
    target or the iteration bound, whichever comes first, then installs
    the last accepted placement (ranges widened to the designer bounds)
    as the fallback.
    """
    rng = random.Random(cfg.rng_seed)
    structure = MultiPlacementStructure(netlist)
    current = select_initial_placement(netlist, rng)

    accepted: Placement | None = None
    accepted_cost: float | None = None
    temp: float | None = None
    iterations = 0

    while (iterations < cfg.max_outer_iterations
           and structure.coverage() < cfg.coverage_target):
        iterations += 1
        expanded = expand_placement(netlist, current, cfg.expansion_step)
        inner_seed = rng.randrange(2**32)
        (new_w, new_h), report = bdio_optimize(
            netlist, expanded, cfg.weights, cfg.inner_schedule, inner_seed)
        candidate = replace(expanded, id=structure.allocate_id(),
                            width_ranges=new_w, height_ranges=new_h,
                            best_cost=report.best_cost,
                            average_cost=report.average_cost,
                            best_sizes=report.best_sizes)
        structure.resolve_and_store(candidate)

        cost = report.average_cost
        if temp is None:
            temp = max(cost, 1e-9)
        if accepted_cost is None or accept_new(accepted_cost, cost, temp, rng):
            accepted, accepted_cost = candidate, cost
        temp = max(temp * cfg.outer_schedule.cooling_factor, 1e-300)

        try:
            current = perturb_placement(netlist, accepted,
                                        cfg.perturb_block_fraction, rng)
        except PerturbationError:
            # retry from the accepted placement on the next iteration
            current = _min_size_placement(netlist, accepted.coords)

    full_w = tuple(DimensionInterval(b.min_width, b.max_width)
                   for b in netlist.blocks)
    full_h = tuple(DimensionInterval(b.min_height, b.max_height)
                   for b in netlist.blocks)
    structure.fallback = replace(accepted, id=structure.allocate_id(),
                                 width_ranges=full_w, height_ranges=full_h)

    coverage = structure.coverage()
    reached = coverage >= cfg.coverage_target
    if not reached:
        log.warning(
            "coverage target %.3f not reached after %d iterations "
            "(coverage %.3f, %d placements); structure returned as-is",
            cfg.coverage_target, iterations, coverage,
            len(structure.placements))
    structure.generation_stats = GenerationStats(
        iterations=iterations, coverage=coverage, reached_target=reached,
        num_placements=len(structure.placements))
    return structure
