"""Block dimensions-interval optimizer.

Inner simulated annealing over block sizes for one fixed placement.
Returns the best and average cost seen on the trajectory and the
placement's size ranges shrunk around the best sizes: the further the
average sits above the best, the tighter the surviving interval.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .cost import CostWeights, layout_cost
from .model import (DimensionInterval, Netlist, Placement, SizeVector,
                    layout_feasible)


@dataclass(frozen=True)
class AnnealSchedule:
    """Knobs for one annealing loop.

    `initial_temperature` of None means "use the cost of the starting
    state", which keeps early uphill moves likely without hand-tuning.
    """

    initial_temperature: float | None = None
    cooling_factor: float = 0.95
    iterations: int = 1000
    perturb_fraction: float = 0.2

    def __post_init__(self):
        if self.initial_temperature is not None and self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be > 0 (or None)")
        if not (0.0 < self.cooling_factor < 1.0):
            raise ValueError("cooling_factor must lie in (0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (0.0 < self.perturb_fraction <= 1.0):
            raise ValueError("perturb_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class CostReport:
    """Outcome of one optimizer run over a fixed placement."""

    best_cost: float
    average_cost: float
    best_sizes: SizeVector

    def __post_init__(self):
        if self.best_cost > self.average_cost:
            raise ValueError("best_cost cannot exceed average_cost")


Ranges = tuple[tuple[DimensionInterval, ...], tuple[DimensionInterval, ...]]


def optimize_ranges(width_ranges: tuple[DimensionInterval, ...],
                    height_ranges: tuple[DimensionInterval, ...],
                    best_sizes: SizeVector,
                    best_cost: float, average_cost: float) -> Ranges:
    """Shrink all ranges symmetrically around the best sizes.

    The shrink factor is best_cost / average_cost in (0, 1]; a run whose
    average equals its best keeps the full ranges, a run that wandered far
    above its best keeps only a tight window.  The output is clamped into
    the input ranges and always contains the best sizes.
    """
    if best_cost > average_cost:
        raise ValueError("best_cost cannot exceed average_cost")
    s = 1.0 if average_cost == 0 else best_cost / average_cost

    def shrink(iv: DimensionInterval, best: int) -> DimensionInterval:
        if not (iv.start <= best <= iv.end):
            raise ValueError(f"best value {best} outside range "
                             f"[{iv.start}, {iv.end}]")
        lo = max(iv.start, math.ceil(best - s * (best - iv.start)))
        hi = min(iv.end, math.floor(best + s * (iv.end - best)))
        return DimensionInterval(lo, hi)

    new_w = tuple(shrink(iv, best_sizes[i][0])
                  for i, iv in enumerate(width_ranges))
    new_h = tuple(shrink(iv, best_sizes[i][1])
                  for i, iv in enumerate(height_ranges))
    return new_w, new_h


def _clamp(v: int, iv: DimensionInterval) -> int:
    return min(max(v, iv.start), iv.end)


def bdio_optimize(netlist: Netlist, placement: Placement,
                  weights: CostWeights, sched: AnnealSchedule,
                  rng_seed: int) -> tuple[Ranges, CostReport]:
    """Anneal block sizes inside the placement's ranges.

    Starts from the maximal sizes (feasible by the placement contract).
    Each round perturbs a fraction of the 2N dimensions by a bounded
    uniform integer step, clamped into the current ranges; infeasible
    proposals are rejected outright.  Metropolis acceptance with geometric
    cooling; the average is taken over the occupancy trajectory (one
    sample per round plus the start), so it never undercuts the best.
    Fully deterministic for a fixed seed.
    """
    rng = random.Random(rng_seed)
    n = netlist.num_blocks
    coords = placement.coords
    w_ranges = placement.width_ranges
    h_ranges = placement.height_ranges

    current = [[iv.end for iv in w_ranges], [iv.end for iv in h_ranges]]
    cur_vec = SizeVector(tuple(zip(current[0], current[1])))
    if not layout_feasible(netlist, coords, cur_vec):
        # contract breach: ranges were never feasible at their maxima;
        # report the one layout we can still stand behind
        min_vec = SizeVector(tuple((wr.start, hr.start)
                                   for wr, hr in zip(w_ranges, h_ranges)))
        c = layout_cost(netlist, coords, min_vec, weights)
        report = CostReport(best_cost=c, average_cost=c, best_sizes=min_vec)
        shrunk = optimize_ranges(w_ranges, h_ranges, min_vec, c, c)
        return shrunk, report

    cur_cost = layout_cost(netlist, coords, cur_vec, weights)
    best_vec, best_cost = cur_vec, cur_cost
    total = cur_cost
    samples = 1

    temp = sched.initial_temperature
    if temp is None:
        temp = max(cur_cost, 1e-9)

    num_dims = 2 * n
    k = max(1, math.ceil(sched.perturb_fraction * num_dims))
    ranges_flat = list(w_ranges) + list(h_ranges)

    for _ in range(sched.iterations):
        proposal = [list(current[0]), list(current[1])]
        for d in rng.sample(range(num_dims), k):
            iv = ranges_flat[d]
            axis, i = (0, d) if d < n else (1, d - n)
            m = max(1, math.ceil(sched.perturb_fraction * (iv.end - iv.start)))
            step = rng.randint(-m, m)
            proposal[axis][i] = _clamp(proposal[axis][i] + step, iv)
        vec = SizeVector(tuple(zip(proposal[0], proposal[1])))
        if layout_feasible(netlist, coords, vec):
            c = layout_cost(netlist, coords, vec, weights)
            delta = c - cur_cost
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                current, cur_vec, cur_cost = proposal, vec, c
                if c < best_cost:
                    best_vec, best_cost = vec, c
        total += cur_cost
        samples += 1
        # floor keeps exp(-delta/temp) well-defined on very long runs
        temp = max(temp * sched.cooling_factor, 1e-300)

    average = total / samples
    shrunk = optimize_ranges(w_ranges, h_ranges, best_vec, best_cost, average)
    report = CostReport(best_cost=best_cost, average_cost=average,
                        best_sizes=best_vec)
    return shrunk, report
