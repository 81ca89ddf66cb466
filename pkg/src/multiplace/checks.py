"""Structure invariant suite, shared by the `validate` command and tests."""

from __future__ import annotations

import random

from .model import SizeVector, layout_feasible
from .structure import MultiPlacementStructure


def check_rows(s: MultiPlacementStructure) -> list[str]:
    """Row ordering/shape invariants plus id bookkeeping."""
    problems = []
    known = set(s.placements)
    for kind, rows in (("width", s.width_rows), ("height", s.height_rows)):
        for i, row in enumerate(rows):
            for msg in row.check():
                problems.append(f"{kind} row {i}: {msg}")
            for e in row.entries:
                stray = e.placements - known
                if stray:
                    problems.append(f"{kind} row {i}: entry "
                                    f"[{e.start},{e.end}] references unknown "
                                    f"placements {sorted(stray)}")
    return problems


def check_row_coverage(s: MultiPlacementStructure) -> list[str]:
    """Each placement's id must tile exactly its interval in every row."""
    problems = []
    for p in s.placements.values():
        for i in range(s.netlist.num_blocks):
            for kind, row, iv in (
                    ("width", s.width_rows[i], p.width_ranges[i]),
                    ("height", s.height_rows[i], p.height_ranges[i])):
                covered = sorted((e.start, e.end) for e in row.entries
                                 if p.id in e.placements)
                ok = bool(covered) and covered[0][0] == iv.start \
                    and covered[-1][1] == iv.end \
                    and all(covered[k][1] + 1 == covered[k + 1][0]
                            for k in range(len(covered) - 1))
                if not ok:
                    problems.append(
                        f"placement {p.id}, block {i} {kind}: row entries "
                        f"{covered} do not tile [{iv.start},{iv.end}]")
    return problems


def check_disjointness(s: MultiPlacementStructure) -> list[str]:
    """No two stored placements may share a point of the size space."""
    problems = []
    stored = s.stored()
    for a_idx in range(len(stored)):
        for b_idx in range(a_idx + 1, len(stored)):
            a, b = stored[a_idx], stored[b_idx]
            joint = all(
                a.width_ranges[i].intersects(b.width_ranges[i])
                and a.height_ranges[i].intersects(b.height_ranges[i])
                for i in range(s.netlist.num_blocks))
            if joint:
                problems.append(f"placements {a.id} and {b.id} jointly "
                                f"overlap")
    return problems


def check_placements(s: MultiPlacementStructure) -> list[str]:
    """Designer-bound containment and feasibility at the range maxima."""
    problems = []
    for p in s.placements.values():
        for i, b in enumerate(s.netlist.blocks):
            wr, hr = p.width_ranges[i], p.height_ranges[i]
            if wr.start < b.min_width or wr.end > b.max_width:
                problems.append(f"placement {p.id}, block {i}: width range "
                                f"[{wr.start},{wr.end}] outside designer "
                                f"bounds [{b.min_width},{b.max_width}]")
            if hr.start < b.min_height or hr.end > b.max_height:
                problems.append(f"placement {p.id}, block {i}: height range "
                                f"[{hr.start},{hr.end}] outside designer "
                                f"bounds [{b.min_height},{b.max_height}]")
        if not layout_feasible(s.netlist, p.coords, p.max_sizes()):
            problems.append(f"placement {p.id}: infeasible at its range "
                            f"maxima")
        if p.best_cost > p.average_cost:
            problems.append(f"placement {p.id}: best_cost {p.best_cost} "
                            f"exceeds average_cost {p.average_cost}")
    return problems


def random_size_vector(netlist, rng: random.Random) -> SizeVector:
    return SizeVector(tuple(
        (rng.randint(b.min_width, b.max_width),
         rng.randint(b.min_height, b.max_height))
        for b in netlist.blocks))


def check_uniqueness(s: MultiPlacementStructure, samples: int = 10000,
                     seed: int = 0) -> list[str]:
    """Sampled check that no size vector hits more than one stored box."""
    rng = random.Random(seed)
    problems = []
    for _ in range(samples):
        vec = random_size_vector(s.netlist, rng)
        hits = s.query_hits(vec)
        if len(hits) > 1:
            problems.append(f"size vector {vec.entries} hits placements "
                            f"{sorted(hits)}")
            if len(problems) >= 10:
                problems.append("... giving up after 10 multi-hits")
                break
    return problems


def check_structure(s: MultiPlacementStructure, samples: int = 10000,
                    seed: int = 0) -> list[str]:
    """Run the whole suite; an empty result means the structure is sound."""
    problems = []
    problems += check_rows(s)
    problems += check_row_coverage(s)
    problems += check_disjointness(s)
    problems += check_placements(s)
    problems += check_uniqueness(s, samples=samples, seed=seed)
    cov = s.coverage()
    if not (0.0 <= cov <= 1.0):
        problems.append(f"coverage {cov} outside [0, 1]")
    if s.fallback is not None and len(s.fallback.coords) != s.netlist.num_blocks:
        problems.append("fallback placement does not match the block count")
    return problems
