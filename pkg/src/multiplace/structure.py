"""The multi-placement structure: per-block interval rows mapping size
vectors to stored placements.

Each block contributes one width row and one height row.  A row is an
ascending list of non-overlapping closed integer intervals, each tagged
with the set of placement ids valid there.  Querying a size vector
intersects the 2N row lookups; a well-formed structure yields at most one
hit, and uncovered space falls through to a template-like fallback
placement kept outside the rows.

The structure is mutable while being generated (single writer) and
treated as immutable afterward; concurrent queries on a frozen structure
are safe.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, replace

from .errors import StructureCorruptionError, StructureFormatError
from .model import (DimensionInterval, Netlist, Placement, SizeVector,
                    netlist_from_json, netlist_to_json)


@dataclass
class IntervalEntry:
    """One row interval and the placement ids valid across it."""

    start: int
    end: int
    placements: set[int]


class DimensionRow:
    """Ascending, non-overlapping interval list for one block dimension."""

    def __init__(self, entries: list[IntervalEntry] | None = None):
        self.entries: list[IntervalEntry] = entries or []
        self._refresh()

    def _refresh(self):
        self._starts = [e.start for e in self.entries]

    def lookup(self, value: int) -> set[int]:
        """Placement ids whose interval contains `value` (empty if none)."""
        entry = self._entry_at(value)
        return set(entry.placements) if entry is not None else set()

    def _entry_at(self, value: int) -> IntervalEntry | None:
        idx = bisect_right(self._starts, value) - 1
        if idx >= 0 and self.entries[idx].end >= value:
            return self.entries[idx]
        return None

    def ids_intersecting(self, start: int, end: int) -> set[int]:
        """Union of ids over entries intersecting [start, end]."""
        result: set[int] = set()
        idx = bisect_right(self._starts, start) - 1
        if idx < 0:
            idx = 0
        for e in self.entries[idx:]:
            if e.start > end:
                break
            if e.end >= start:
                result |= e.placements
        return result

    def insert(self, start: int, end: int, pid: int) -> None:
        """Tag [start, end] with `pid`, splitting existing entries at the
        boundaries and creating entries for uncovered sub-ranges."""
        out: list[IntervalEntry] = []
        cursor = start  # next integer of [start, end] not yet covered
        for e in self.entries:
            if e.end < start or e.start > end:
                out.append(e)
                continue
            if cursor < e.start:
                out.append(IntervalEntry(cursor, e.start - 1, {pid}))
            if e.start < start:
                out.append(IntervalEntry(e.start, start - 1, set(e.placements)))
            mid_start = max(e.start, start)
            mid_end = min(e.end, end)
            out.append(IntervalEntry(mid_start, mid_end,
                                     set(e.placements) | {pid}))
            if e.end > end:
                out.append(IntervalEntry(end + 1, e.end, set(e.placements)))
            cursor = mid_end + 1
        if cursor <= end:
            out.append(IntervalEntry(cursor, end, {pid}))
        out.sort(key=lambda e: e.start)
        self.entries = out
        self._refresh()

    def remove_placement(self, pid: int) -> None:
        """Drop `pid` from every entry; entries left empty disappear."""
        out = []
        for e in self.entries:
            e.placements.discard(pid)
            if e.placements:
                out.append(e)
        self.entries = out
        self._refresh()

    def check(self) -> list[str]:
        """Row invariant violations, as human-readable messages."""
        problems = []
        for k, e in enumerate(self.entries):
            if e.start > e.end:
                problems.append(f"entry {k} has start {e.start} > end {e.end}")
            if not e.placements:
                problems.append(f"entry {k} has an empty placement set")
            if k + 1 < len(self.entries) and e.end >= self.entries[k + 1].start:
                problems.append(
                    f"entries {k} and {k + 1} are not ascending/disjoint "
                    f"([{e.start},{e.end}] then "
                    f"[{self.entries[k + 1].start},{self.entries[k + 1].end}])")
        return problems

    def __eq__(self, other):
        if not isinstance(other, DimensionRow):
            return NotImplemented
        return [(e.start, e.end, e.placements) for e in self.entries] == \
               [(e.start, e.end, e.placements) for e in other.entries]


@dataclass(frozen=True)
class ResolveOutcome:
    """Result of de-overlapping two placements: the loser's surviving
    pieces (none when it was swallowed whole, two when it was forked)."""

    winner: Placement
    loser_id: int
    pieces: tuple[Placement, ...]


def _interval_of(p: Placement, block: int, dim: str) -> DimensionInterval:
    return p.width_ranges[block] if dim == "w" else p.height_ranges[block]


def _with_interval(p: Placement, block: int, dim: str,
                   iv: DimensionInterval) -> Placement:
    if dim == "w":
        ranges = list(p.width_ranges)
        ranges[block] = iv
        return replace(p, width_ranges=tuple(ranges))
    ranges = list(p.height_ranges)
    ranges[block] = iv
    return replace(p, height_ranges=tuple(ranges))


def resolve_overlap(p: Placement, q: Placement,
                    fork_id: int = -1) -> ResolveOutcome:
    """Make two jointly-overlapping placements disjoint.

    The dimension with the smallest overlap extent is shrunk (ties: lowest
    block index, width before height), on the side of the placement with
    the higher average cost (ties: higher id).  A loser whose interval
    strictly contains the winner's on both sides forks into two placements,
    the right piece taking `fork_id`; a loser fully covered by the winner
    is discarded.
    """
    n = len(p.coords)
    best_len = None
    best_block = best_dim = None
    for i in range(n):
        for dim in ("w", "h"):
            a = _interval_of(p, i, dim)
            b = _interval_of(q, i, dim)
            ov = min(a.end, b.end) - max(a.start, b.start) + 1
            if ov <= 0:
                raise ValueError("placements do not jointly overlap")
            if best_len is None or ov < best_len:
                best_len, best_block, best_dim = ov, i, dim

    if p.average_cost > q.average_cost:
        loser, winner = p, q
    elif q.average_cost > p.average_cost:
        loser, winner = q, p
    else:
        loser, winner = (p, q) if p.id > q.id else (q, p)

    win = _interval_of(winner, best_block, best_dim)
    lose = _interval_of(loser, best_block, best_dim)

    pieces: list[Placement] = []
    if lose.start < win.start and lose.end > win.end:
        left = DimensionInterval(lose.start, win.start - 1)
        right = DimensionInterval(win.end + 1, lose.end)
        pieces.append(_with_interval(loser, best_block, best_dim, left))
        pieces.append(replace(
            _with_interval(loser, best_block, best_dim, right), id=fork_id))
    elif lose.start < win.start:
        left = DimensionInterval(lose.start, win.start - 1)
        pieces.append(_with_interval(loser, best_block, best_dim, left))
    elif lose.end > win.end:
        right = DimensionInterval(win.end + 1, lose.end)
        pieces.append(_with_interval(loser, best_block, best_dim, right))
    # else: the winner covers the loser entirely; it is discarded

    return ResolveOutcome(winner=winner, loser_id=loser.id,
                          pieces=tuple(pieces))


class MultiPlacementStructure:
    """Stored placements plus the 2N dimension rows that index them."""

    FORMAT_VERSION = 1

    def __init__(self, netlist: Netlist):
        self.netlist = netlist
        n = netlist.num_blocks
        self.width_rows = [DimensionRow() for _ in range(n)]
        self.height_rows = [DimensionRow() for _ in range(n)]
        self.placements: dict[int, Placement] = {}
        self.fallback: Placement | None = None
        self.generation_stats = None  # set by explorer.generate, not serialized
        self._next_id = 0

    # -- id management ------------------------------------------------

    def allocate_id(self) -> int:
        pid = self._next_id
        self._next_id += 1
        return pid

    def stored(self) -> list[Placement]:
        """Stored placements in ascending id order (fallback excluded)."""
        return [self.placements[k] for k in sorted(self.placements)]

    # -- queries --------------------------------------------------------

    def query_hits(self, sizes: SizeVector) -> set[int]:
        """Ids of stored placements whose box contains `sizes`, computed
        by intersecting the 2N row lookups (no fallback involved)."""
        result: set[int] | None = None
        for i in range(self.netlist.num_blocks):
            w, h = sizes[i]
            hit_w = self.width_rows[i]._entry_at(w)
            if hit_w is None:
                return set()
            hit_h = self.height_rows[i]._entry_at(h)
            if hit_h is None:
                return set()
            both = hit_w.placements & hit_h.placements
            result = both if result is None else result & both
            if not result:
                return set()
        return set(result) if result else set()

    def instantiate(self, sizes: SizeVector) -> Placement | None:
        """Map a size vector to its unique stored placement.

        Falls back to the template placement when no stored box contains
        the vector (None if the structure has no fallback installed).
        More than one hit means the structure is corrupted and raises.
        """
        if not sizes.within_designer_bounds(self.netlist):
            raise ValueError("size vector outside the designer bounds")
        hits = self.query_hits(sizes)
        if len(hits) > 1:
            raise StructureCorruptionError(
                f"size vector maps to {len(hits)} placements "
                f"{sorted(hits)}; the structure is corrupted")
        if hits:
            return self.placements[next(iter(hits))]
        return self.fallback

    def find_joint_overlaps(self, p: Placement) -> set[int]:
        """Ids of stored placements whose size box intersects `p`'s box in
        every block dimension, found by interval intersection over rows."""
        result: set[int] | None = None
        for i in range(self.netlist.num_blocks):
            wr, hr = p.width_ranges[i], p.height_ranges[i]
            ids_w = self.width_rows[i].ids_intersecting(wr.start, wr.end)
            if not ids_w:
                return set()
            ids_h = self.height_rows[i].ids_intersecting(hr.start, hr.end)
            if not ids_h:
                return set()
            both = ids_w & ids_h
            result = both if result is None else result & both
            if not result:
                return set()
        return result if result else set()

    # -- mutation -------------------------------------------------------

    def store_placement(self, p: Placement) -> None:
        """Add a placement to the rows, splitting entries at its interval
        boundaries.  The caller must have resolved overlaps already."""
        if p.id < 0:
            raise ValueError("placement needs an allocated id before storage")
        if p.id in self.placements:
            raise ValueError(f"placement id {p.id} already stored")
        if self.find_joint_overlaps(p):
            raise ValueError(
                "placement jointly overlaps a stored placement; "
                "resolve overlaps before storing")
        self._insert_rows(p)
        self.placements[p.id] = p
        if p.id >= self._next_id:
            self._next_id = p.id + 1

    def _insert_rows(self, p: Placement) -> None:
        for i in range(self.netlist.num_blocks):
            wr, hr = p.width_ranges[i], p.height_ranges[i]
            self.width_rows[i].insert(wr.start, wr.end, p.id)
            self.height_rows[i].insert(hr.start, hr.end, p.id)

    def _remove(self, pid: int) -> None:
        del self.placements[pid]
        for row in self.width_rows:
            row.remove_placement(pid)
        for row in self.height_rows:
            row.remove_placement(pid)

    def resolve_and_store(self, p: Placement) -> list[Placement]:
        """Run the full admission pipeline for a candidate placement.

        Overlapping stored placements are resolved one by one (ascending
        id); the candidate may shrink, fork, or be consumed entirely.
        Returns the candidate pieces that ended up stored.
        """
        if p.id < 0:
            p = replace(p, id=self.allocate_id())
        worklist = [p]
        stored: list[Placement] = []
        while worklist:
            cand = worklist.pop(0)
            alive = True
            while True:
                overlaps = self.find_joint_overlaps(cand)
                if not overlaps:
                    break
                q = self.placements[min(overlaps)]
                outcome = resolve_overlap(cand, q, fork_id=self._next_id)
                if outcome.loser_id == q.id:
                    # shrink or fork the stored placement in place
                    self._remove(q.id)
                    for piece in outcome.pieces:
                        if piece.id == q.id:
                            self.store_placement(piece)
                        else:
                            self.store_placement(
                                replace(piece, id=self.allocate_id()))
                else:
                    if not outcome.pieces:
                        alive = False
                        break
                    cand = outcome.pieces[0]
                    if len(outcome.pieces) == 2:
                        worklist.append(replace(
                            outcome.pieces[1], id=self.allocate_id()))
            if alive:
                self.store_placement(cand)
                stored.append(cand)
        return stored

    # -- coverage ---------------------------------------------------------

    def coverage(self) -> float:
        """Fraction of the designer size space claimed by stored boxes.

        Stored boxes are pairwise disjoint, so a plain sum is exact.
        Computed in exact integer arithmetic before the final division.
        """
        denom = 1
        for b in self.netlist.blocks:
            denom *= (b.max_width - b.min_width + 1) * \
                     (b.max_height - b.min_height + 1)
        total = 0
        for p in self.placements.values():
            vol = 1
            for wr, hr in zip(p.width_ranges, p.height_ranges):
                vol *= wr.span() * hr.span()
            total += vol
        return total / denom

    # -- serialization ------------------------------------------------

    def to_bytes(self) -> bytes:
        """Canonical JSON encoding; rows are rebuilt on load."""
        doc = {
            "version": self.FORMAT_VERSION,
            "netlist": netlist_to_json(self.netlist),
            "placements": [_placement_to_json(p) for p in self.stored()],
            "fallback": (_placement_to_json(self.fallback)
                         if self.fallback is not None else None),
        }
        return (json.dumps(doc, sort_keys=True,
                           separators=(",", ":")) + "\n").encode("utf-8")

    @classmethod
    def from_bytes(cls, data: bytes) -> "MultiPlacementStructure":
        try:
            doc = json.loads(data.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            pos = f" at char {exc.pos}" if hasattr(exc, "pos") else ""
            raise StructureFormatError(f"not valid JSON{pos}: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("version") != cls.FORMAT_VERSION:
            raise StructureFormatError(
                f"unsupported structure version {doc.get('version')!r}"
                if isinstance(doc, dict) else "structure file must be a JSON "
                                              "object")
        try:
            netlist = netlist_from_json(doc["netlist"])
            s = cls(netlist)
            for pd in doc["placements"]:
                p = _placement_from_json(pd, netlist.num_blocks)
                if p.id < 0 or p.id in s.placements:
                    raise StructureFormatError(
                        f"bad or duplicate placement id {p.id}")
                # rows are rebuilt verbatim; Eq.-style disjointness is the
                # business of `validate`, not the parser
                s._insert_rows(p)
                s.placements[p.id] = p
                s._next_id = max(s._next_id, p.id + 1)
            if doc.get("fallback") is not None:
                s.fallback = _placement_from_json(doc["fallback"],
                                                  netlist.num_blocks)
                s._next_id = max(s._next_id, s.fallback.id + 1)
            return s
        except StructureFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureFormatError(f"invalid structure document: {exc}") \
                from exc

    def save(self, path: str) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path: str) -> "MultiPlacementStructure":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def __eq__(self, other):
        if not isinstance(other, MultiPlacementStructure):
            return NotImplemented
        return (self.netlist == other.netlist
                and self.placements == other.placements
                and self.fallback == other.fallback
                and self.width_rows == other.width_rows
                and self.height_rows == other.height_rows)


def _placement_to_json(p: Placement) -> dict:
    return {
        "id": p.id,
        "coords": [[x, y] for x, y in p.coords],
        "width_ranges": [[iv.start, iv.end] for iv in p.width_ranges],
        "height_ranges": [[iv.start, iv.end] for iv in p.height_ranges],
        "best_cost": p.best_cost,
        "average_cost": p.average_cost,
        "best_sizes": ([[w, h] for w, h in p.best_sizes.entries]
                       if p.best_sizes is not None else None),
    }


def _placement_from_json(doc: dict, num_blocks: int) -> Placement:
    coords = tuple((int(x), int(y)) for x, y in doc["coords"])
    if len(coords) != num_blocks:
        raise StructureFormatError(
            f"placement {doc.get('id')} has {len(coords)} coords for "
            f"{num_blocks} blocks")
    widths = tuple(DimensionInterval(int(s), int(e))
                   for s, e in doc["width_ranges"])
    heights = tuple(DimensionInterval(int(s), int(e))
                    for s, e in doc["height_ranges"])
    if len(widths) != num_blocks or len(heights) != num_blocks:
        raise StructureFormatError(
            f"placement {doc.get('id')} range lists do not match block count")
    best_sizes = None
    if doc.get("best_sizes") is not None:
        best_sizes = SizeVector(tuple((int(w), int(h))
                                      for w, h in doc["best_sizes"]))
    return Placement(id=int(doc["id"]), coords=coords, width_ranges=widths,
                     height_ranges=heights,
                     best_cost=float(doc["best_cost"]),
                     average_cost=float(doc["average_cost"]),
                     best_sizes=best_sizes)
