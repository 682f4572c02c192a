"""Exact optimum for desk-sized instances.

The search assigns each group's samples to plates (a composition of the
group size over a set of plates) and checks every plate with an exact
packing test instead of enumerating wells. Within one plate only the wells
needed per temperature matter:

* samples of one temperature can share strips freely, and a group's reagent
  can always be put next to one of its samples, so ``W`` wells at one
  temperature fit in ``ceil(W / 16)`` strips;
* strips sorted by temperature need the fewest empty bridge strips, and no
  other order needs fewer.

So a plate is feasible iff those strips plus the bridges fit in six strips.
``tests/test_oracle.py`` checks this test against a strip-by-strip
enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Optional

from .constructive import sort_key
from .model import (
    DEFAULT_GEOMETRY,
    CostVector,
    Group,
    Instance,
    Plate,
    PlateGeometry,
    Solution,
    Strip,
    bridge_strips,
    plate_strip_demand,
)

__all__ = [
    "OracleLimits",
    "OracleResult",
    "OracleLimitError",
    "plate_strip_demand",
    "layout_plate",
    "exact_solve",
    "oracle_cost",
]


@dataclass(frozen=True)
class OracleLimits:
    max_plates: int = 2
    max_groups: int = 6
    max_samples: int = 24
    node_budget: int = 2_000_000

    def __post_init__(self) -> None:
        if min(self.max_plates, self.max_groups, self.max_samples, self.node_budget) < 1:
            raise ValueError("oracle limits must be positive")


class OracleResult(NamedTuple):
    solution: Solution
    proven: bool
    nodes: int


class OracleLimitError(ValueError):
    pass


def _pack_temperature(parts: list[tuple[str, int]], cap: int) -> list[tuple[dict[str, int], set[str]]]:
    """Split groups at one temperature into strips, reagents next to samples.

    Single-sample groups go first so that their two wells never straddle a
    strip boundary; larger groups can be cut anywhere.
    """
    parts = sorted(parts, key=lambda gc: (gc[1] != 1, gc[0]))
    strips: list[tuple[dict[str, int], set[str]]] = [({}, set())]
    room = cap
    for gid, count in parts:
        wells = count + 1
        pieces = []
        while wells:
            if room == 0:
                strips.append(({}, set()))
                room = cap
            take = min(room, wells)
            pieces.append((len(strips) - 1, take))
            room -= take
            wells -= take
        # Reagent goes into the first piece with at least two wells, or the
        # second piece when the first holds a single well.
        reagent_piece = 0 if pieces[0][1] >= 2 else 1
        for k, (s, take) in enumerate(pieces):
            samples = take - (1 if k == reagent_piece else 0)
            counts, reagents = strips[s]
            if samples:
                counts[gid] = counts.get(gid, 0) + samples
            if k == reagent_piece:
                reagents.add(gid)
    return strips


def layout_plate(
    content: dict[str, int], inst: Instance, geom: PlateGeometry = DEFAULT_GEOMETRY
) -> Plate:
    """Concrete strips for a plate holding ``content[gid]`` samples of each group.

    Raises ValueError if the content does not fit on one plate.
    """
    by_temp: dict[float, list[tuple[str, int]]] = {}
    for gid, c in content.items():
        if c > 0:
            by_temp.setdefault(inst.temperature_of(gid), []).append((gid, c))
    wells_at = {t: sum(c + 1 for _, c in parts) for t, parts in by_temp.items()}
    if plate_strip_demand(wells_at, geom) > geom.strips_per_plate:
        raise ValueError("content does not fit on one plate")
    strips: list[Strip] = []
    prev = None
    for t in sorted(by_temp):
        if prev is not None:
            strips.extend(Strip() for _ in range(bridge_strips(t - prev, geom.max_temp_step)))
        for counts, reagents in _pack_temperature(by_temp[t], geom.wells_per_strip):
            strips.append(Strip(counts, frozenset(reagents), t))
        prev = t
    strips.extend(Strip() for _ in range(geom.strips_per_plate - len(strips)))
    return Plate(tuple(strips))


def _compositions(total: int, k: int):
    """Ordered ways to write ``total`` as ``k`` positive parts."""
    for cuts in combinations(range(1, total), k - 1):
        edges = (0, *cuts, total)
        yield tuple(b - a for a, b in zip(edges, edges[1:]))


class _Search:
    def __init__(self, inst: Instance, plates: int, geom: PlateGeometry, budget: int):
        self.groups: list[Group] = sorted(inst.groups, key=sort_key)
        self.plates = plates
        self.geom = geom
        self.budget = budget
        self.nodes = 0
        self.exhausted = False
        self.best_spans = math.inf
        self.best: Optional[list[tuple[tuple[int, int], ...]]] = None
        self.wells = [dict() for _ in range(plates)]
        self.choice: list[tuple[tuple[int, int], ...]] = []

    def _options(self, used: int, size: int):
        # Plates not used yet are interchangeable; only the lowest of them may
        # be opened next, which removes plate-permutation symmetry.
        opened = list(range(used))
        fresh = list(range(used, self.plates))
        for k in range(1, min(self.plates, size) + 1):
            for n_new in range(0, min(k, len(fresh)) + 1):
                for old in combinations(opened, k - n_new):
                    chosen = old + tuple(fresh[:n_new])
                    for parts in _compositions(size, k):
                        yield chosen, parts, used + n_new

    def run(self, idx: int = 0, used: int = 0, spans: int = 0) -> None:
        if self.exhausted:
            return
        self.nodes += 1
        if self.nodes > self.budget:
            self.exhausted = True
            return
        remaining = len(self.groups) - idx
        if spans + remaining >= self.best_spans:
            return
        if idx == len(self.groups):
            if used == self.plates:
                self.best_spans = spans
                self.best = list(self.choice)
            return
        g = self.groups[idx]
        cap = self.geom.strips_per_plate
        for chosen, parts, now_used in self._options(used, g.size):
            ok = True
            for q, c in zip(chosen, parts):
                w = self.wells[q]
                w[g.temperature] = w.get(g.temperature, 0) + c + 1
            for q in chosen:
                if plate_strip_demand(self.wells[q], self.geom) > cap:
                    ok = False
                    break
            if ok:
                self.choice.append(tuple(zip(chosen, parts)))
                self.run(idx + 1, now_used, spans + len(chosen))
                self.choice.pop()
            for q, c in zip(chosen, parts):
                w = self.wells[q]
                w[g.temperature] -= c + 1
                if not w[g.temperature]:
                    del w[g.temperature]
            if self.exhausted:
                return


def exact_solve(
    inst: Instance,
    limits: OracleLimits = OracleLimits(),
    geom: PlateGeometry = DEFAULT_GEOMETRY,
) -> OracleResult:
    """Lexicographically optimal solution by exhaustive search.

    Plate counts are tried in increasing order, so the first count with a
    feasible assignment is optimal; within it the search minimises the number
    of (group, plate) pairs, which fixes the well count. ``proven`` is False
    when the node budget ran out, in which case the best solution seen so far
    is returned.
    """
    if inst.n > limits.max_groups:
        raise OracleLimitError(f"{inst.n} groups exceed the limit of {limits.max_groups}")
    if inst.total_samples > limits.max_samples:
        raise OracleLimitError(
            f"{inst.total_samples} samples exceed the limit of {limits.max_samples}"
        )
    nodes = 0
    budget = limits.node_budget
    for plates in range(1, limits.max_plates + 1):
        search = _Search(inst, plates, geom, budget - nodes)
        search.run()
        nodes += search.nodes
        if search.best is not None:
            sol = _build(inst, search.groups, search.best, plates, geom)
            return OracleResult(sol, not search.exhausted, nodes)
        if search.exhausted:
            raise OracleLimitError("node budget exhausted before any solution was found")
    raise OracleLimitError(f"no solution with at most {limits.max_plates} plates")


def _build(
    inst: Instance,
    groups: list[Group],
    choice: list[tuple[tuple[int, int], ...]],
    plates: int,
    geom: PlateGeometry,
) -> Solution:
    content: list[dict[str, int]] = [{} for _ in range(plates)]
    for g, placed in zip(groups, choice):
        for q, c in placed:
            content[q][g.id] = c
    sol = Solution(tuple(layout_plate(c, inst, geom) for c in content), inst)
    return sol.normalized()


def oracle_cost(inst: Instance, limits: OracleLimits = OracleLimits()) -> CostVector:
    return exact_solve(inst, limits).solution.cost
