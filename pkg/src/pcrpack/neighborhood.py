"""Neighbourhood moves for the annealer: strip exchange and grouping."""

from __future__ import annotations

import math
import random
from typing import NamedTuple, Optional

from .constructive import PlateBuilder, assign_sample
from .model import (
    DEFAULT_GEOMETRY,
    Group,
    Plate,
    PlateGeometry,
    Solution,
    Strip,
    ramp_ok,
)

__all__ = [
    "STRIP_EXCHANGE",
    "GROUPING",
    "RETRY_BUDGET",
    "MoveOutcome",
    "strip_exchange",
    "exchange_strips",
    "grouping_move",
    "consolidate",
    "draw_move_kind",
    "apply_movement",
]

STRIP_EXCHANGE = "strip-exchange"
GROUPING = "grouping"

RETRY_BUDGET = 32


class MoveOutcome(NamedTuple):
    solution: Solution
    kind: str
    plates: tuple[int, ...]


def _replace(sol: Solution, changes: dict[int, Plate]) -> Solution:
    plates = [changes.get(q, p) for q, p in enumerate(sol.plates)]
    return Solution(tuple(p for p in plates if not p.is_empty), sol.instance)


def _plate_ramp_ok(strips: list[Strip], step: float) -> bool:
    return ramp_ok([None if s.is_empty else s.temperature for s in strips], step)


def _repair_reagents(strips: list[Strip], incoming: int, geom: PlateGeometry) -> Optional[list[Strip]]:
    """Restore one reagent per group after ``strips[incoming]`` was swapped in.

    Duplicate reagents are dropped from the incoming strip. A group left
    without a reagent gets one in a strip holding its samples that still has
    a free well, the incoming strip first; if there is none the swap fails.
    """
    reagents = [set(s.reagents) for s in strips]
    occupied = [s.occupied for s in strips]
    holders: dict[str, list[int]] = {}
    for l, s in enumerate(strips):
        for gid in s.counts:
            holders.setdefault(gid, []).append(l)
    placed: dict[str, list[int]] = {}
    for l, rs in enumerate(reagents):
        for gid in rs:
            placed.setdefault(gid, []).append(l)

    touched = False
    for gid, ls in placed.items():
        if len(ls) > 1:
            drop = [l for l in ls if l == incoming] or ls[1:]
            for l in drop[: len(ls) - 1]:
                reagents[l].discard(gid)
                occupied[l] -= 1
            touched = True
    for gid, ls in holders.items():
        if gid in placed:
            continue
        order = sorted(ls, key=lambda l: (l != incoming, l))
        for l in order:
            if occupied[l] < geom.wells_per_strip:
                reagents[l].add(gid)
                occupied[l] += 1
                touched = True
                break
        else:
            return None
    if not touched:
        return strips
    return [
        s if reagents[l] == s.reagents else Strip(s.counts, frozenset(reagents[l]), s.temperature)
        for l, s in enumerate(strips)
    ]


def exchange_strips(
    sol: Solution, a: int, i: int, b: int, j: int, geom: PlateGeometry = DEFAULT_GEOMETRY
) -> Optional[Solution]:
    """Swap strip ``i`` of plate ``a`` with strip ``j`` of plate ``b``.

    Returns None when the swap breaks a ramp or leaves a group on a plate
    without room for its reagent.
    """
    if a == b:
        return None
    pa = list(sol.plates[a].strips)
    pb = list(sol.plates[b].strips)
    pa[i], pb[j] = pb[j], pa[i]
    step = geom.max_temp_step
    if not (_plate_ramp_ok(pa, step) and _plate_ramp_ok(pb, step)):
        return None
    ra = _repair_reagents(pa, i, geom)
    if ra is None:
        return None
    rb = _repair_reagents(pb, j, geom)
    if rb is None:
        return None
    return _replace(sol, {a: Plate(tuple(ra)), b: Plate(tuple(rb))})


def strip_exchange(
    sol: Solution,
    rng: random.Random,
    geom: PlateGeometry = DEFAULT_GEOMETRY,
    budget: int = RETRY_BUDGET,
) -> Optional[MoveOutcome]:
    p = len(sol.plates)
    if p < 2:
        return None
    k = geom.strips_per_plate
    for _ in range(budget):
        a, b = rng.sample(range(p), 2)
        i = rng.randrange(k)
        j = rng.randrange(k)
        new = exchange_strips(sol, a, i, b, j, geom)
        if new is not None:
            return MoveOutcome(new, STRIP_EXCHANGE, (a, b))
    return None


def _fill(builder: PlateBuilder, group: Group, count: int) -> Optional[PlateBuilder]:
    trial = builder.copy()
    step = trial.geom.max_temp_step
    for _ in range(count):
        if not assign_sample(group, trial, step):
            return None
    return trial


def _useful_strips(builder: PlateBuilder, temp: float) -> list[int]:
    """Strips whose samples, once evicted, would make room at ``temp``."""
    useful = []
    step = builder.geom.max_temp_step
    for l, t in enumerate(builder.temps):
        if t is None:
            continue
        if t == temp:
            useful.append(l)
            continue
        retuned = list(builder.temps)
        retuned[l] = temp
        if ramp_ok(retuned, step):
            useful.append(l)
    return useful


def _can_host(plate: Plate, gid: str, temp: float, geom: PlateGeometry) -> bool:
    """Cheap necessary condition for ``plate`` to take samples at ``temp``."""
    temps = plate.temperatures()
    if temp in temps:
        return True
    for l, t in enumerate(temps):
        retuned = list(temps)
        retuned[l] = temp
        if ramp_ok(retuned, geom.max_temp_step):
            return True
    return False


def consolidate(
    sol: Solution, gid: str, dest: int, src: int, geom: PlateGeometry = DEFAULT_GEOMETRY
) -> Optional[Solution]:
    """Move every sample of ``gid`` on plate ``src`` onto plate ``dest``.

    When ``dest`` lacks room, samples of other groups are sent to ``src`` one
    at a time until the group fits. Groups already on ``src`` go first, then
    groups whose temperature is closest to a strip temperature on ``src``,
    then smaller groups. Only samples in strips that can give room at the
    group's temperature are evicted.
    """
    if dest == src:
        return None
    inst = sol.instance
    group = inst.group(gid)
    if not _can_host(sol.plates[dest], gid, group.temperature, geom):
        return None
    sb = PlateBuilder.from_plate(sol.plates[src], geom)
    k = sb.remove_group(gid)
    if k == 0:
        return None
    db = PlateBuilder.from_plate(sol.plates[dest], geom)

    filled = _fill(db, group, k)
    if filled is not None:
        return _replace(sol, {dest: filled.freeze(), src: sb.freeze()})

    useful = _useful_strips(db, group.temperature)
    in_useful: dict[str, int] = {}
    for l in useful:
        for h, c in db.counts[l].items():
            if h != gid:
                in_useful[h] = in_useful.get(h, 0) + c
    if not in_useful:
        return None
    src_ids = {h for c in sb.counts for h in c}
    src_temps = [t for t in sb.temps if t is not None]

    def preference(h: str) -> tuple:
        t_h = inst.temperature_of(h)
        closeness = min((abs(t_h - t) for t in src_temps), default=math.inf)
        return (h not in src_ids, closeness, inst.group(h).size, h)

    need = k + (0 if gid in db.reagent_strip else 1)
    work = db.copy()
    evicted: list[Group] = []
    for h in sorted(in_useful, key=preference):
        hg = inst.group(h)
        for _ in range(in_useful[h]):
            strips = [l for l in useful if work.counts[l].get(h, 0) > 0]
            l = min(strips, key=lambda l: (work.temps[l] != group.temperature, work.occupied[l], l))
            work.remove(h, l)
            evicted.append(hg)
            if work.free() < need or not work.reagent_ok():
                continue
            filled = _fill(work, group, k)
            if filled is None:
                continue
            for eg in evicted:
                if not assign_sample(eg, sb, geom.max_temp_step):
                    return None
            return _replace(sol, {dest: filled.freeze(), src: sb.freeze()})
    return None


def grouping_move(
    sol: Solution,
    rng: random.Random,
    geom: PlateGeometry = DEFAULT_GEOMETRY,
    budget: int = RETRY_BUDGET,
) -> Optional[MoveOutcome]:
    """Join a random group's samples on one plate, or relocate a whole group.

    The group is drawn uniformly. If it spans several plates two of them are
    drawn and the samples on the second are moved onto the first; otherwise
    the whole group is moved to a random other plate.
    """
    p = len(sol.plates)
    if p < 2:
        return None
    groups = sol.instance.groups
    tried: set[tuple[str, int, int]] = set()
    for _ in range(budget):
        gid = groups[rng.randrange(len(groups))].id
        holding = sol.plates_of(gid)
        if len(holding) >= 2:
            dest, src = rng.sample(holding, 2)
        else:
            src = holding[0]
            dest = rng.randrange(p - 1)
            if dest >= src:
                dest += 1
        if (gid, dest, src) in tried:
            continue
        new = consolidate(sol, gid, dest, src, geom)
        if new is not None:
            return MoveOutcome(new, GROUPING, (dest, src))
        tried.add((gid, dest, src))
    return None


def draw_move_kind(se_prob: float, rng: random.Random) -> str:
    return STRIP_EXCHANGE if rng.random() < se_prob else GROUPING


def apply_movement(
    sol: Solution,
    se_prob: float,
    rng: random.Random,
    geom: PlateGeometry = DEFAULT_GEOMETRY,
    budget: int = RETRY_BUDGET,
) -> Optional[MoveOutcome]:
    """Draw a move kind and apply it, falling back to the other kind."""
    if not 0.0 <= se_prob <= 1.0:
        raise ValueError("se_prob must lie in [0, 1]")
    first = draw_move_kind(se_prob, rng)
    kinds = (first, GROUPING if first == STRIP_EXCHANGE else STRIP_EXCHANGE)
    for kind in kinds:
        move = strip_exchange if kind == STRIP_EXCHANGE else grouping_move
        out = move(sol, rng, geom, budget)
        if out is not None:
            return out
    return None
