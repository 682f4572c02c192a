"""Concrete well positions for a solution."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .model import DEFAULT_GEOMETRY, Plate, PlateGeometry, Solution

__all__ = ["WellPlacement", "PlacementPlan", "place_wells", "well_label", "virtual_temperatures"]

ROWS = "ABCDEFGH"


class WellPlacement(NamedTuple):
    kind: str  # "sample" or "reagent"
    code: str  # sample code, or the group id for a reagent well
    group: str
    plate: int  # 1-based
    strip: int  # 1-based
    row: int  # 1..8
    column: int  # 1..2 within the strip
    label: str  # absolute well, A1..H12


@dataclass
class PlacementPlan:
    wells: list[WellPlacement] = field(default_factory=list)
    # (plate, strip) -> temperature for strips that hold wells
    temperatures: dict[tuple[int, int], float] = field(default_factory=dict)
    # (plate, strip) -> virtual temperature for empty strips between used ones
    virtual: dict[tuple[int, int], float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "wells": [w._asdict() for w in self.wells],
            "strip_temperatures": [
                {"plate": q, "strip": l, "temperature": t, "virtual": False}
                for (q, l), t in sorted(self.temperatures.items())
            ]
            + [
                {"plate": q, "strip": l, "temperature": t, "virtual": True}
                for (q, l), t in sorted(self.virtual.items())
            ],
        }


def well_label(strip: int, row: int, column: int) -> str:
    """Absolute label; strip ``k`` covers plate columns ``2k-1`` and ``2k``."""
    return f"{ROWS[row - 1]}{2 * (strip - 1) + column}"


def virtual_temperatures(plate: Plate, step: float) -> dict[int, float]:
    """Temperatures for empty strips lying between used strips (0-based keys).

    Each empty strip moves at most ``step`` from its left neighbour towards
    the next used strip.
    """
    temps = plate.temperatures()
    live = [l for l, t in enumerate(temps) if t is not None]
    out = {}
    for a, b in zip(live, live[1:]):
        cur = temps[a]
        for l in range(a + 1, b):
            cur = cur + max(-step, min(step, temps[b] - cur))
            out[l] = cur
    return out


def place_wells(
    sol: Solution, seed: Optional[int] = None, geom: PlateGeometry = DEFAULT_GEOMETRY
) -> PlacementPlan:
    """Assign every sample code and reagent to a well.

    Within a strip, groups follow instance order; each group's samples fill
    column-major (rows 1-8 of the first column, then the second) and its
    reagent takes the next well. Sample codes are handed out in instance order
    as plates and strips are visited. With a seed, the wells of each strip
    are shuffled deterministically.
    """
    rows = geom.wells_per_strip // 2
    inst = sol.instance
    order = {g.id: k for k, g in enumerate(inst.groups)}
    next_code = {g.id: 0 for g in inst.groups}
    rng = random.Random(seed) if seed is not None else None
    plan = PlacementPlan()
    for q, plate in enumerate(sol.plates, 1):
        for l, t in virtual_temperatures(plate, geom.max_temp_step).items():
            plan.virtual[(q, l + 1)] = t
        for l, strip in enumerate(plate.strips, 1):
            if strip.is_empty:
                continue
            plan.temperatures[(q, l)] = strip.temperature
            items: list[tuple[str, str, str]] = []
            for gid in sorted(set(strip.counts) | strip.reagents, key=order.__getitem__):
                codes = inst.group(gid).sample_codes
                for _ in range(strip.counts.get(gid, 0)):
                    items.append(("sample", codes[next_code[gid]], gid))
                    next_code[gid] += 1
                if gid in strip.reagents:
                    items.append(("reagent", gid, gid))
            slots = list(range(len(items)))
            if rng is not None:
                slots = rng.sample(range(geom.wells_per_strip), len(items))
            for (kind, code, gid), k in zip(items, slots):
                row, col = k % rows + 1, k // rows + 1
                plan.wells.append(
                    WellPlacement(kind, code, gid, q, l, row, col, well_label(l, row, col))
                )
    return plan
