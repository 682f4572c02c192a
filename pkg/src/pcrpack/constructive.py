"""Greedy initial solution: temperature-sorted first fit, one sample at a time."""

from __future__ import annotations

from typing import Optional

from .model import (
    DEFAULT_GEOMETRY,
    Group,
    Instance,
    Plate,
    PlateGeometry,
    Solution,
    Strip,
    ramp_ok,
)

__all__ = [
    "PlateBuilder",
    "AssignmentCursor",
    "assign_sample",
    "validate_temperature_diff",
    "build_initial",
    "sort_key",
]


class PlateBuilder:
    """Mutable plate used while samples are being placed.

    ``reagent_strip`` maps a group to the strip holding its reagent well on
    this plate, which doubles as the "reagent placed" flag.
    """

    __slots__ = ("geom", "counts", "temps", "occupied", "reagent_strip")

    def __init__(self, geom: PlateGeometry = DEFAULT_GEOMETRY):
        self.geom = geom
        k = geom.strips_per_plate
        self.counts: list[dict[str, int]] = [{} for _ in range(k)]
        self.temps: list[Optional[float]] = [None] * k
        self.occupied = [0] * k
        self.reagent_strip: dict[str, int] = {}

    @classmethod
    def from_plate(cls, plate: Plate, geom: PlateGeometry = DEFAULT_GEOMETRY) -> "PlateBuilder":
        b = cls(geom)
        for l, s in enumerate(plate.strips):
            b.counts[l] = dict(s.counts)
            b.occupied[l] = s.occupied
            b.temps[l] = None if s.is_empty else s.temperature
            for gid in s.reagents:
                b.reagent_strip[gid] = l
        return b

    def copy(self) -> "PlateBuilder":
        b = PlateBuilder.__new__(PlateBuilder)
        b.geom = self.geom
        b.counts = [dict(c) for c in self.counts]
        b.temps = list(self.temps)
        b.occupied = list(self.occupied)
        b.reagent_strip = dict(self.reagent_strip)
        return b

    def free(self) -> int:
        return self.geom.wells_per_plate - sum(self.occupied)

    def samples_of(self, gid: str) -> int:
        return sum(c.get(gid, 0) for c in self.counts)

    def add(self, gid: str, strip: int, temp: float) -> None:
        """Put one sample in ``strip``, reserving the group's reagent there if new."""
        c = self.counts[strip]
        c[gid] = c.get(gid, 0) + 1
        self.occupied[strip] += 1
        self.temps[strip] = temp
        if gid not in self.reagent_strip:
            self.reagent_strip[gid] = strip
            self.occupied[strip] += 1

    def remove(self, gid: str, strip: int) -> None:
        """Take one sample out of ``strip``, keeping the reagent rules intact.

        If the group's reagent sits in this strip and the strip loses its last
        sample of the group, the reagent moves to another strip of the plate
        holding the group that has a free well. If there is none the reagent is
        dropped and ``reagent_ok`` reports the plate as broken.
        """
        c = self.counts[strip]
        c[gid] -= 1
        self.occupied[strip] -= 1
        if c[gid] == 0:
            del c[gid]
            if self.reagent_strip.get(gid) == strip:
                self.occupied[strip] -= 1
                del self.reagent_strip[gid]
                for l, other in enumerate(self.counts):
                    if gid in other and self.occupied[l] < self.geom.wells_per_strip:
                        self.reagent_strip[gid] = l
                        self.occupied[l] += 1
                        break
        if self.occupied[strip] == 0:
            self.temps[strip] = None

    def reagent_ok(self) -> bool:
        """Every group present on the plate has its reagent."""
        return all(gid in self.reagent_strip for c in self.counts for gid in c)

    def remove_group(self, gid: str) -> int:
        """Remove every sample and the reagent of ``gid``; returns samples removed."""
        removed = 0
        for l, c in enumerate(self.counts):
            k = c.pop(gid, 0)
            if k:
                removed += k
                self.occupied[l] -= k
        l = self.reagent_strip.pop(gid, None)
        if l is not None:
            self.occupied[l] -= 1
        for l in range(len(self.counts)):
            if self.occupied[l] == 0:
                self.temps[l] = None
        return removed

    def freeze(self) -> Plate:
        reagents: list[set[str]] = [set() for _ in self.counts]
        for gid, l in self.reagent_strip.items():
            reagents[l].add(gid)
        strips = []
        for l, c in enumerate(self.counts):
            if c:
                strips.append(Strip(dict(c), frozenset(reagents[l]), self.temps[l]))
            else:
                strips.append(Strip())
        return Plate(tuple(strips))


AssignmentCursor = list  # list[PlateBuilder]; plates in creation order


def validate_temperature_diff(
    temp: float, strip: int, plate: PlateBuilder, max_temp_diff: float
) -> bool:
    """Whether the empty ``strip`` can take ``temp`` without breaking the ramp."""
    temps = list(plate.temps)
    temps[strip] = temp
    return ramp_ok(temps, max_temp_diff)


def _check_space(gid: str, strip: int, plate: PlateBuilder) -> bool:
    need = 1 if gid in plate.reagent_strip else 2
    return plate.occupied[strip] + need <= plate.geom.wells_per_strip


def assign_sample(
    group: Group, plate: PlateBuilder, max_temp_diff: Optional[float] = None
) -> bool:
    """Place one sample of ``group`` on ``plate``; False leaves the plate unchanged.

    Non-empty strips at the group's temperature are tried first, in strip
    order, then empty strips whose temperature would keep the plate's ramp
    feasible.
    """
    if max_temp_diff is None:
        max_temp_diff = plate.geom.max_temp_step
    gid, temp = group.id, group.temperature
    for l, t in enumerate(plate.temps):
        if t is not None and plate.counts[l] and t == temp and _check_space(gid, l, plate):
            plate.add(gid, l, temp)
            return True
    for l, t in enumerate(plate.temps):
        if plate.occupied[l] == 0 and validate_temperature_diff(temp, l, plate, max_temp_diff):
            plate.add(gid, l, temp)
            return True
    return False


def sort_key(g: Group) -> tuple:
    return (g.temperature, -g.size, g.id)


def build_initial(inst: Instance, geom: PlateGeometry = DEFAULT_GEOMETRY) -> Solution:
    """First-fit construction over groups sorted by temperature.

    Ties among groups at one temperature go to larger groups first, then by
    group id. A plate that rejected a sample of a group stays unchanged until
    the next sample of that group is offered, so the scan for the next sample
    resumes at the plate that took the previous one.
    """
    plates: AssignmentCursor = []
    for group in sorted(inst.groups, key=sort_key):
        start = 0
        for _ in range(group.size):
            q = start
            while q < len(plates):
                if assign_sample(group, plates[q], geom.max_temp_step):
                    break
                q += 1
            else:
                fresh = PlateBuilder(geom)
                assign_sample(group, fresh, geom.max_temp_step)
                plates.append(fresh)
                q = len(plates) - 1
            start = q
    return Solution(tuple(b.freeze() for b in plates), inst)
