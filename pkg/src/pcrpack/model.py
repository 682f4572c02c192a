"""Domain types for PCR plate packing and the checks shared by every solver.

A plate has six strips of 16 wells (8 rows x 2 columns). Every well in a
strip is processed at one temperature, and consecutive strips of a plate may
differ by at most 5 degrees. Samples come in groups; a group has a fixed
processing temperature and needs one extra *reagent* well on every plate that
holds at least one of its samples. That reagent well must sit in a strip that
holds a sample of the same group.

Empty strips carry no processing temperature. When they sit between two
occupied strips they act as a bridge: a run of ``k`` empty strips between
temperatures ``a`` and ``b`` is feasible iff ``|a - b| <= step * (k + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

__all__ = [
    "PlateGeometry",
    "DEFAULT_GEOMETRY",
    "Group",
    "Instance",
    "Strip",
    "Plate",
    "Solution",
    "CostVector",
    "ObjectiveWeights",
    "Violation",
    "ValidationReport",
    "FeasibilityReport",
    "SolutionStructureError",
    "FAMILIES",
    "ramp_ok",
    "bridge_strips",
    "validate_instance",
    "validate_solution",
    "cost_vector",
    "compare_cost",
    "occupancy_rate",
    "occupancy_rates",
    "weighted_objective",
    "plate_lower_bound",
    "cost_lower_bound",
    "plate_strip_demand",
    "round_half_up",
]

# Tolerance for temperature comparisons; temperatures are normally integers.
TEMP_EPS = 1e-9

# Constraint families reported by validate_solution, in reporting order.
FAMILIES = (
    "capacity",
    "ramp",
    "temperature",
    "conservation",
    "reagent-sample",
    "reagent-missing",
    "reagent-duplicate",
)


@dataclass(frozen=True)
class PlateGeometry:
    strips_per_plate: int = 6
    wells_per_strip: int = 16
    rows_per_strip: int = 8
    cols_per_strip: int = 2
    max_temp_step: float = 5.0

    def __post_init__(self) -> None:
        if self.strips_per_plate * self.wells_per_strip != 96:
            raise ValueError("a plate must have exactly 96 wells")
        if self.rows_per_strip * self.cols_per_strip != self.wells_per_strip:
            raise ValueError("rows x cols must equal wells per strip")
        if self.max_temp_step <= 0:
            raise ValueError("max_temp_step must be positive")

    @property
    def wells_per_plate(self) -> int:
        return self.strips_per_plate * self.wells_per_strip

    @property
    def max_plate_span(self) -> float:
        """Widest temperature range one plate can cover."""
        return self.max_temp_step * (self.strips_per_plate - 1)


DEFAULT_GEOMETRY = PlateGeometry()


@dataclass(frozen=True)
class Group:
    id: str
    sample_codes: tuple[str, ...]
    temperature: float

    def __post_init__(self) -> None:
        if not isinstance(self.sample_codes, tuple):
            object.__setattr__(self, "sample_codes", tuple(self.sample_codes))

    @property
    def size(self) -> int:
        return len(self.sample_codes)


@dataclass(frozen=True)
class Instance:
    groups: tuple[Group, ...]
    metadata: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.groups, tuple):
            object.__setattr__(self, "groups", tuple(self.groups))

    @property
    def n(self) -> int:
        return len(self.groups)

    @cached_property
    def total_samples(self) -> int:
        return sum(g.size for g in self.groups)

    @cached_property
    def temperature_set(self) -> tuple[float, ...]:
        return tuple(sorted({g.temperature for g in self.groups}))

    @property
    def m(self) -> int:
        return len(self.temperature_set)

    @cached_property
    def by_id(self) -> dict[str, Group]:
        return {g.id: g for g in self.groups}

    def group(self, group_id: str) -> Group:
        return self.by_id[group_id]

    def temperature_of(self, group_id: str) -> float:
        return self.by_id[group_id].temperature


@dataclass(frozen=True)
class Strip:
    """Contents of one strip: samples per group, reagent wells and temperature.

    ``counts`` only holds groups with at least one sample. ``temperature`` is
    None for an empty strip unless a virtual temperature was recorded for it.
    """

    counts: Mapping[str, int] = field(default_factory=dict)
    reagents: frozenset[str] = frozenset()
    temperature: Optional[float] = None

    @cached_property
    def samples(self) -> int:
        return sum(self.counts.values())

    @cached_property
    def occupied(self) -> int:
        return self.samples + len(self.reagents)

    @property
    def is_empty(self) -> bool:
        return not self.counts and not self.reagents


EMPTY_STRIP = Strip()


@dataclass(frozen=True)
class Plate:
    strips: tuple[Strip, ...]

    @classmethod
    def empty(cls, geom: PlateGeometry = DEFAULT_GEOMETRY) -> "Plate":
        return cls((EMPTY_STRIP,) * geom.strips_per_plate)

    @cached_property
    def occupied(self) -> int:
        return sum(s.occupied for s in self.strips)

    @property
    def is_empty(self) -> bool:
        return all(s.is_empty for s in self.strips)

    @cached_property
    def group_ids(self) -> frozenset[str]:
        """Groups with at least one sample on this plate."""
        return frozenset(g for s in self.strips for g in s.counts)

    def samples_of(self, group_id: str) -> int:
        return sum(s.counts.get(group_id, 0) for s in self.strips)

    def temperatures(self) -> list[Optional[float]]:
        """Strip temperatures, None for empty strips (virtual ones dropped)."""
        return [None if s.is_empty else s.temperature for s in self.strips]


@dataclass(frozen=True)
class Solution:
    plates: tuple[Plate, ...]
    instance: Instance = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.plates, tuple):
            object.__setattr__(self, "plates", tuple(self.plates))

    @cached_property
    def cost(self) -> "CostVector":
        return cost_vector(self)

    def plates_of(self, group_id: str) -> list[int]:
        """Indices of plates holding at least one sample of the group."""
        return [q for q, p in enumerate(self.plates) if group_id in p.group_ids]

    def reagent_wells(self) -> int:
        return sum(len(s.reagents) for p in self.plates for s in p.strips)

    def without_empty_plates(self) -> "Solution":
        kept = tuple(p for p in self.plates if not p.is_empty)
        if len(kept) == len(self.plates):
            return self
        return Solution(kept, self.instance)

    def normalized(self) -> "Solution":
        """Empty plates removed, fullest plates first (stable on ties)."""
        kept = [p for p in self.plates if not p.is_empty]
        kept.sort(key=lambda p: -p.occupied)
        return Solution(tuple(kept), self.instance)


class CostVector(NamedTuple):
    """Lexicographic cost; tuple ordering is exactly the cost ordering."""

    non_empty_plates: int
    non_empty_wells: int


class ObjectiveWeights:
    """Plate weights for the weighted objective; defaults to ``w_q = q``."""

    def __init__(self, values: Optional[Mapping[int, float]] = None):
        self.values = dict(values) if values is not None else None
        if self.values:
            qs = sorted(self.values)
            if any(self.values[q] <= 0 for q in qs):
                raise ValueError("plate weights must be positive")
            if any(self.values[a] >= self.values[b] for a, b in zip(qs, qs[1:])):
                raise ValueError("plate weights must be strictly increasing")

    def __getitem__(self, q: int) -> float:
        if self.values is None:
            return q
        try:
            return self.values[q]
        except KeyError:
            raise KeyError(f"no weight defined for plate {q}") from None


class Violation(NamedTuple):
    family: str
    location: str
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {v.family for v in self.violations}

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


class FeasibilityReport(ValidationReport):
    @property
    def feasible(self) -> bool:
        return self.ok


class SolutionStructureError(ValueError):
    """The solution does not fit the instance it is checked against."""


def round_half_up(value: float | Fraction, places: int = 2) -> float:
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(repr(value))
    return float(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def bridge_strips(gap: float, step: float = 5.0) -> int:
    """Empty strips needed between two occupied strips ``gap`` degrees apart."""
    if gap <= step + TEMP_EPS:
        return 0
    return math.ceil(gap / step - TEMP_EPS) - 1


def ramp_ok(temps: Sequence[Optional[float]], step: float = 5.0) -> bool:
    """True iff the defined temperatures can be chained under the bridge rule."""
    prev = None
    gap = 0
    for t in temps:
        if t is None:
            gap += 1
            continue
        if prev is not None and abs(t - prev) > step * (gap + 1) + TEMP_EPS:
            return False
        prev = t
        gap = 0
    return True


def validate_instance(inst: Instance) -> ValidationReport:
    report = ValidationReport()
    seen_ids: set[str] = set()
    owner: dict[str, str] = {}
    if not inst.groups:
        report.violations.append(Violation("structure", "instance", "no groups"))
    for g in inst.groups:
        if g.id in seen_ids:
            report.violations.append(
                Violation("duplicate group id", g.id, f"group id {g.id!r} repeated")
            )
        seen_ids.add(g.id)
        if not g.sample_codes:
            report.violations.append(Violation("empty group", g.id, "no samples"))
        if not (g.temperature > 0):
            report.violations.append(
                Violation("non-positive temperature", g.id, f"temperature {g.temperature}")
            )
        local: set[str] = set()
        for code in g.sample_codes:
            if code in local:
                report.violations.append(
                    Violation("duplicate sample code", g.id, f"{code!r} repeated in group")
                )
                continue
            local.add(code)
            if code in owner:
                report.violations.append(
                    Violation(
                        "duplicate sample code",
                        g.id,
                        f"{code!r} also in group {owner[code]!r}",
                    )
                )
            else:
                owner[code] = g.id
    return report


def _check_structure(inst: Instance, sol: Solution, geom: PlateGeometry) -> None:
    known = inst.by_id
    for q, plate in enumerate(sol.plates, 1):
        if len(plate.strips) != geom.strips_per_plate:
            raise SolutionStructureError(
                f"plate {q} has {len(plate.strips)} strips, expected {geom.strips_per_plate}"
            )
        for l, strip in enumerate(plate.strips, 1):
            for gid, c in strip.counts.items():
                if gid not in known:
                    raise SolutionStructureError(f"plate {q} strip {l}: unknown group {gid!r}")
                if not isinstance(c, int) or c < 0:
                    raise SolutionStructureError(
                        f"plate {q} strip {l}: bad count {c!r} for group {gid!r}"
                    )
            for gid in strip.reagents:
                if gid not in known:
                    raise SolutionStructureError(
                        f"plate {q} strip {l}: reagent of unknown group {gid!r}"
                    )


def validate_solution(
    inst: Instance, sol: Solution, geom: PlateGeometry = DEFAULT_GEOMETRY
) -> FeasibilityReport:
    """Check every constraint family; an empty report means feasible.

    Raises SolutionStructureError when the solution refers to groups that the
    instance does not define or has malformed plates.
    """
    _check_structure(inst, sol, geom)
    out: list[Violation] = []
    totals = {g.id: 0 for g in inst.groups}

    for q, plate in enumerate(sol.plates, 1):
        reagent_count: dict[str, int] = {}
        for l, strip in enumerate(plate.strips, 1):
            where = f"plate {q} strip {l}"
            occ = strip.occupied
            if occ > geom.wells_per_strip:
                out.append(
                    Violation("capacity", where, f"{occ} wells > {geom.wells_per_strip}")
                )
            live = {g: c for g, c in strip.counts.items() if c > 0}
            for gid, c in live.items():
                totals[gid] += c
                t_g = inst.temperature_of(gid)
                if strip.temperature is None:
                    out.append(
                        Violation("temperature", where, f"group {gid!r} in strip with no temperature")
                    )
                elif abs(t_g - strip.temperature) > TEMP_EPS:
                    out.append(
                        Violation(
                            "temperature",
                            where,
                            f"group {gid!r} at {t_g} in strip at {strip.temperature}",
                        )
                    )
            for gid in sorted(strip.reagents):
                reagent_count[gid] = reagent_count.get(gid, 0) + 1
                if live.get(gid, 0) < 1:
                    out.append(
                        Violation("reagent-sample", where, f"reagent of {gid!r} without its samples")
                    )
        temps = [None if (not s.counts and not s.reagents) else s.temperature for s in plate.strips]
        if not ramp_ok(temps, geom.max_temp_step):
            out.append(
                Violation(
                    "ramp",
                    f"plate {q}",
                    f"temperatures {temps} exceed {geom.max_temp_step} per strip",
                )
            )
        present = sorted(plate.group_ids)
        for gid in present:
            if plate.samples_of(gid) > 0 and reagent_count.get(gid, 0) == 0:
                out.append(Violation("reagent-missing", f"plate {q}", f"group {gid!r} has no reagent"))
        for gid, c in sorted(reagent_count.items()):
            if c > 1:
                out.append(
                    Violation("reagent-duplicate", f"plate {q}", f"group {gid!r} has {c} reagents")
                )

    for g in inst.groups:
        if totals[g.id] != g.size:
            out.append(
                Violation(
                    "conservation",
                    f"group {g.id}",
                    f"{totals[g.id]} samples placed, {g.size} required",
                )
            )
    order = {f: k for k, f in enumerate(FAMILIES)}
    out.sort(key=lambda v: order.get(v.family, len(order)))
    return FeasibilityReport(out)


def cost_vector(sol: Solution) -> CostVector:
    plates = 0
    wells = 0
    for p in sol.plates:
        occ = p.occupied
        if occ:
            plates += 1
            wells += occ
    return CostVector(plates, wells)


def compare_cost(a: CostVector, b: CostVector) -> int:
    """-1 if ``a`` is better, 1 if ``b`` is better, 0 if equal."""
    a, b = tuple(a), tuple(b)
    return (a > b) - (a < b)


def occupancy_rate(occupied: int, geom: PlateGeometry = DEFAULT_GEOMETRY) -> float:
    return round_half_up(Fraction(100 * occupied, geom.wells_per_plate))


def occupancy_rates(sol: Solution, geom: PlateGeometry = DEFAULT_GEOMETRY) -> list[float]:
    """Percentage of occupied wells per plate, in plate order, 2 decimals."""
    return [occupancy_rate(p.occupied, geom) for p in sol.plates]


def weighted_objective(sol: Solution, weights: Optional[ObjectiveWeights] = None) -> float:
    """Sum of plate weight times samples on the plate; reagents are not weighted."""
    weights = weights or ObjectiveWeights()
    z = 0
    for q, plate in enumerate(sol.plates, 1):
        samples = sum(s.samples for s in plate.strips)
        if samples:
            z += weights[q] * samples
    return z


def plate_lower_bound(inst: Instance, geom: PlateGeometry = DEFAULT_GEOMETRY) -> int:
    """Capacity-only bound: every group needs at least one reagent well."""
    return math.ceil((inst.total_samples + inst.n) / geom.wells_per_plate)


def plate_strip_demand(wells_at: Mapping[float, int], geom: PlateGeometry = DEFAULT_GEOMETRY) -> int:
    """Fewest strips one plate needs for the given wells per temperature.

    Wells at one temperature share strips freely, and sorting strips by
    temperature needs the fewest empty bridge strips between them.
    """
    temps = sorted(t for t, w in wells_at.items() if w > 0)
    strips = sum(math.ceil(wells_at[t] / geom.wells_per_strip) for t in temps)
    step = geom.max_temp_step
    return strips + sum(bridge_strips(b - a, step) for a, b in zip(temps, temps[1:]))


def _span_cover(temps: Iterable[float], span: float) -> int:
    count = 0
    start = None
    for t in sorted(set(temps)):
        if start is None or t - start > span + TEMP_EPS:
            count += 1
            start = t
    return count


def _strips_for(temps: Sequence[float], step: float) -> int:
    """Fewest strips a plate needs to hold the sorted temperatures ``temps``."""
    return len(temps) + sum(bridge_strips(b - a, step) for a, b in zip(temps, temps[1:]))


def _temperature_cover(temps: Sequence[float], geom: PlateGeometry, exact_limit: int = 10) -> int:
    """Fewest plates whose strips can hold every temperature at least once.

    Exact breadth-first set cover for up to ``exact_limit`` temperatures,
    otherwise the weaker cover by ranges of ``max_plate_span`` degrees.
    """
    temps = sorted(set(temps))
    m = len(temps)
    if m == 0:
        return 0
    if m > exact_limit:
        return _span_cover(temps, geom.max_plate_span)
    k = geom.strips_per_plate
    step = geom.max_temp_step
    by_first: list[list[int]] = [[] for _ in range(m)]

    def extend(first: int, last: int, mask: int, strips: int) -> None:
        by_first[first].append(mask)
        for nxt in range(last + 1, m):
            more = 1 + bridge_strips(temps[nxt] - temps[last], step)
            if strips + more <= k:
                extend(first, nxt, mask | (1 << nxt), strips + more)

    for i in range(m):
        extend(i, i, 1 << i, 1)
    full = (1 << m) - 1
    frontier = {0}
    seen = {0}
    plates = 0
    while full not in frontier:
        plates += 1
        nxt_frontier = set()
        for covered in frontier:
            i = next(j for j in range(m) if not covered >> j & 1)
            for s in by_first[i]:
                new = covered | s
                if new not in seen:
                    seen.add(new)
                    nxt_frontier.add(new)
        frontier = nxt_frontier
    return plates


def cost_lower_bound(inst: Instance, geom: PlateGeometry = DEFAULT_GEOMETRY) -> CostVector:
    """A cost no feasible solution can beat.

    The plate part is the largest of three relaxations: well capacity, strip
    count (each temperature needs whole strips for its samples and at least
    one reagent per group), and covering the temperature set with plates that
    can each hold a ramp of strips. A single plate is checked exactly. Wells
    can never drop below one reagent per group.
    """
    if not inst.groups:
        return CostVector(0, 0)
    wells_at: dict[float, int] = {}
    for g in inst.groups:
        wells_at[g.temperature] = wells_at.get(g.temperature, 0) + g.size + 1
    strips = sum(math.ceil(w / geom.wells_per_strip) for w in wells_at.values())
    plates = max(
        plate_lower_bound(inst, geom),
        math.ceil(strips / geom.strips_per_plate),
        _temperature_cover(list(wells_at), geom),
    )
    # One plate is an exact question: sorted strips plus bridges must fit.
    if plates == 1 and plate_strip_demand(wells_at, geom) > geom.strips_per_plate:
        plates = 2
    return CostVector(plates, inst.total_samples + inst.n)
