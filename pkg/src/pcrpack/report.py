"""Occupancy summaries: rates, full plates and fill bands."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import DEFAULT_GEOMETRY, PlateGeometry, Solution, occupancy_rates

__all__ = ["BANDS", "Report", "band_of", "make_report", "format_report"]

BANDS = ("100", "[75,100)", "[50,75)", "[25,50)", "[0,25)")


def band_of(rate: float) -> str:
    if rate >= 100:
        return "100"
    if rate >= 75:
        return "[75,100)"
    if rate >= 50:
        return "[50,75)"
    if rate >= 25:
        return "[25,50)"
    return "[0,25)"


@dataclass
class Report:
    plates: int
    wells: int
    rates: list[float]
    full_plates: int
    first_non_full: Optional[float]
    bands: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "plates": self.plates,
            "wells": self.wells,
            "rates": self.rates,
            "full_plates": self.full_plates,
            "first_non_full": self.first_non_full,
            "bands": self.bands,
        }


def make_report(sol: Solution, geom: PlateGeometry = DEFAULT_GEOMETRY) -> Report:
    """Empty plates are dropped; rates are listed highest first."""
    sol = sol.without_empty_plates()
    rates = sorted(occupancy_rates(sol, geom), reverse=True)
    full = sum(1 for r in rates if r >= 100)
    rest = [r for r in rates if r < 100]
    counts = {b: 0 for b in BANDS}
    for r in rates:
        counts[band_of(r)] += 1
    return Report(
        plates=len(rates),
        wells=sol.cost.non_empty_wells,
        rates=rates,
        full_plates=full,
        first_non_full=rest[0] if rest else None,
        bands={b: c for b, c in counts.items() if c},
    )


def format_report(rep: Report) -> str:
    lines = [
        f"plates         {rep.plates}",
        f"occupied wells {rep.wells}",
        f"full plates    {rep.full_plates}",
        "first non-full "
        + ("-" if rep.first_non_full is None else f"{rep.first_non_full:.2f}%"),
        "",
        "plate  occupancy",
    ]
    lines += [f"{q:>5}  {r:>8.2f}%" for q, r in enumerate(rep.rates, 1)]
    lines += ["", "band       plates"]
    lines += [f"{b:<10} {rep.bands.get(b, 0):>6}" for b in BANDS]
    return "\n".join(lines) + "\n"
