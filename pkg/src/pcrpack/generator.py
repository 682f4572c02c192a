"""Random instances shaped like real sequencing sessions."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import Group, Instance

__all__ = ["GeneratorParams", "gen_instance", "PRESETS"]

Range = tuple[int, int]


@dataclass(frozen=True)
class GeneratorParams:
    samples: Range = (174, 3783)
    groups: Range = (27, 201)
    temperatures: Range = (10, 18)
    # Integer temperatures drawn from this closed range.
    temp_values: Range = (50, 72)
    seed: int = 0

    def check(self) -> None:
        for name in ("samples", "groups", "temperatures", "temp_values"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: empty range {lo}..{hi}")
            if lo < 1:
                raise ValueError(f"{name}: values must be positive")
        if self.groups[0] > self.samples[1]:
            raise ValueError("more groups than samples requested")
        n_values = self.temp_values[1] - self.temp_values[0] + 1
        if self.temperatures[0] > n_values:
            raise ValueError("not enough temperature values for the distinct-temperature count")
        if self.temperatures[0] > self.groups[1]:
            raise ValueError("more distinct temperatures than groups requested")


# Envelopes observed in real sessions: whole working days, the small
# 2-3 plate extracts, and desk-scale instances for exact checks.
PRESETS = {
    "session": GeneratorParams(),
    "file31": GeneratorParams(samples=(40, 40), groups=(24, 24), temperatures=(11, 11)),
    "small": GeneratorParams(samples=(40, 84), groups=(24, 68), temperatures=(11, 16)),
    "tiny": GeneratorParams(samples=(3, 24), groups=(1, 6), temperatures=(1, 4), temp_values=(50, 80)),
}


def _composition(total: int, parts: int, rng: random.Random) -> list[int]:
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    edges = [0, *cuts, total]
    return [b - a for a, b in zip(edges, edges[1:])]


def gen_instance(params: GeneratorParams) -> Instance:
    """Draw counts within the ranges, split samples into groups, assign temperatures.

    Every drawn temperature is used by at least one group. Identical params
    (seed included) give identical instances.
    """
    params.check()
    rng = random.Random(params.seed)
    n_samples = rng.randint(*params.samples)
    n_groups = rng.randint(params.groups[0], min(params.groups[1], n_samples))
    n_values = params.temp_values[1] - params.temp_values[0] + 1
    n_temps = rng.randint(params.temperatures[0], min(params.temperatures[1], n_groups, n_values))

    temps = rng.sample(range(params.temp_values[0], params.temp_values[1] + 1), n_temps)
    group_temps = temps + [rng.choice(temps) for _ in range(n_groups - n_temps)]
    rng.shuffle(group_temps)
    sizes = _composition(n_samples, n_groups, rng)

    groups = []
    code = 0
    for i, (size, temp) in enumerate(zip(sizes, group_temps), 1):
        codes = tuple(f"S{code + k + 1:05d}" for k in range(size))
        code += size
        groups.append(Group(f"G{i:03d}", codes, temp))
    return Instance(tuple(groups), {"source": "generated", "seed": str(params.seed)})
