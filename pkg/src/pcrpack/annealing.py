"""Simulated annealing over plate layouts with a lexicographic cost."""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

from .constructive import build_initial
from .model import (
    DEFAULT_GEOMETRY,
    CostVector,
    Instance,
    PlateGeometry,
    Solution,
    compare_cost,
    cost_lower_bound,
)
from .neighborhood import RETRY_BUDGET, apply_movement

__all__ = [
    "SAParams",
    "AcceptedStep",
    "AnnealTrace",
    "AnnealResult",
    "acceptance_probability",
    "cooling_steps",
    "update_best",
    "anneal",
    "anneal_restarts",
]


@dataclass(frozen=True)
class SAParams:
    t_max: float = 100.0
    t_min: float = 1e-10
    alpha: float = 0.9
    max_iter: int = 1000
    se_prob: float = 0.9
    seed: int = 0
    # Multiplier on plate-count increases before they enter exp(-delta/T).
    plate_delta_scale: float = 1.0
    retry_budget: int = RETRY_BUDGET
    # Stop once the best cost equals cost_lower_bound; the result is unchanged.
    stop_at_bound: bool = True
    record_steps: bool = True

    def __post_init__(self) -> None:
        if not 0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 <= self.se_prob <= 1:
            raise ValueError("se_prob must lie in [0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.plate_delta_scale <= 0:
            raise ValueError("plate_delta_scale must be positive")


class AcceptedStep(NamedTuple):
    iteration: int
    temperature: float
    cost: CostVector
    kind: str


@dataclass
class AnnealTrace:
    steps: list[AcceptedStep] = field(default_factory=list)
    # (move number, best cost) each time the global best improves.
    best: list[tuple[int, CostVector]] = field(default_factory=list)
    moves: int = 0
    stopped: str = "completed"

    def best_costs(self) -> list[CostVector]:
        return [c for _, c in self.best]


class AnnealResult(NamedTuple):
    solution: Solution
    trace: AnnealTrace
    seed: int


def acceptance_probability(delta: float, temperature: float) -> float:
    """exp(-delta / T) clamped to [0, 1]."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if delta <= 0:
        return 1.0
    return min(1.0, math.exp(-delta / temperature))


def cooling_steps(params: SAParams) -> int:
    """Temperatures visited by one inner loop: T = t_max, alpha*T, ... >= t_min."""
    n = 0
    t = params.t_max
    while t >= params.t_min:
        n += 1
        t *= params.alpha
    return n


def update_best(candidate: Solution, best: Solution) -> Solution:
    """The better of the two by cost; ties keep ``best``."""
    return candidate if compare_cost(candidate.cost, best.cost) < 0 else best


def anneal(
    inst: Instance,
    params: SAParams = SAParams(),
    geom: PlateGeometry = DEFAULT_GEOMETRY,
    initial: Optional[Solution] = None,
) -> tuple[Solution, AnnealTrace]:
    """Run the annealer from the greedy solution and return the best layout found.

    The returned solution has empty plates removed and the fullest plates
    first. A worse neighbour is accepted with probability exp(-delta/T), where
    delta is the plate-count increase (times ``plate_delta_scale``) when plate
    counts differ and the well-count increase otherwise.
    """
    rng = random.Random(params.seed)
    current = initial if initial is not None else build_initial(inst, geom)
    best = current
    trace = AnnealTrace()
    trace.best.append((0, best.cost))
    bound = cost_lower_bound(inst, geom) if params.stop_at_bound else None
    if bound is not None and best.cost == bound:
        trace.stopped = "bound"
        return best.normalized(), trace

    for iteration in range(params.max_iter):
        t = params.t_max
        while t >= params.t_min:
            out = apply_movement(current, params.se_prob, rng, geom, params.retry_budget)
            if out is None:
                trace.stopped = "no-move"
                return best.normalized(), trace
            trace.moves += 1
            new = out.solution
            new_cost, cur_cost = new.cost, current.cost
            if compare_cost(new_cost, best.cost) < 0:
                best = new
                trace.best.append((trace.moves, new_cost))

            if new_cost[0] < cur_cost[0]:
                accept = True
            elif new_cost[0] == cur_cost[0]:
                if new_cost[1] <= cur_cost[1]:
                    accept = True
                else:
                    delta = new_cost[1] - cur_cost[1]
                    accept = rng.random() < acceptance_probability(delta, t)
            else:
                delta = (new_cost[0] - cur_cost[0]) * params.plate_delta_scale
                accept = rng.random() < acceptance_probability(delta, t)
            if accept:
                current = new
                if params.record_steps:
                    trace.steps.append(AcceptedStep(iteration, t, new_cost, out.kind))

            if bound is not None and best.cost == bound:
                trace.stopped = "bound"
                return best.normalized(), trace
            t *= params.alpha
    return best.normalized(), trace


def _run(args: tuple) -> AnnealResult:
    inst, params, geom = args
    sol, trace = anneal(inst, params, geom)
    return AnnealResult(sol, trace, params.seed)


def anneal_restarts(
    inst: Instance,
    params: SAParams = SAParams(),
    restarts: int = 5,
    geom: PlateGeometry = DEFAULT_GEOMETRY,
    workers: int = 1,
) -> AnnealResult:
    """Best of ``restarts`` independent runs seeded ``seed, seed+1, ...``.

    Ties go to the lowest seed, so the result does not depend on ``workers``.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    jobs = [(inst, replace(params, seed=params.seed + r), geom) for r in range(restarts)]
    if workers > 1 and restarts > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = []
        for job in jobs:
            res = _run(job)
            results.append(res)
            if params.stop_at_bound and res.trace.stopped == "bound":
                break
    best = results[0]
    for res in results[1:]:
        if compare_cost(res.solution.cost, best.solution.cost) < 0:
            best = res
    return best
