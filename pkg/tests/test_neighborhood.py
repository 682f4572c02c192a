import random

import pytest

from helpers import worked_instance
from pcrpack.constructive import build_initial
from pcrpack.model import CostVector, validate_solution
from pcrpack.neighborhood import (
    GROUPING,
    STRIP_EXCHANGE,
    apply_movement,
    consolidate,
    draw_move_kind,
    exchange_strips,
    grouping_move,
    strip_exchange,
)


@pytest.fixture
def worked():
    inst = worked_instance()
    return inst, build_initial(inst)


def test_consolidating_split_group_saves_a_reagent(worked):
    inst, sol = worked
    new = consolidate(sol, "G11", 1, 0)
    assert new.cost == CostVector(2, 83)
    assert new.reagent_wells() == 14
    assert len(new.plates_of("G11")) == 1
    assert validate_solution(inst, new).ok


def test_consolidate_onto_full_plate_evicts(worked):
    inst, sol = worked
    new = consolidate(sol, "G11", 0, 1)
    assert new is not None
    assert validate_solution(inst, new).ok
    assert new.plates_of("G11") == [0]


def test_consolidate_same_plate_is_rejected(worked):
    _, sol = worked
    assert consolidate(sol, "G11", 0, 0) is None


def test_grouping_move_finds_the_saving(worked):
    inst, sol = worked
    costs = set()
    for seed in range(20):
        out = grouping_move(sol, random.Random(seed))
        assert out.kind == GROUPING
        assert validate_solution(inst, out.solution).ok
        costs.add(out.solution.cost)
    assert CostVector(2, 83) in costs


def test_exchange_needs_two_plates():
    inst = worked_instance()
    sol = build_initial(inst)
    assert exchange_strips(sol, 0, 0, 0, 1) is None
    one = build_initial(type(inst)(inst.groups[:2]))
    assert strip_exchange(one, random.Random(0)) is None
    assert grouping_move(one, random.Random(0)) is None
    assert apply_movement(one, 0.9, random.Random(0)) is None


def test_exchange_moves_strip_contents(worked):
    inst, sol = worked
    # Strip 6 of plate 1 (75) with the empty strip 3 of plate 2.
    new = exchange_strips(sol, 0, 5, 1, 2)
    assert new is not None
    assert validate_solution(inst, new).ok
    assert new.plates[1].strips[2].counts == {"G10": 10, "G11": 4}


def test_exchange_rejects_ramp_break(worked):
    _, sol = worked
    # 80 into the 50 slot next to 55 breaks the ramp.
    assert exchange_strips(sol, 0, 0, 1, 1) is None


def test_strip_exchange_preserves_feasibility(worked):
    inst, sol = worked
    rng = random.Random(3)
    for _ in range(50):
        out = strip_exchange(sol, rng)
        if out is None:
            continue
        assert out.kind == STRIP_EXCHANGE
        assert validate_solution(inst, out.solution).ok
        sol = out.solution


def test_draw_move_kind_frequency():
    rng = random.Random(1)
    draws = [draw_move_kind(0.9, rng) for _ in range(20000)]
    share = draws.count(STRIP_EXCHANGE) / len(draws)
    assert abs(share - 0.9) < 0.01
    assert {draw_move_kind(1.0, rng) for _ in range(100)} == {STRIP_EXCHANGE}
    assert {draw_move_kind(0.0, rng) for _ in range(100)} == {GROUPING}


def test_bad_probability_is_rejected(worked):
    _, sol = worked
    with pytest.raises(ValueError):
        apply_movement(sol, 1.5, random.Random(0))
