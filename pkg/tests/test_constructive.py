from helpers import make_instance, worked_instance
from pcrpack.constructive import (
    PlateBuilder,
    assign_sample,
    build_initial,
    sort_key,
    validate_temperature_diff,
)
from pcrpack.model import CostVector, Group, validate_solution


def test_single_group_uses_one_strip():
    inst = make_instance([("A", 3, 60)])
    sol = build_initial(inst)
    assert sol.cost == CostVector(1, 4)
    first = sol.plates[0].strips[0]
    assert first.counts == {"A": 3} and first.reagents == {"A"}


def test_reagent_reserved_with_first_sample():
    b = PlateBuilder()
    g = Group("A", ("a",), 60)
    assert assign_sample(g, b)
    assert b.occupied[0] == 2
    assert b.reagent_strip == {"A": 0}


def test_full_strip_spills_to_next():
    inst = make_instance([("A", 20, 60)])
    strips = build_initial(inst).plates[0].strips
    assert strips[0].occupied == 16
    assert strips[1].counts == {"A": 5}
    assert strips[0].reagents == {"A"} and not strips[1].reagents


def test_hot_group_skips_strips_to_bridge():
    inst = make_instance([("A", 1, 55), ("B", 1, 75)])
    sol = build_initial(inst)
    temps = sol.plates[0].temperatures()
    assert temps == [55, None, None, None, 75, None]


def test_temperature_diff_check():
    b = PlateBuilder()
    assign_sample(Group("A", ("a",), 50), b)
    assert validate_temperature_diff(55, 1, b, 5)
    assert not validate_temperature_diff(61, 1, b, 5)
    assert validate_temperature_diff(60, 2, b, 5)


def test_groups_sorted_by_temperature_then_size():
    groups = [Group("B", ("x",), 60), Group("A", ("y", "z"), 60), Group("C", ("w",), 55)]
    assert [g.id for g in sorted(groups, key=sort_key)] == ["C", "A", "B"]


def test_worked_instance_greedy_cost():
    inst = worked_instance()
    sol = build_initial(inst)
    assert sol.cost == CostVector(2, 84)
    assert sol.reagent_wells() == 15
    assert sol.plates_of("G11") == [0, 1]
    assert validate_solution(inst, sol).ok


def test_remove_relocates_reagent():
    b = PlateBuilder()
    g = Group("A", tuple("abcdefghijklmnopq"), 60)
    for _ in range(17):
        assign_sample(g, b)
    # 15 samples + reagent in strip 0, 2 samples in strip 1.
    for _ in range(15):
        b.remove("A", 0)
    assert b.reagent_strip == {"A": 1}
    assert b.reagent_ok()
    assert b.temps[0] is None


def test_new_plate_when_ramp_blocks():
    inst = make_instance([("A", 1, 40), ("B", 1, 90)])
    assert build_initial(inst).cost == CostVector(2, 4)
