from collections import Counter

from helpers import make_instance, worked_instance
from pcrpack.annealing import anneal
from pcrpack.constructive import build_initial
from pcrpack.model import Plate, Solution, Strip
from pcrpack.placement import place_wells, virtual_temperatures, well_label


def test_three_samples_then_reagent():
    inst = make_instance([("A", 3, 60)])
    plan = place_wells(build_initial(inst))
    cells = [(w.kind, w.row, w.column) for w in plan.wells]
    assert cells == [("sample", 1, 1), ("sample", 2, 1), ("sample", 3, 1), ("reagent", 4, 1)]
    assert [w.label for w in plan.wells] == ["A1", "B1", "C1", "D1"]


def test_column_major_spills_to_second_column():
    inst = make_instance([("A", 10, 60)])
    plan = place_wells(build_initial(inst))
    assert plan.wells[8].label == "A2"
    assert plan.wells[-1].kind == "reagent" and plan.wells[-1].label == "C2"


def test_labels_per_strip():
    assert well_label(1, 1, 1) == "A1"
    assert well_label(6, 8, 2) == "H12"
    assert well_label(3, 2, 1) == "B5"


def test_empty_strip_has_no_wells():
    inst = make_instance([("A", 1, 55), ("B", 1, 75)])
    sol = build_initial(inst)
    plan = place_wells(sol)
    assert {w.strip for w in plan.wells} == {1, 5}
    assert plan.virtual == {(1, 2): 60, (1, 3): 65, (1, 4): 70}


def test_every_code_once_and_wells_match_cost():
    inst = worked_instance()
    sol, _ = anneal(inst)
    plan = place_wells(sol)
    codes = [w.code for w in plan.wells if w.kind == "sample"]
    assert sorted(codes) == sorted(c for g in inst.groups for c in g.sample_codes)
    assert len(plan.wells) == sol.cost.non_empty_wells
    labels = [(w.plate, w.label) for w in plan.wells]
    assert len(set(labels)) == len(labels)


def test_seeded_shuffle():
    inst = worked_instance()
    sol = build_initial(inst)
    a = place_wells(sol, seed=1)
    assert a == place_wells(sol, seed=1)
    b = place_wells(sol, seed=2)
    assert a != b
    key = lambda plan: Counter((w.group, w.plate, w.strip, w.kind) for w in plan.wells)
    assert key(a) == key(b) == key(place_wells(sol))


def test_virtual_temperatures_step_towards_target():
    strips = (Strip({"A": 1}, frozenset({"A"}), 50), Strip(), Strip(), Strip({"B": 1}, frozenset({"B"}), 58))
    plate = Plate(strips + (Strip(), Strip()))
    assert virtual_temperatures(plate, 5) == {1: 55, 2: 58}
