from fractions import Fraction

import pytest

from helpers import make_instance, worked_instance
from pcrpack.constructive import build_initial
from pcrpack.model import (
    CostVector,
    Group,
    Instance,
    ObjectiveWeights,
    Plate,
    PlateGeometry,
    Solution,
    SolutionStructureError,
    Strip,
    bridge_strips,
    compare_cost,
    cost_lower_bound,
    cost_vector,
    occupancy_rate,
    occupancy_rates,
    plate_lower_bound,
    plate_strip_demand,
    ramp_ok,
    round_half_up,
    validate_instance,
    validate_solution,
    weighted_objective,
)


def plate(*strips):
    strips = list(strips) + [Strip()] * (6 - len(strips))
    return Plate(tuple(strips))


def test_default_geometry():
    g = PlateGeometry()
    assert g.wells_per_plate == 96
    assert g.max_plate_span == 25


def test_geometry_rejects_odd_strip():
    with pytest.raises(ValueError):
        PlateGeometry(wells_per_strip=15)


@pytest.mark.parametrize(
    "gap, need",
    [(0, 0), (5, 0), (5.5, 1), (10, 1), (10.1, 2), (15, 2), (20, 3), (25, 4)],
)
def test_bridge_strips(gap, need):
    assert bridge_strips(gap) == need


def test_ramp_accepts_five_degree_steps():
    assert ramp_ok([50, 55, 60, 65, 70, 75])
    assert not ramp_ok([50, 56])


def test_ramp_bridges_through_empty_strips():
    assert ramp_ok([55, None, None, None, 75, None])
    assert not ramp_ok([55, None, None, 75])
    assert ramp_ok([None, None, 90, None, None, None])


def test_validate_instance_flags_shared_codes():
    inst = Instance((Group("A", ("x", "y"), 60), Group("B", ("y",), 60)))
    rep = validate_instance(inst)
    assert "duplicate sample code" in rep.families()
    assert any("'y'" in v.detail for v in rep)


def test_validate_instance_flags_bad_groups():
    inst = Instance((Group("A", (), 60), Group("A", ("z",), 0)))
    assert validate_instance(inst).families() == {
        "empty group",
        "duplicate group id",
        "non-positive temperature",
    }


def test_greedy_solution_is_feasible():
    inst = worked_instance()
    assert validate_solution(inst, build_initial(inst)).ok


@pytest.fixture
def one_group():
    return make_instance([("A", 3, 60)])


def test_capacity_violation(one_group):
    inst = make_instance([("A", 16, 60)])
    sol = Solution((plate(Strip({"A": 16}, frozenset({"A"}), 60)),), inst)
    assert validate_solution(inst, sol).families() == {"capacity"}


def test_missing_reagent(one_group):
    sol = Solution((plate(Strip({"A": 3}, frozenset(), 60)),), one_group)
    assert validate_solution(one_group, sol).families() == {"reagent-missing"}


def test_reagent_without_samples(one_group):
    sol = Solution(
        (plate(Strip({"A": 3}, frozenset(), 60), Strip({}, frozenset({"A"}), 60)),), one_group
    )
    assert validate_solution(one_group, sol).families() == {"reagent-sample"}


def test_duplicate_reagent(one_group):
    sol = Solution(
        (plate(Strip({"A": 2}, frozenset({"A"}), 60), Strip({"A": 1}, frozenset({"A"}), 60)),),
        one_group,
    )
    assert validate_solution(one_group, sol).families() == {"reagent-duplicate"}


def test_conservation(one_group):
    sol = Solution((plate(Strip({"A": 2}, frozenset({"A"}), 60)),), one_group)
    assert validate_solution(one_group, sol).families() == {"conservation"}


def test_temperature_mismatch(one_group):
    sol = Solution((plate(Strip({"A": 3}, frozenset({"A"}), 61)),), one_group)
    assert validate_solution(one_group, sol).families() == {"temperature"}


def test_ramp_violation():
    inst = make_instance([("A", 1, 50), ("B", 1, 70)])
    sol = Solution(
        (plate(Strip({"A": 1}, frozenset({"A"}), 50), Strip({"B": 1}, frozenset({"B"}), 70)),),
        inst,
    )
    assert validate_solution(inst, sol).families() == {"ramp"}


def test_unknown_group_is_structural(one_group):
    sol = Solution((plate(Strip({"Z": 3}, frozenset({"Z"}), 60)),), one_group)
    with pytest.raises(SolutionStructureError):
        validate_solution(one_group, sol)


def test_short_plate_is_structural(one_group):
    sol = Solution((Plate((Strip({"A": 3}, frozenset({"A"}), 60),)),), one_group)
    with pytest.raises(SolutionStructureError):
        validate_solution(one_group, sol)


def test_cost_ignores_empty_plates(one_group):
    full = plate(Strip({"A": 3}, frozenset({"A"}), 60))
    sol = Solution((Plate.empty(), full), one_group)
    assert cost_vector(sol) == CostVector(1, 4)
    assert sol.normalized().plates == (full,)


def test_compare_cost_is_lexicographic():
    assert compare_cost(CostVector(1, 90), CostVector(2, 10)) == -1
    assert compare_cost(CostVector(2, 83), CostVector(2, 84)) == -1
    assert compare_cost(CostVector(2, 83), CostVector(2, 83)) == 0
    assert compare_cost(CostVector(3, 0), CostVector(2, 96)) == 1


@pytest.mark.parametrize(
    "wells, rate",
    [(96, 100.0), (94, 97.92), (63, 65.63), (20, 20.83), (2, 2.08), (49, 51.04), (34, 35.42)],
)
def test_occupancy_rates_reference_values(wells, rate):
    assert occupancy_rate(wells) == rate


def test_round_half_up_on_ties():
    assert round_half_up(Fraction(5, 1000)) == 0.01
    assert round_half_up(2.675) == 2.68
    assert round_half_up(Fraction(100 * 21, 96)) == 21.88


def test_occupancy_rates_in_plate_order():
    inst = worked_instance()
    assert occupancy_rates(build_initial(inst)) == [69.79, 17.71]


def test_weighted_objective_counts_samples_only():
    inst = make_instance([("A", 3, 60), ("B", 2, 60)])
    sol = Solution(
        (
            plate(Strip({"A": 3}, frozenset({"A"}), 60)),
            plate(Strip({"B": 2}, frozenset({"B"}), 60)),
        ),
        inst,
    )
    assert weighted_objective(sol) == 3 * 1 + 2 * 2
    assert weighted_objective(sol, ObjectiveWeights({1: 1, 2: 10})) == 23


def test_objective_weights_checks():
    with pytest.raises(ValueError):
        ObjectiveWeights({1: 2, 2: 2})
    with pytest.raises(ValueError):
        ObjectiveWeights({1: 0})
    with pytest.raises(KeyError):
        ObjectiveWeights({1: 1})[2]


def test_plate_lower_bound():
    assert plate_lower_bound(make_instance([("A", 95, 60)])) == 1
    assert plate_lower_bound(make_instance([("A", 95, 60), ("B", 1, 60)])) == 2


def test_strip_demand_adds_bridges():
    assert plate_strip_demand({50: 4, 70: 2}) == 2 + 3
    assert plate_strip_demand({60: 17}) == 2


def test_cost_lower_bound_uses_temperature_spread():
    inst = make_instance([("A", 1, 40), ("B", 1, 90)])
    assert cost_lower_bound(inst) == CostVector(2, 4)


def test_cost_lower_bound_single_plate_check():
    # Each temperature fits somewhere, but 5 strips + 2 bridges exceed 6.
    inst = make_instance([("A", 20, 50), ("B", 20, 55), ("C", 1, 70)])
    assert cost_lower_bound(inst).non_empty_plates == 2
