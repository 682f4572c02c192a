from helpers import make_instance
from pcrpack.model import Plate, Solution, Strip
from pcrpack.report import band_of, format_report, make_report


def plate_with(wells: int) -> Plate:
    """A plate holding ``wells`` occupied wells of group A at 60."""
    strips = []
    left = wells
    for _ in range(6):
        take = min(left, 16)
        if take == 0:
            strips.append(Strip())
        elif not strips:
            strips.append(Strip({"A": take - 1}, frozenset({"A"}), 60))
        else:
            strips.append(Strip({"A": take}, frozenset(), 60))
        left -= take
    return Plate(tuple(strips))


def solution(*wells):
    inst = make_instance([("A", 1, 60)])
    return Solution(tuple(plate_with(w) for w in wells), inst)


def test_full_and_nearly_full():
    rep = make_report(solution(94, 96))
    assert rep.rates == [100.0, 97.92]
    assert rep.bands == {"100": 1, "[75,100)": 1}
    assert rep.full_plates == 1
    assert rep.first_non_full == 97.92


def test_low_bands():
    rep = make_report(solution(63, 20))
    assert rep.bands == {"[50,75)": 1, "[0,25)": 1}
    assert rep.first_non_full == 65.63


def test_no_plates():
    rep = make_report(solution(0))
    assert rep.plates == 0 and rep.bands == {} and rep.first_non_full is None


def test_band_edges():
    assert [band_of(r) for r in (100, 99.99, 75, 74.99, 50, 25, 24.99, 0)] == [
        "100", "[75,100)", "[75,100)", "[50,75)", "[50,75)", "[25,50)", "[0,25)", "[0,25)",
    ]


def test_counts_add_up_and_table_renders():
    rep = make_report(solution(96, 96, 50, 10))
    assert rep.full_plates + sum(1 for r in rep.rates if r < 100) == rep.plates
    text = format_report(rep)
    assert "full plates    2" in text and "52.08%" in text
