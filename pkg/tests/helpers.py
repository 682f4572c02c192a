"""Shared builders and strategies for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

from hypothesis import strategies as st

from pcrpack.io import parse_instance
from pcrpack.model import Group, Instance

DATA = Path(__file__).parent / "data"


def make_instance(rows) -> Instance:
    """``rows`` is a list of (group id, sample count, temperature)."""
    groups = []
    code = 0
    for gid, size, temp in rows:
        groups.append(Group(gid, tuple(f"S{code + k + 1:04d}" for k in range(size)), temp))
        code += size
    return Instance(tuple(groups))


# 69 samples in 14 groups: five strips at 50..70, then two groups at 75 and
# three at 80. Greedy fills plate 1 exactly and splits G11 across plates.
WORKED = [
    ("G01", 6, 50), ("G02", 3, 50),
    ("G03", 5, 55), ("G04", 4, 55),
    ("G05", 7, 60),
    ("G06", 4, 65), ("G07", 2, 65),
    ("G08", 8, 70), ("G09", 3, 70),
    ("G10", 10, 75), ("G11", 6, 75),
    ("G12", 5, 80), ("G13", 4, 80), ("G14", 2, 80),
]


def worked_instance() -> Instance:
    return make_instance(WORKED)


def load_suite() -> list[tuple[Instance, tuple[int, int]]]:
    doc = json.loads((DATA / "tiny_suite.json").read_text())
    return [(parse_instance(e["instance"]), tuple(e["oracle_cost"])) for e in doc["instances"]]


@st.composite
def tiny_instances(draw, max_groups: int = 6, max_samples: int = 24, temps=(40, 90)):
    n = draw(st.integers(1, max_groups))
    sizes = draw(st.lists(st.integers(1, 8), min_size=n, max_size=n))
    while sum(sizes) > max_samples:
        k = sizes.index(max(sizes))
        sizes[k] -= 1
    t = draw(st.lists(st.integers(*temps), min_size=n, max_size=n))
    return make_instance([(f"G{i + 1}", s, tt) for i, (s, tt) in enumerate(zip(sizes, t))])


@st.composite
def packable_instances(draw, max_groups: int = 12, max_samples: int = 120):
    """Larger instances with temperatures close enough to share plates."""
    n = draw(st.integers(1, max_groups))
    sizes = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    while sum(sizes) > max_samples:
        k = sizes.index(max(sizes))
        sizes[k] -= 1
    t = draw(st.lists(st.integers(50, 72), min_size=n, max_size=n))
    return make_instance([(f"G{i + 1}", s, tt) for i, (s, tt) in enumerate(zip(sizes, t))])


# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok
