import io
import json

import pytest

from helpers import worked_instance
from pcrpack.constructive import build_initial
from pcrpack.generator import PRESETS, gen_instance
from pcrpack.io import (
    ParseError,
    dump_instance,
    dump_solution,
    instance_from_csv,
    parse_instance,
    parse_solution,
)
from dataclasses import replace


def test_minimal_document():
    inst = parse_instance('{"groups": [{"id": "A", "temperature": 60, "samples": ["s1"]}]}')
    assert inst.n == 1 and inst.m == 1 and inst.total_samples == 1


def test_shared_code_is_named():
    doc = {
        "groups": [
            {"id": "A", "temperature": 60, "samples": ["s1", "s2"]},
            {"id": "B", "temperature": 61, "samples": ["s2"]},
        ]
    }
    with pytest.raises(ParseError) as err:
        parse_instance(doc)
    assert "'s2'" in str(err.value)
    assert err.value.where == "$.groups[1].samples[0]"


def test_missing_temperature_location():
    with pytest.raises(ParseError, match=r"\$\.groups\[0\]\.temperature"):
        parse_instance({"groups": [{"id": "A", "samples": ["s"]}]})


def test_syntax_error_has_line_and_column():
    with pytest.raises(ParseError) as err:
        parse_instance('{\n  "groups": [\n    {"id": "A",,}\n  ]\n}')
    assert err.value.where == "line 3 column 16"


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"groups": {}},
        {"groups": [{"id": "", "temperature": 60, "samples": ["s"]}]},
        {"groups": [{"id": "A", "temperature": "hot", "samples": ["s"]}]},
        {"groups": [{"id": "A", "temperature": True, "samples": ["s"]}]},
        {"groups": [{"id": "A", "temperature": -1, "samples": ["s"]}]},
        {"groups": [{"id": "A", "temperature": 60, "samples": []}]},
        {"groups": [{"id": "A", "temperature": 60, "samples": [3]}]},
        {
            "groups": [
                {"id": "A", "temperature": 60, "samples": ["s"]},
                {"id": "A", "temperature": 60, "samples": ["t"]},
            ]
        },
    ],
)
def test_malformed_documents(doc):
    with pytest.raises(ParseError):
        parse_instance(doc)


def test_generated_round_trip():
    for seed in range(5):
        inst = gen_instance(replace(PRESETS["small"], seed=seed))
        back = parse_instance(dump_instance(inst))
        assert back == inst
        assert back.metadata == inst.metadata


def test_solution_round_trip():
    inst = worked_instance()
    sol = build_initial(inst)
    assert parse_solution(dump_solution(sol), inst) == sol


def test_solution_errors():
    inst = worked_instance()
    with pytest.raises(ParseError):
        parse_solution('{"plates": [{"strips": [{"counts": {"G01": 0}}]}]}', inst)
    with pytest.raises(ParseError):
        parse_solution('{"plates": [{"strips": [{"reagents": ["G01", "G01"]}]}]}', inst)
    with pytest.raises(ParseError):
        parse_solution('{"plate": []}', inst)


def test_csv_import():
    samples = io.StringIO("sample_code,group_id\ns1,A\ns2,B\ns3,A\n")
    groups = io.StringIO("group_id,temperature\nA,60\nB,62.5\n")
    inst = instance_from_csv(samples, groups)
    assert [g.id for g in inst.groups] == ["A", "B"]
    assert inst.group("A").sample_codes == ("s1", "s3")
    assert inst.temperature_of("B") == 62.5


def test_csv_unknown_group():
    with pytest.raises(ParseError, match="unknown group"):
        instance_from_csv(
            io.StringIO("sample_code,group_id\ns1,Z\n"), io.StringIO("group_id,temperature\nA,60\n")
        )


def test_dump_is_json():
    assert json.loads(dump_instance(worked_instance()))["groups"][0]["id"] == "G01"
