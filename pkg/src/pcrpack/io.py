"""JSON documents for instances and solutions, and a CSV importer.

Instance document::

    {"metadata": {"session-id": "...", "source": "..."},
     "groups": [{"id": "G1", "temperature": 60, "samples": ["S1", "S2"]}]}

Solution document::

    {"plates": [{"strips": [{"temperature": 60,
                              "counts": {"G1": 2},
                              "reagents": ["G1"]}, ...]}]}

Empty strips are written as ``{}``.
"""

from __future__ import annotations

import csv
import json
from typing import Any, Iterable, TextIO

from .model import Group, Instance, Plate, Solution, Strip

__all__ = [
    "ParseError",
    "parse_instance",
    "load_instance",
    "instance_to_dict",
    "dump_instance",
    "parse_solution",
    "load_solution",
    "solution_to_dict",
    "dump_solution",
    "instance_from_csv",
]


class ParseError(ValueError):
    """Malformed document; ``where`` is a line/column or a field path."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}", e.msg) from None


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(where, f"expected a number, got {value!r}")
    return value


def parse_instance(document: str | dict) -> Instance:
    """Instance from JSON text or an already decoded mapping."""
    doc = _load_json(document) if isinstance(document, str) else document
    if not isinstance(doc, dict):
        raise ParseError("$", "expected an object")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise ParseError("$.metadata", "expected an object")
    raw = doc.get("groups")
    if not isinstance(raw, list):
        raise ParseError("$.groups", "missing or not a list")

    groups = []
    seen_ids: set[str] = set()
    owner: dict[str, str] = {}
    for k, g in enumerate(raw):
        where = f"$.groups[{k}]"
        if not isinstance(g, dict):
            raise ParseError(where, "expected an object")
        gid = g.get("id")
        if not isinstance(gid, str) or not gid:
            raise ParseError(f"{where}.id", "missing or not a non-empty string")
        if gid in seen_ids:
            raise ParseError(f"{where}.id", f"duplicate group id {gid!r}")
        seen_ids.add(gid)
        if "temperature" not in g:
            raise ParseError(f"{where}.temperature", "missing")
        temp = _number(g["temperature"], f"{where}.temperature")
        if temp <= 0:
            raise ParseError(f"{where}.temperature", "must be positive")
        codes = g.get("samples")
        if not isinstance(codes, list) or not codes:
            raise ParseError(f"{where}.samples", "missing or empty")
        for c_k, code in enumerate(codes):
            if not isinstance(code, str) or not code:
                raise ParseError(f"{where}.samples[{c_k}]", "expected a non-empty string")
            if code in owner:
                raise ParseError(
                    f"{where}.samples[{c_k}]",
                    f"sample code {code!r} already used by group {owner[code]!r}",
                )
            owner[code] = gid
        groups.append(Group(gid, tuple(codes), temp))
    return Instance(tuple(groups), {str(k): str(v) for k, v in meta.items()})


def load_instance(fh: TextIO) -> Instance:
    return parse_instance(fh.read())


def instance_to_dict(inst: Instance) -> dict:
    doc: dict[str, Any] = {}
    if inst.metadata:
        doc["metadata"] = dict(inst.metadata)
    doc["groups"] = [
        {"id": g.id, "temperature": g.temperature, "samples": list(g.sample_codes)}
        for g in inst.groups
    ]
    return doc


def dump_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def solution_to_dict(sol: Solution) -> dict:
    plates = []
    for p in sol.plates:
        strips = []
        for s in p.strips:
            d: dict[str, Any] = {}
            if s.temperature is not None:
                d["temperature"] = s.temperature
            if s.counts:
                d["counts"] = dict(sorted(s.counts.items()))
            if s.reagents:
                d["reagents"] = sorted(s.reagents)
            strips.append(d)
        plates.append({"strips": strips})
    return {"plates": plates}


def dump_solution(sol: Solution) -> str:
    return json.dumps(solution_to_dict(sol), indent=2) + "\n"


def parse_solution(document: str | dict, inst: Instance) -> Solution:
    """Solution from JSON; structure is checked here, feasibility is not."""
    doc = _load_json(document) if isinstance(document, str) else document
    if not isinstance(doc, dict) or not isinstance(doc.get("plates"), list):
        raise ParseError("$.plates", "missing or not a list")
    plates = []
    for q, p in enumerate(doc["plates"]):
        where = f"$.plates[{q}]"
        if not isinstance(p, dict) or not isinstance(p.get("strips"), list):
            raise ParseError(f"{where}.strips", "missing or not a list")
        strips = []
        for l, s in enumerate(p["strips"]):
            sw = f"{where}.strips[{l}]"
            if not isinstance(s, dict):
                raise ParseError(sw, "expected an object")
            temp = s.get("temperature")
            if temp is not None:
                temp = _number(temp, f"{sw}.temperature")
            counts = s.get("counts", {})
            if not isinstance(counts, dict):
                raise ParseError(f"{sw}.counts", "expected an object")
            for gid, c in counts.items():
                if isinstance(c, bool) or not isinstance(c, int) or c < 1:
                    raise ParseError(f"{sw}.counts.{gid}", f"expected a positive integer, got {c!r}")
            reagents = s.get("reagents", [])
            if not isinstance(reagents, list) or not all(isinstance(r, str) for r in reagents):
                raise ParseError(f"{sw}.reagents", "expected a list of group ids")
            if len(set(reagents)) != len(reagents):
                raise ParseError(f"{sw}.reagents", "a group can have one reagent per strip")
            strips.append(Strip(dict(counts), frozenset(reagents), temp))
        plates.append(Plate(tuple(strips)))
    return Solution(tuple(plates), inst)


def load_solution(fh: TextIO, inst: Instance) -> Solution:
    return parse_solution(fh.read(), inst)


def instance_from_csv(samples: Iterable[str], groups: Iterable[str]) -> Instance:
    """Build an instance from two CSV tables.

    ``samples`` has columns ``sample_code,group_id``; ``groups`` has
    ``group_id,temperature``. Both take a header row. Groups keep the order of
    the groups table; samples keep file order.
    """
    temps: dict[str, float] = {}
    order: list[str] = []
    for k, row in enumerate(csv.DictReader(groups), 2):
        try:
            gid = row["group_id"].strip()
            temps[gid] = float(row["temperature"])
        except (KeyError, AttributeError):
            raise ParseError(f"groups line {k}", "needs group_id and temperature") from None
        except ValueError:
            raise ParseError(f"groups line {k}", f"bad temperature {row['temperature']!r}") from None
        if gid in order:
            raise ParseError(f"groups line {k}", f"duplicate group id {gid!r}")
        order.append(gid)
    codes: dict[str, list[str]] = {gid: [] for gid in order}
    for k, row in enumerate(csv.DictReader(samples), 2):
        try:
            code, gid = row["sample_code"].strip(), row["group_id"].strip()
        except (KeyError, AttributeError):
            raise ParseError(f"samples line {k}", "needs sample_code and group_id") from None
        if gid not in codes:
            raise ParseError(f"samples line {k}", f"unknown group {gid!r}")
        codes[gid].append(code)
    doc = {
        "metadata": {"source": "csv"},
        "groups": [
            {"id": gid, "temperature": int(t) if t.is_integer() else t, "samples": codes[gid]}
            for gid, t in temps.items()
        ],
    }
    return parse_instance(doc)
