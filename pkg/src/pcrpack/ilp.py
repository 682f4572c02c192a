"""Integer model of the packing problem, LP-format export and solution import.

Indices are 1-based throughout: groups ``i`` follow instance order,
temperatures ``j`` follow ascending order, strips ``l`` run over all plates
(plate ``q`` owns strips ``6(q-1)+1 .. 6q``).
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, TextIO

from .constructive import build_initial
from .model import (
    DEFAULT_GEOMETRY,
    FeasibilityReport,
    Instance,
    ObjectiveWeights,
    Plate,
    PlateGeometry,
    Solution,
    Strip,
    Violation,
    cost_lower_bound,
    validate_solution,
)

__all__ = [
    "Variable",
    "Constraint",
    "IlpModel",
    "ModelSize",
    "ModelLimitationError",
    "SolutionImportError",
    "model_size",
    "build_ilp",
    "write_lp",
    "read_lp",
    "ParsedLp",
    "read_values",
    "solution_to_values",
    "import_solution",
    "compute_gap",
]

INT_TOL = 1e-6
ROW_TOL = 1e-6


class Variable(NamedTuple):
    name: str
    kind: str  # "continuous", "integer" or "binary"


class Constraint(NamedTuple):
    name: str
    family: str
    terms: tuple[tuple[str, float], ...]
    sense: str  # "<=", ">=" or "="
    rhs: float

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.terms)

    def satisfied(self, values: Mapping[str, float], tol: float = ROW_TOL) -> bool:
        lhs = self.activity(values)
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


class ModelSize(NamedTuple):
    constraints: int
    variables: int


class ModelLimitationError(ValueError):
    """The solution is feasible but the faithful model cannot express it."""


class SolutionImportError(ValueError):
    def __init__(self, message: str, report: Optional[FeasibilityReport] = None):
        super().__init__(message)
        self.report = report


@dataclass
class IlpModel:
    n: int
    m: int
    p: int
    group_ids: tuple[str, ...]
    sizes: tuple[int, ...]
    temperatures: tuple[float, ...]
    variables: list[Variable]
    constraints: list[Constraint]
    objective: dict[str, float]
    relaxed: bool = False
    strips_per_plate: int = 6
    big_m: float = 0.0
    _names: set[str] = field(default_factory=set, repr=False)

    def __post_init__(self) -> None:
        self._names = {v.name for v in self.variables}

    @property
    def size(self) -> ModelSize:
        return ModelSize(len(self.constraints), len(self.variables))

    def plate_strips(self, q: int) -> range:
        k = self.strips_per_plate
        return range(k * (q - 1) + 1, k * q + 1)

    def evaluate_objective(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.objective.items())

    def violated(self, values: Mapping[str, float], tol: float = ROW_TOL) -> list[Constraint]:
        return [c for c in self.constraints if not c.satisfied(values, tol)]

    def bound_errors(self, values: Mapping[str, float], tol: float = INT_TOL) -> list[str]:
        """Variables outside their domain (sign, integrality, binary)."""
        bad = []
        for v in self.variables:
            x = values[v.name]
            if x < -tol:
                bad.append(f"{v.name} = {x} is negative")
            elif v.kind != "continuous" and abs(x - round(x)) > tol:
                bad.append(f"{v.name} = {x} is not integral")
            elif v.kind == "binary" and round(x) > 1:
                bad.append(f"{v.name} = {x} is not binary")
        return bad


def model_size(n: int, m: int, p: int, relaxed: bool = False) -> ModelSize:
    """Row and column counts of the model without building it."""
    rows = 28 * p + 6 * p * m + n + 12 * p * n + n * p
    if relaxed:
        rows += 6 * p
    return ModelSize(rows, 6 * p * (2 * n + m + 1))


def build_ilp(
    inst: Instance,
    p: Optional[int] = None,
    weights: Optional[ObjectiveWeights] = None,
    geom: PlateGeometry = DEFAULT_GEOMETRY,
    relax_empty_strips: bool = False,
) -> IlpModel:
    """Build the model for ``p`` plates (default: plates used by the greedy start).

    With ``relax_empty_strips`` the temperature of a strip without an assigned
    temperature is free in ``[0, max T]`` instead of being pinned to 0, which
    lets empty strips bridge any gap the heuristic can bridge.
    """
    if p is None:
        p = len(build_initial(inst, geom).plates)
    if p < 1:
        raise ValueError("the model needs at least one plate")
    lower = cost_lower_bound(inst, geom).non_empty_plates
    if p < lower:
        warnings.warn(f"p={p} is below the lower bound of {lower} plates; the model is infeasible")
    weights = weights or ObjectiveWeights()
    k = geom.strips_per_plate
    cap = geom.wells_per_strip
    step = geom.max_temp_step
    groups = inst.groups
    n = len(groups)
    temps = inst.temperature_set
    m = len(temps)
    total = inst.total_samples
    big_m = max(temps) if temps else 0.0
    strips = range(1, k * p + 1)
    I = range(1, n + 1)
    J = range(1, m + 1)

    def t(l):
        return f"t_{l}"

    def nv(i, l):
        return f"n_{i}_{l}"

    def xv(i, l):
        return f"x_{i}_{l}"

    def yv(j, l):
        return f"y_{j}_{l}"

    variables = [Variable(t(l), "continuous") for l in strips]
    variables += [Variable(nv(i, l), "integer") for i in I for l in strips]
    variables += [Variable(xv(i, l), "binary") for i in I for l in strips]
    variables += [Variable(yv(j, l), "binary") for j in J for l in strips]

    objective: dict[str, float] = {}
    for i in I:
        for q in range(1, p + 1):
            for l in range(k * (q - 1) + 1, k * q + 1):
                objective[nv(i, l)] = weights[q]

    rows: list[Constraint] = []
    for l in strips:
        terms = [(nv(i, l), 1) for i in I] + [(xv(i, l), 1) for i in I]
        rows.append(Constraint(f"cap_l{l}", "capacity", tuple(terms), "<=", cap))
    for q in range(1, p + 1):
        for l in range(k * (q - 1) + 1, k * q):
            rows.append(
                Constraint(f"ramp_dn_q{q}_l{l}", "ramp", ((t(l), 1), (t(l + 1), -1)), "<=", step)
            )
            rows.append(
                Constraint(f"ramp_up_q{q}_l{l}", "ramp", ((t(l + 1), 1), (t(l), -1)), "<=", step)
            )
    for l in strips:
        ys = [(yv(j, l), temps[j - 1]) for j in J]
        if relax_empty_strips:
            # Equal to the chosen temperature when some y is set, free otherwise.
            hi = tuple([(t(l), 1)] + [(v, big_m - c) for v, c in ys if big_m != c])
            lo = tuple([(t(l), -1)] + [(v, big_m + c) for v, c in ys])
            rows.append(Constraint(f"temp_hi_l{l}", "temperature", hi, "<=", big_m))
            rows.append(Constraint(f"temp_lo_l{l}", "temperature", lo, "<=", big_m))
        else:
            rows.append(
                Constraint(f"temp_l{l}", "temperature", tuple(ys + [(t(l), -1)]), "=", 0)
            )
    for l in strips:
        rows.append(
            Constraint(f"onetemp_l{l}", "temperature", tuple((yv(j, l), 1) for j in J), "<=", 1)
        )
    for l in strips:
        for j in J:
            same = [(nv(i, l), -1) for i in I if groups[i - 1].temperature == temps[j - 1]]
            rows.append(
                Constraint(f"link_j{j}_l{l}", "temperature", tuple([(yv(j, l), total)] + same), ">=", 0)
            )
    for i in I:
        rows.append(
            Constraint(
                f"conserve_{i}",
                "conservation",
                tuple((nv(i, l), 1) for l in strips),
                "=",
                groups[i - 1].size,
            )
        )
    for i in I:
        for l in strips:
            rows.append(
                Constraint(f"reag_i{i}_l{l}", "reagent-sample", ((nv(i, l), 1), (xv(i, l), -1)), ">=", 0)
            )
    for i in I:
        size = groups[i - 1].size
        for q in range(1, p + 1):
            plate = range(k * (q - 1) + 1, k * q + 1)
            for l in plate:
                terms = {xv(i, lp): size for lp in plate}
                terms[nv(i, l)] = terms.get(nv(i, l), 0) - 1
                rows.append(
                    Constraint(f"cover_i{i}_l{l}", "reagent-missing", tuple(terms.items()), ">=", 0)
                )
    for i in I:
        for q in range(1, p + 1):
            plate = range(k * (q - 1) + 1, k * q + 1)
            rows.append(
                Constraint(
                    f"onereag_i{i}_q{q}",
                    "reagent-duplicate",
                    tuple((xv(i, l), 1) for l in plate),
                    "<=",
                    1,
                )
            )

    return IlpModel(
        n=n,
        m=m,
        p=p,
        group_ids=tuple(g.id for g in groups),
        sizes=tuple(g.size for g in groups),
        temperatures=temps,
        variables=variables,
        constraints=rows,
        objective=objective,
        relaxed=relax_empty_strips,
        strips_per_plate=k,
        big_m=big_m,
    )


# --------------------------------------------------------------------- LP text

_TERMS_PER_LINE = 8


def _num(v: float) -> str:
    if isinstance(v, int) or (isinstance(v, float) and v.is_integer()):
        return str(int(v))
    return repr(float(v))


def _terms(terms: Iterable[tuple[str, float]]) -> list[str]:
    out = []
    for name, c in terms:
        sign = "-" if c < 0 else "+"
        out.append(f"{sign} {_num(abs(c))} {name}")
    return out


def _wrap(head: str, parts: list[str], tail: str = "") -> list[str]:
    lines = []
    for k in range(0, max(len(parts), 1), _TERMS_PER_LINE):
        chunk = " ".join(parts[k : k + _TERMS_PER_LINE])
        lines.append((" " + head + " " if k == 0 else "   ") + chunk)
    if tail:
        lines[-1] += " " + tail
    return lines


def write_lp(model: IlpModel, sink: Optional[TextIO] = None) -> str:
    """LP-format text of the model; also written to ``sink`` when given."""
    if model.p < 1 or not model.variables:
        raise ValueError("cannot write a model without plates")
    lines = [
        f"\\ plates={model.p} groups={model.n} temperatures={model.m}"
        + (" relaxed" if model.relaxed else ""),
        "Minimize",
    ]
    lines += _wrap("obj:", _terms(model.objective.items()))
    lines.append("Subject To")
    for c in model.constraints:
        lines += _wrap(f"{c.name}:", _terms(c.terms), f"{c.sense} {_num(c.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == "continuous":
            lines.append(f" {v.name} >= 0")
    lines.append("Generals")
    lines += [f" {v.name}" for v in model.variables if v.kind == "integer"]
    lines.append("Binaries")
    lines += [f" {v.name}" for v in model.variables if v.kind == "binary"]
    lines.append("End")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text


@dataclass
class ParsedLp:
    objective: dict[str, float]
    constraints: dict[str, tuple[dict[str, float], str, float]]
    bounds: dict[str, float]
    generals: list[str]
    binaries: list[str]


_SECTIONS = {"minimize": "obj", "subject to": "rows", "bounds": "bounds",
             "generals": "generals", "binaries": "binaries", "end": "end"}
_TERM = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+([A-Za-z_][\w]*)")
_SENSE = re.compile(r"(<=|>=|=)\s*(-?[0-9.eE+-]+)\s*$")


def _float(s: str) -> float:
    v = float(s)
    return int(v) if v.is_integer() else v


def read_lp(text: str | TextIO) -> ParsedLp:
    """Parse LP text as written by ``write_lp`` back into coefficient maps."""
    if not isinstance(text, str):
        text = text.read()
    section = None
    out = ParsedLp({}, {}, {}, [], [])
    statements: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        key = _SECTIONS.get(line.lower())
        if key:
            section = key
            continue
        if section in ("obj", "rows") and raw.startswith("   ") and statements:
            sec, prev = statements[-1]
            statements[-1] = (sec, prev + " " + line)
        else:
            statements.append((section, line))
    for section, line in statements:
        if section == "obj":
            _, body = line.split(":", 1)
            out.objective = {v: _float(s + c) for s, c, v in _TERM.findall(body)}
        elif section == "rows":
            name, body = line.split(":", 1)
            m = _SENSE.search(body)
            if not m:
                raise ValueError(f"constraint {name!r} has no sense")
            terms = {v: _float(s + c) for s, c, v in _TERM.findall(body[: m.start()])}
            out.constraints[name.strip()] = (terms, m.group(1), _float(m.group(2)))
        elif section == "bounds":
            name, _, lb = line.partition(">=")
            out.bounds[name.strip()] = _float(lb)
        elif section == "generals":
            out.generals.extend(line.split())
        elif section == "binaries":
            out.binaries.extend(line.split())
        elif section is None:
            raise ValueError(f"text outside any section: {line!r}")
    return out


def read_values(text: str | TextIO) -> dict[str, float]:
    """``name value`` lines; blank lines and ``#`` comments are skipped."""
    if not isinstance(text, str):
        text = text.read()
    values: dict[str, float] = {}
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {k}: expected 'name value', got {raw!r}")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError:
            raise ValueError(f"line {k}: {parts[1]!r} is not a number") from None
    return values


# ------------------------------------------------------------ solution bridges


def _bridge_in_set(a: float, b: float, k: int, temps: tuple[float, ...], step: float) -> list[float]:
    """``k`` temperatures from ``temps`` leading from ``a`` to ``b`` in steps <= ``step``."""
    eps = 1e-9
    # Layered search; parents keep the lowest temperature for determinism.
    layers: list[dict[float, Optional[float]]] = []
    frontier = {a: None}
    for _ in range(k):
        nxt: dict[float, Optional[float]] = {}
        for v in temps:
            for u in sorted(frontier):
                if abs(v - u) <= step + eps:
                    nxt[v] = u
                    break
        layers.append(nxt)
        frontier = nxt
    ends = sorted(v for v in frontier if abs(b - v) <= step + eps)
    if not ends:
        raise ModelLimitationError(
            f"no chain of {k} listed temperatures bridges {a} and {b}; "
            "use the relaxed model"
        )
    path = [ends[0]]
    for layer in reversed(layers[1:]):
        path.append(layer[path[-1]])
    return path[::-1]


def _step_towards(a: float, b: float, k: int, step: float) -> list[float]:
    out = []
    cur = a
    for _ in range(k):
        cur = cur + max(-step, min(step, b - cur))
        out.append(cur)
    return out


def _strip_temperatures(plate: Plate, model: IlpModel, step: float) -> list[tuple[float, bool]]:
    """(t_l, uses a listed temperature) for every strip of a plate."""
    k = len(plate.strips)
    temps = [None if s.is_empty else s.temperature for s in plate.strips]
    live = [l for l, t in enumerate(temps) if t is not None]
    if not live:
        return [(0.0, False)] * k
    out: list[Optional[tuple[float, bool]]] = [None] * k
    for l in live:
        out[l] = (temps[l], True)
    for l in range(live[0]):
        out[l] = (temps[live[0]], True)
    for l in range(live[-1] + 1, k):
        out[l] = (temps[live[-1]], True)
    for a, b in zip(live, live[1:]):
        gap = b - a - 1
        if gap == 0:
            continue
        if model.relaxed:
            fill = _step_towards(temps[a], temps[b], gap, step)
            for off, v in enumerate(fill, 1):
                out[a + off] = (v, False)
        else:
            fill = _bridge_in_set(temps[a], temps[b], gap, model.temperatures, step)
            for off, v in enumerate(fill, 1):
                out[a + off] = (v, True)
    return out  # type: ignore[return-value]


def solution_to_values(
    sol: Solution, model: IlpModel, geom: PlateGeometry = DEFAULT_GEOMETRY
) -> dict[str, float]:
    """Variable values that encode ``sol``; empty strips get bridge temperatures.

    Raises ModelLimitationError when the faithful model cannot bridge a gap
    that the solution bridges with empty strips.
    """
    if len(sol.plates) > model.p:
        raise ValueError(f"solution uses {len(sol.plates)} plates, model has {model.p}")
    index = {gid: i for i, gid in enumerate(model.group_ids, 1)}
    tindex = {t: j for j, t in enumerate(model.temperatures, 1)}
    values = {v.name: 0 for v in model.variables}
    k = model.strips_per_plate
    for q, plate in enumerate(sol.plates, 1):
        base = k * (q - 1)
        for off, ((tl, listed), strip) in enumerate(
            zip(_strip_temperatures(plate, model, geom.max_temp_step), plate.strips), 1
        ):
            l = base + off
            values[f"t_{l}"] = tl
            if listed:
                values[f"y_{tindex[tl]}_{l}"] = 1
            for gid, c in strip.counts.items():
                values[f"n_{index[gid]}_{l}"] = c
            for gid in strip.reagents:
                values[f"x_{index[gid]}_{l}"] = 1
    return values


def import_solution(
    model: IlpModel,
    values: Mapping[str, float],
    inst: Instance,
    geom: PlateGeometry = DEFAULT_GEOMETRY,
) -> Solution:
    """Rebuild a Solution (all ``p`` plates, empty ones included) from solver values.

    Raises SolutionImportError for missing or non-integral values and for
    values that violate the model; the attached report names the violated
    families and rows.
    """
    missing = sorted(v.name for v in model.variables if v.name not in values)
    if missing:
        more = f" (+{len(missing) - 5} more)" if len(missing) > 5 else ""
        raise SolutionImportError(f"missing values for {', '.join(missing[:5])}{more}")
    bad = model.bound_errors(values)
    if bad:
        raise SolutionImportError("; ".join(bad[:5]))
    if tuple(g.id for g in inst.groups) != model.group_ids:
        raise SolutionImportError("instance groups do not match the model")

    rows = model.violated(values)
    if rows:
        report = FeasibilityReport(
            [Violation(c.family, c.name, f"activity {c.activity(values):g} {c.sense} {_num(c.rhs)}")
             for c in rows]
        )
        fams = ", ".join(sorted(report.families()))
        raise SolutionImportError(f"values violate {len(rows)} rows ({fams})", report)

    k = model.strips_per_plate
    plates = []
    for q in range(1, model.p + 1):
        strips = []
        for l in model.plate_strips(q):
            counts = {}
            reagents = set()
            for i, gid in enumerate(model.group_ids, 1):
                c = int(round(values[f"n_{i}_{l}"]))
                if c:
                    counts[gid] = c
                if round(values[f"x_{i}_{l}"]):
                    reagents.add(gid)
            temp = None
            for j, tj in enumerate(model.temperatures, 1):
                if round(values[f"y_{j}_{l}"]):
                    temp = tj
                    break
            if counts or reagents:
                strips.append(Strip(counts, frozenset(reagents), temp))
            else:
                strips.append(Strip(temperature=temp))
        plates.append(Plate(tuple(strips)))
    sol = Solution(tuple(plates), inst)
    report = validate_solution(inst, sol, geom)
    if not report.ok:
        raise SolutionImportError("rebuilt solution is infeasible", report)
    return sol


def compute_gap(lower_bound: float, incumbent: float) -> float:
    """Optimality gap in percent: 100 |lb - incumbent| / |incumbent|."""
    if incumbent == 0:
        raise ValueError("gap is undefined for a zero incumbent")
    return 100.0 * abs(lower_bound - incumbent) / abs(incumbent)
