"""Command-line entry point: ``pcrpack <command> ...``.

Exit codes: 0 success or feasible, 1 infeasible or failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import __version__
from .annealing import SAParams, anneal_restarts
from .generator import PRESETS, GeneratorParams, gen_instance
from .ilp import (
    ModelLimitationError,
    SolutionImportError,
    build_ilp,
    import_solution,
    read_values,
    write_lp,
)
from .io import ParseError, dump_instance, dump_solution, parse_instance, parse_solution
from .model import SolutionStructureError, validate_solution
from .oracle import OracleLimitError, OracleLimits, exact_solve
from .placement import place_wells
from .report import format_report, make_report

__all__ = ["main", "build_parser"]


class CommandError(Exception):
    """Failure reported on stderr with exit code 1."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CommandError(f"cannot read {path}: {e.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise CommandError(f"cannot write {path}: {e.strerror}") from None


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _instance(path: str):
    try:
        return parse_instance(_read(path))
    except ParseError as e:
        raise CommandError(f"{path}: {e}") from None


def _solution(path: str, inst):
    try:
        return parse_solution(_read(path), inst)
    except ParseError as e:
        raise CommandError(f"{path}: {e}") from None


# ------------------------------------------------------------------ commands


def _sa_params(args) -> SAParams:
    try:
        return SAParams(
            t_max=args.t_max,
            t_min=args.t_min,
            alpha=args.alpha,
            max_iter=args.max_iter,
            se_prob=args.se_prob,
            seed=args.seed,
            stop_at_bound=not args.no_bound_stop,
            record_steps=False,
        )
    except ValueError as e:
        raise CommandError(str(e)) from None


def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    params = _sa_params(args)
    res = anneal_restarts(inst, params, restarts=args.restarts, workers=args.workers)
    sol = res.solution
    if args.output:
        _write(args.output, dump_solution(sol))
    rep = make_report(sol)
    if args.json:
        doc = {
            "cost": list(sol.cost),
            "seed": res.seed,
            "stopped": res.trace.stopped,
            "report": rep.to_dict(),
        }
        if not args.output:
            doc["solution"] = json.loads(dump_solution(sol))
        _write(None, _json(doc))
    else:
        _write(None, f"cost           ({sol.cost[0]}, {sol.cost[1]})\n" + format_report(rep))
    return 0


def cmd_validate(args) -> int:
    inst = _instance(args.instance)
    sol = _solution(args.solution, inst)
    try:
        report = validate_solution(inst, sol)
    except SolutionStructureError as e:
        raise CommandError(str(e)) from None
    if report.feasible:
        _write(None, f"feasible: {sol.cost[0]} plates, {sol.cost[1]} wells\n")
        return 0
    lines = [f"infeasible: {len(report)} violation(s)"]
    lines += [f"  [{v.family}] {v.location}: {v.detail}" for v in report]
    _write(None, "\n".join(lines) + "\n")
    return 1


def _model(args, inst):
    try:
        return build_ilp(inst, args.plates, relax_empty_strips=args.relax_empty_strips)
    except ValueError as e:
        raise CommandError(str(e)) from None


def cmd_emit_ilp(args) -> int:
    inst = _instance(args.instance)
    model = _model(args, inst)
    _write(args.output, write_lp(model))
    rows, cols = model.size
    print(f"{rows} constraints x {cols} variables, {model.p} plates", file=sys.stderr)
    return 0


def cmd_import_sol(args) -> int:
    inst = _instance(args.instance)
    model = _model(args, inst)
    try:
        values = read_values(_read(args.values))
        sol = import_solution(model, values, inst)
    except SolutionImportError as e:
        lines = [f"import failed: {e}"]
        if e.report is not None:
            lines += [f"  [{v.family}] {v.location}: {v.detail}" for v in e.report]
        print("\n".join(lines), file=sys.stderr)
        return 1
    except ValueError as e:
        raise CommandError(str(e)) from None
    _write(args.output, dump_solution(sol))
    return 0


def cmd_oracle(args) -> int:
    inst = _instance(args.instance)
    limits = OracleLimits(
        max_plates=args.max_plates,
        max_groups=args.max_groups,
        max_samples=args.max_samples,
        node_budget=args.node_budget,
    )
    try:
        res = exact_solve(inst, limits)
    except OracleLimitError as e:
        raise CommandError(str(e)) from None
    if args.output:
        _write(args.output, dump_solution(res.solution))
    cost = res.solution.cost
    _write(
        None,
        _json({"cost": list(cost), "proven": res.proven, "nodes": res.nodes})
        if args.json
        else f"cost ({cost[0]}, {cost[1]}) {'proven' if res.proven else 'not proven'}\n",
    )
    return 0


def _gen_params(args) -> GeneratorParams:
    params = PRESETS[args.preset]
    for name in ("samples", "groups", "temperatures", "temp_values"):
        value = getattr(args, name)
        if value is not None:
            params = replace(params, **{name: tuple(value)})
    return replace(params, seed=args.seed)


def cmd_generate(args) -> int:
    try:
        inst = gen_instance(_gen_params(args))
    except ValueError as e:
        raise CommandError(str(e)) from None
    _write(args.output, dump_instance(inst))
    return 0


def cmd_place(args) -> int:
    inst = _instance(args.instance)
    sol = _solution(args.solution, inst)
    if not validate_solution(inst, sol).feasible:
        raise CommandError("solution is infeasible; run `validate` for details")
    plan = place_wells(sol, seed=args.seed)
    if args.format == "json":
        _write(args.output, _json(plan.to_dict()))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["plate", "strip", "well", "row", "column", "kind", "group", "code"])
        for p in plan.wells:
            w.writerow([p.plate, p.strip, p.label, p.row, p.column, p.kind, p.group, p.code])
        _write(args.output, buf.getvalue())
    return 0


def cmd_sweep(args) -> int:
    """Strip-exchange probability study on generated instances."""
    base = _gen_params(args)
    params = _sa_params(args)
    rows = []
    for k in range(args.instances):
        inst = gen_instance(replace(base, seed=base.seed + k))
        row = {"instance": k + 1, "groups": inst.n, "samples": inst.total_samples}
        for prob in args.probs:
            try:
                res = anneal_restarts(inst, replace(params, se_prob=prob), restarts=args.restarts)
            except ValueError as e:
                raise CommandError(str(e)) from None
            rep = make_report(res.solution)
            row[prob] = (rep.plates, rep.full_plates, rep.first_non_full)
        rows.append(row)

    if args.json:
        doc = [
            {
                "instance": r["instance"],
                "groups": r["groups"],
                "samples": r["samples"],
                "results": [
                    {"se_prob": p, "plates": r[p][0], "full_plates": r[p][1], "first_non_full": r[p][2]}
                    for p in args.probs
                ],
            }
            for r in rows
        ]
        _write(args.output, _json(doc))
        return 0
    head = f"{'file':>4} {'groups':>6} {'samples':>7}"
    for p in args.probs:
        head += f" | p={p:<4} {'plates':>6} {'full':>4} {'pct':>7}"
    lines = [head]
    for r in rows:
        line = f"{r['instance']:>4} {r['groups']:>6} {r['samples']:>7}"
        for p in args.probs:
            plates, full, pct = r[p]
            pct_s = "-" if pct is None else f"{pct:.2f}"
            line += f" | {'':<6} {plates:>6} {full:>4} {pct_s:>7}"
        lines.append(line)
    _write(args.output, "\n".join(lines) + "\n")
    return 0


# -------------------------------------------------------------------- parser


def _add_sa(p: argparse.ArgumentParser, max_iter: int) -> None:
    d = SAParams()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--max-iter", type=int, default=max_iter)
    p.add_argument("--t-max", type=float, default=d.t_max)
    p.add_argument("--t-min", type=float, default=d.t_min)
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--se-prob", type=float, default=d.se_prob)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument(
        "--no-bound-stop",
        action="store_true",
        help="keep annealing after the best cost reaches the lower bound",
    )


def _add_gen(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), default="session")
    for name in ("samples", "groups", "temperatures"):
        p.add_argument(f"--{name}", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--temp-values", dest="temp_values", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--plates", type=int, help="plates in the model (default: greedy plate count)")
    p.add_argument("--relax-empty-strips", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcrpack", description="Pack sample groups onto PCR plates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="anneal an instance")
    p.add_argument("instance")
    p.add_argument("-o", "--output", help="write the solution here")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")
    _add_sa(p, SAParams().max_iter)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a solution against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("emit-ilp", help="write the integer model in LP format")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    _model_flags(p)
    p.set_defaults(func=cmd_emit_ilp)

    p = sub.add_parser("import-sol", help="rebuild a solution from solver values")
    p.add_argument("instance")
    p.add_argument("values", help="file of 'name value' lines")
    p.add_argument("-o", "--output")
    _model_flags(p)
    p.set_defaults(func=cmd_import_sol)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    p.add_argument("instance")
    p.add_argument("-o", "--output", help="write the solution here")
    p.add_argument("--json", action="store_true")
    d = OracleLimits()
    p.add_argument("--max-plates", type=int, default=d.max_plates)
    p.add_argument("--max-groups", type=int, default=d.max_groups)
    p.add_argument("--max-samples", type=int, default=d.max_samples)
    p.add_argument("--node-budget", type=int, default=d.node_budget)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="random instance")
    p.add_argument("-o", "--output")
    _add_gen(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("place", help="well positions for a solution")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--seed", type=int, help="shuffle wells within each strip")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("sweep", help="strip-exchange probability study")
    p.add_argument("--probs", type=float, nargs="+", default=[0.8, 0.9, 1.0])
    p.add_argument("--instances", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    _add_gen(p)
    p.set_defaults(preset="small")
    # --seed seeds both the generator and the annealer.
    p.add_argument("--max-iter", type=int, default=10)
    d = SAParams()
    p.add_argument("--t-max", type=float, default=d.t_max)
    p.add_argument("--t-min", type=float, default=d.t_min)
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--se-prob", type=float, default=d.se_prob, help=argparse.SUPPRESS)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--no-bound-stop", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as e:
        print(f"pcrpack {args.command}: {e}", file=sys.stderr)
        return 1
    except (ModelLimitationError, OracleLimitError, ValueError) as e:
        print(f"pcrpack {args.command}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
