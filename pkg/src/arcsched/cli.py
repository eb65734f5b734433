"""Command-line interface.

Subcommands: gen, bounds, model, compare, solve-heur, solve-exact, check,
solve-external. Exit codes: 0 success, 2 usage error, 3 input/validation
error, 4 external-solver error, 5 size-guard refusal.
"""

from __future__ import annotations

import argparse
import os
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import bounds as bounds_mod
from . import flowgraph, heuristic, milp, oracle
from .instance import (
    Instance,
    JobType,
    ParseError,
    Schedule,
    ValidationError,
    evaluate_schedule,
    generate_instance,
    group_job_types,
    parse_instance,
    parse_schedule,
    sort_machine_wspt,
    write_instance,
    write_schedule,
    wspt_order,
)

SOLVER_ENV = "ARCSCHED_SOLVER_CMD"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_SOLVER = 4
EXIT_GUARD = 5


class ExternalSolverError(RuntimeError):
    pass


@dataclass
class RunReport:
    command: str
    digest: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    deterministic: bool = True

    def print(self, out=None) -> None:
        out = out or sys.stdout
        print(f"command: {self.command}", file=out)
        for key, value in self.digest.items():
            print(f"instance.{key}: {value}", file=out)
        for key, value in self.summary.items():
            print(f"{key}: {value}", file=out)
        for phase, ms in self.timings_ms.items():
            print(f"time.{phase}_ms: {ms:.3f}", file=out)
        for path in self.outputs:
            print(f"wrote: {path}", file=out)
        if not self.deterministic:
            print("deterministic: no (wall-clock budget)", file=out)


class _Timer:
    def __init__(self, report: RunReport):
        self.report = report

    def __call__(self, phase: str):
        return _Phase(self.report, phase)


class _Phase:
    def __init__(self, report: RunReport, phase: str):
        self.report, self.phase = report, phase

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings_ms[self.phase] = (time.perf_counter() - self.t0) * 1000.0
        return False


def _digest(inst: Instance) -> dict:
    return {"n": inst.n, "m": inst.m, "sum_p": inst.total_p, "p_max": inst.p_max}


def _read_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def _build_graph(inst: Instance, form: str, args) -> flowgraph.FlowGraph:
    hor = bounds_mod.horizon(inst)
    if form == "af":
        return flowgraph.build_af_graph(inst, hor.T, strict_figure=args.strict_figure)
    types = _types_for(inst, args)
    if args.no_windows:
        windows = [(0, hor.T - t.p) for t in types]
    else:
        tw = bounds_mod.time_windows(inst, hor.T)
        windows = bounds_mod.type_time_windows(types, tw)
    t_prime = 0 if args.no_tprime else None
    return flowgraph.build_eaf_graph(
        inst, hor, types, windows, strict_figure=args.strict_figure, t_prime=t_prime
    )


def _build_model(inst: Instance, form: str, args) -> tuple[milp.MilpModel, flowgraph.FlowGraph | None]:
    hor = bounds_mod.horizon(inst)
    if form == "ti":
        return milp.build_ti(inst, hor.T), None
    if form == "ciqp":
        return milp.build_ciqp(inst), None
    if form == "pti":
        return milp.build_pti(inst, hor.T), None
    if form == "af":
        g = _build_graph(inst, "af", args)
        return milp.build_af_model(g, inst), g
    if form == "eaf":
        g = _build_graph(inst, "eaf", args)
        types = _types_for(inst, args)
        return milp.build_eaf_model(g, types, inst.m), g
    raise ValueError(f"unknown form {form!r}")


def _types_for(inst: Instance, args) -> list[JobType]:
    if getattr(args, "no_types", False):
        return [
            JobType(p=inst.job(j).p, w=inst.job(j).w, d=1, members=(j,))
            for j in wspt_order(inst)
        ]
    return group_job_types(inst)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _add_reduction_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strict-figure", action="store_true", help="drop the t=0 loss arc (drawing convention)")
    parser.add_argument("--no-windows", action="store_true", help="disable start-window reduction (eaf)")
    parser.add_argument("--no-types", action="store_true", help="disable job-type merging (eaf)")
    parser.add_argument("--no-tprime", action="store_true", help="keep loss arcs below T' (eaf)")


def cmd_gen(args) -> int:
    report = RunReport(command="gen")
    timer = _Timer(report)
    with timer("generate"):
        inst = generate_instance(args.n, args.m, args.pmax, args.wmax, args.seed)
    Path(args.out).write_text(write_instance(inst), encoding="utf-8")
    report.digest = _digest(inst)
    report.outputs.append(args.out)
    report.print()
    return EXIT_OK


def cmd_bounds(args) -> int:
    report = RunReport(command="bounds")
    inst = _read_instance(args.infile)
    timer = _Timer(report)
    with timer("bounds"):
        hor = bounds_mod.horizon(inst)
        tw = bounds_mod.time_windows(inst, hor.T)
    report.digest = _digest(inst)
    report.summary = {
        "H_min": hor.H_min,
        "H_max": hor.H_max,
        "T": hor.T,
        "T_prime": hor.T_prime,
    }
    report.print()
    for j in range(1, inst.n + 1):
        print(f"window job {j}: [{tw.a[j]}, {tw.b[j]}]")
    return EXIT_OK


def cmd_model(args) -> int:
    report = RunReport(command="model")
    inst = _read_instance(args.infile)
    timer = _Timer(report)
    with timer("build"):
        model, graph = _build_model(inst, args.form, args)
    with timer("emit"):
        if args.format == "lp":
            text = milp.emit_lp(model)
        else:
            text = milp.emit_mps(model)
    Path(args.out).write_text(text, encoding="utf-8")
    report.digest = _digest(inst)
    report.summary = {
        "form": args.form,
        "variables": len(model.variables),
        "constraints": len(model.constraints),
    }
    if graph is not None:
        stats = flowgraph.graph_stats(graph)
        report.summary.update(
            {
                "nodes": stats.node_count,
                "job_arcs": stats.job_arc_count,
                "loss_arcs": stats.loss_arc_count,
            }
        )
        if args.dot:
            Path(args.dot).write_text(flowgraph.to_dot(graph), encoding="utf-8")
            report.outputs.append(args.dot)
    report.outputs.append(args.out)
    report.print()
    return EXIT_OK


def cmd_compare(args) -> int:
    report = RunReport(command="compare")
    rows = []
    timer = _Timer(report)
    with timer("compare"):
        for i in range(args.seeds):
            seed = args.seed + i
            inst = generate_instance(args.n, args.m, args.pmax, args.wmax, seed)
            counts = {}
            for form in ("ti", "af", "eaf"):
                model, _ = _build_model(inst, form, args)
                counts[form] = len(model.variables)
            rows.append((seed, counts["ti"], counts["af"], counts["eaf"]))
    mean = lambda idx: sum(r[idx] for r in rows) / len(rows)
    mean_ti, mean_af, mean_eaf = mean(1), mean(2), mean(3)
    lines = ["# arcsched compare v1", "seed,vars_ti,vars_af,vars_eaf,red_af_vs_ti,red_eaf_vs_af"]
    for seed, ti, af, eaf in rows:
        lines.append(
            f"{seed},{ti},{af},{eaf},"
            f"{flowgraph.reduction_pct(ti, af):.2f},{flowgraph.reduction_pct(af, eaf):.2f}"
        )
    lines.append(
        f"mean,{mean_ti:.1f},{mean_af:.1f},{mean_eaf:.1f},"
        f"{flowgraph.reduction_pct(mean_ti, mean_af):.2f},{flowgraph.reduction_pct(mean_af, mean_eaf):.2f}"
    )
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    report.summary = {
        "instances": len(rows),
        "mean_vars_ti": f"{mean_ti:.1f}",
        "mean_vars_af": f"{mean_af:.1f}",
        "mean_vars_eaf": f"{mean_eaf:.1f}",
        "mean_red_af_vs_ti_pct": f"{flowgraph.reduction_pct(mean_ti, mean_af):.2f}",
        "mean_red_eaf_vs_af_pct": f"{flowgraph.reduction_pct(mean_af, mean_eaf):.2f}",
    }
    report.outputs.append(args.out)
    report.print()
    return EXIT_OK


def _heur_budgets(n: int, iters: int | None, time_limit: float | None) -> tuple[int, float | None]:
    """Default budgets: explicit flags win; otherwise large instances get a
    size-based wall clock (n > 100: 100 s, n >= 400: 300 s) and small ones
    a deterministic 1000 iterations."""
    if iters is None and time_limit is None:
        if n >= 400:
            time_limit = 300.0
        elif n > 100:
            time_limit = 100.0
    if iters is None:
        iters = 1000 if time_limit is None else 10**9
    return iters, time_limit


def cmd_solve_heur(args) -> int:
    report = RunReport(command="solve-heur")
    inst = _read_instance(args.infile)
    iters, time_limit = _heur_budgets(inst.n, args.iters, args.time)
    cfg = heuristic.IlsConfig(
        seed=args.seed,
        iterations=iters,
        time_limit=time_limit,
        alpha=args.alpha,
        strength=args.strength,
    )
    timer = _Timer(report)
    with timer("ils"):
        result = heuristic.ils(inst, cfg)
    Path(args.out).write_text(write_schedule(inst, result.schedule), encoding="utf-8")
    report.digest = _digest(inst)
    report.summary = {"objective": result.value, "iterations": result.iterations}
    report.outputs.append(args.out)
    report.deterministic = time_limit is None
    report.print()
    return EXIT_OK


def cmd_solve_exact(args) -> int:
    report = RunReport(command="solve-exact")
    inst = _read_instance(args.infile)
    timer = _Timer(report)
    with timer("oracle"):
        result = oracle.brute_force_optimal(inst, enumerate_all=args.all_optima)
    Path(args.out).write_text(write_schedule(inst, result.schedule), encoding="utf-8")
    report.digest = _digest(inst)
    report.summary = {"objective": result.optimum}
    if args.all_optima:
        report.summary["optimal_assignments"] = len(result.all_optima)
    report.outputs.append(args.out)
    report.print()
    return EXIT_OK


def _schedule_valuation(inst: Instance, sched: Schedule, form: str, args):
    hor = bounds_mod.horizon(inst)
    if form == "ti":
        model = milp.build_ti(inst, hor.T)
        valuation = milp.schedule_to_assignment(inst, sched, "ti", T=hor.T)
        return model, valuation
    graph = _build_graph(inst, form, args)
    if form == "af":
        model = milp.build_af_model(graph, inst)
        valuation = milp.schedule_to_assignment(inst, sched, "af", graph=graph)
    else:
        types = _types_for(inst, args)
        model = milp.build_eaf_model(graph, types, inst.m)
        valuation = milp.schedule_to_assignment(inst, sched, "eaf", graph=graph, types=types)
    return model, valuation


def cmd_check(args) -> int:
    report = RunReport(command="check")
    inst = _read_instance(args.infile)
    sched = parse_schedule(Path(args.sched).read_text(encoding="utf-8"))
    timer = _Timer(report)
    with timer("check"):
        model, valuation = _schedule_valuation(inst, sched, args.form, args)
        result = milp.check_feasible(model, valuation)
    report.digest = _digest(inst)
    report.summary = {
        "form": args.form,
        "feasible": result.feasible,
        "objective": result.objective,
    }
    if not result.feasible:
        report.summary["violated"] = ", ".join(result.violations[:10])
    report.print()
    return EXIT_OK


def _integralize(valuation: dict, kinds: dict) -> dict:
    """Round solver floats on integer variables; exact checks come after.

    Raises:
        ExternalSolverError: a value sits farther than 1e-6 from an integer.
    """
    cleaned = {}
    for name, value in valuation.items():
        v = Fraction(value)
        if kinds[name] in (milp.BINARY, milp.INTEGER):
            nearest = int(v + Fraction(1, 2)) if v >= 0 else -int(-v + Fraction(1, 2))
            if abs(v - nearest) > Fraction(1, 10**6):
                raise ExternalSolverError(f"non-integral value {value} for integer variable {name}")
            v = nearest
        if v:
            cleaned[name] = v
    return cleaned


def _decode_ti_solution(inst: Instance, valuation) -> Schedule:
    starts: dict[int, int] = {}
    for name, value in valuation.items():
        if not name.startswith("x_") or Fraction(value) < Fraction(1, 2):
            continue
        _, j, t = name.split("_")
        starts[int(j)] = int(t)
    if sorted(starts) != list(range(1, inst.n + 1)):
        raise ExternalSolverError("solution does not start every job exactly once")
    free = [0] * inst.m
    machines: list[list[int]] = [[] for _ in range(inst.m)]
    for j in sorted(starts, key=lambda j: (starts[j], j)):
        k = next((k for k in range(inst.m) if free[k] <= starts[j]), None)
        if k is None:
            raise ExternalSolverError(f"job {j} start {starts[j]} overlaps all machines")
        machines[k].append(j)
        free[k] = starts[j] + inst.job(j).p
    return Schedule(machines=tuple(sort_machine_wspt(inst, mach) for mach in machines))


def _decode_flow_solution(inst: Instance, graph, types, valuation, m: int) -> Schedule:
    arc_flow = {}
    for name, value in valuation.items():
        v = Fraction(value)
        rounded = int(v + Fraction(1, 2)) if v > 0 else 0
        if abs(v - rounded) > Fraction(1, 10**6):
            raise ExternalSolverError(f"non-integral flow {value} on {name}")
        if rounded:
            arc_flow[name] = rounded
    flow = milp.valuation_to_flow(graph, {n: v for n, v in arc_flow.items()})
    paths = flowgraph.decompose_flow(graph, flow, m, types=types)
    # over-covered jobs ride along at zero marginal cost in ties; keep first use
    seen: set[int] = set()
    machines = []
    for path in paths:
        kept = []
        for j in path:
            if j not in seen:
                seen.add(j)
                kept.append(j)
        machines.append(sort_machine_wspt(inst, kept))
    if len(seen) != inst.n:
        raise ExternalSolverError("decoded flow does not cover every job")
    return Schedule(machines=tuple(machines))


def cmd_solve_external(args) -> int:
    report = RunReport(command="solve-external")
    inst = _read_instance(args.infile)
    solver_cmd = args.solver_cmd or os.environ.get(SOLVER_ENV)
    if not solver_cmd:
        raise ExternalSolverError(f"no solver command; pass --solver-cmd or set {SOLVER_ENV}")
    timer = _Timer(report)
    with timer("build"):
        model, graph = _build_model(inst, args.form, args)
    with tempfile.TemporaryDirectory(prefix="arcsched_") as tmp:
        model_path = Path(tmp) / "model.lp"
        solution_path = Path(tmp) / "model.sol"
        model_path.write_text(milp.emit_lp(model), encoding="utf-8")
        cmd = shlex.split(solver_cmd.format(model=model_path, solution=solution_path))
        with timer("solve"):
            try:
                proc = subprocess.run(cmd, capture_output=True, text=True)
            except OSError as exc:
                raise ExternalSolverError(f"cannot run solver {cmd[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            raise ExternalSolverError(
                f"solver exited with {proc.returncode}; stderr:\n{proc.stderr.strip()}"
            )
        if not solution_path.exists():
            raise ExternalSolverError("solver wrote no solution file")
        try:
            valuation = milp.parse_solution(solution_path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise ExternalSolverError(f"unparsable solution file: {exc}") from exc
    with timer("decode"):
        kinds = {v.name: v.kind for v in model.variables}
        valuation = _integralize(
            {name: value for name, value in valuation.items() if name in kinds}, kinds
        )
        feas = milp.check_feasible(model, valuation)
        if not feas.feasible:
            raise ExternalSolverError(
                "solver solution violates the model (artifact bug): "
                + ", ".join(feas.violations[:5])
            )
        if args.form == "ti":
            sched = _decode_ti_solution(inst, valuation)
        else:
            types = _types_for(inst, args) if args.form == "eaf" else None
            flow_val = {n: v for n, v in valuation.items() if n != "ONE"}
            sched = _decode_flow_solution(inst, graph, types, flow_val, inst.m)
    objective = evaluate_schedule(inst, sched)
    if args.out:
        Path(args.out).write_text(write_schedule(inst, sched), encoding="utf-8")
        report.outputs.append(args.out)
    report.digest = _digest(inst)
    report.summary = {
        "form": args.form,
        "solver_objective": feas.objective,
        "objective": objective,
    }
    report.print()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcsched",
        description="flow-network and MILP toolkit for weighted-completion-time scheduling",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--pmax", type=_positive_int, required=True)
    p.add_argument("--wmax", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bounds", help="print horizon bounds and start windows")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("model", help="emit a model file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--form", choices=["ti", "ciqp", "pti", "af", "eaf"], required=True)
    p.add_argument("--format", choices=["lp", "mps"], default="lp")
    p.add_argument("--out", required=True)
    p.add_argument("--dot", help="also write the flow network as DOT (af/eaf)")
    _add_reduction_flags(p)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("compare", help="variable-count comparison across ti/af/eaf")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--pmax", type=_positive_int, required=True)
    p.add_argument("--wmax", type=_positive_int, default=20)
    p.add_argument("--seeds", type=_positive_int, required=True, help="number of seeded instances")
    p.add_argument("--seed", type=int, default=1, help="first seed")
    p.add_argument("--out", required=True)
    _add_reduction_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("solve-heur", help="iterated local search")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--iters", type=int, default=None, help="iteration budget (default 1000)")
    p.add_argument("--time", type=float, default=None,
                   help="wall-clock budget in seconds (default for n > 100: 100, n >= 400: 300)")
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--strength", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve_heur)

    p = sub.add_parser("solve-exact", help="brute-force optimum (tiny instances)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--all-optima", action="store_true")
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("check", help="map a schedule into a model and verify")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--sched", required=True)
    p.add_argument("--form", choices=["ti", "af", "eaf"], required=True)
    _add_reduction_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve-external", help="solve via an external MILP solver")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--form", choices=["ti", "af", "eaf"], required=True)
    p.add_argument(
        "--solver-cmd",
        help="command template with {model} and {solution} placeholders"
        f" (default from ${SOLVER_ENV})",
    )
    p.add_argument("--out")
    _add_reduction_flags(p)
    p.set_defaults(func=cmd_solve_external)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cmd", None) == "model" and args.form == "ciqp" and args.format == "mps":
        parser.error("form ciqp has a quadratic objective; MPS is unsupported, use --format lp")
    try:
        return args.func(args)
    except (ParseError, ValidationError, bounds_mod.InfeasibleWindowError,
            flowgraph.InfeasibleHorizonError, milp.MappingError,
            milp.UnsupportedFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except oracle.SizeLimitError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ExternalSolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
