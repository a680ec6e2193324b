"""Command-line entry point.

Exit codes: 0 success, 1 a property or check failed, 2 bad input,
3 solver did not converge, 4 solvers disagree.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Sequence

from . import axioms, dual, preferences
from .core import (
    DisappointmentSet,
    FiniteSpace,
    MissingOutcomeError,
    ModelError,
    OutcomeAct,
    UtilityAct,
    apply_utility,
    check_beta,
    disappointment_set,
)
from .io import InputError, Problem, canonical_json, load_problem
from .solvers import (
    ConvergenceError,
    CrossCheckError,
    SolverConfig,
    expectile,
    iterative_reweighting,
    solve_all,
)

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_DIVERGED = 0, 1, 2, 3, 4

DEFAULT_AXIOM_BETAS = "-0.9,-0.5,0,0.5,1,5"


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _resolve_beta(args, problem: Problem) -> float:
    if args.beta is not None:
        return check_beta(args.beta)
    if problem.agent is not None:
        return problem.agent.beta
    raise UsageError("no beta: pass --beta or give an agent in the input")


def _utility_acts(problem: Problem, beta: float) -> list[tuple[str, UtilityAct]]:
    out = []
    for name, act in problem.acts:
        if isinstance(act, OutcomeAct):
            if problem.agent is None:
                raise UsageError(f"act {name!r} is given in outcomes but the input has no agent")
            act = apply_utility(act, problem.agent)
        out.append((name, act))
    if not out:
        raise UsageError("the input contains no acts")
    return out


def _config(args) -> SolverConfig:
    return SolverConfig(abs_tol=args.tol, max_iter=args.max_iter)


def _event_labels(space: FiniteSpace, D) -> list[str]:
    return D.labels(space)


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    if isinstance(x, (list, tuple)):
        return "(" + ", ".join(_fmt(v) for v in x) + ")"
    if x is None:
        return "-"
    return str(x)


def _table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [list(header)] + [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def cmd_eval(args, problem: Problem) -> tuple[int, dict, str]:
    beta = _resolve_beta(args, problem)
    cfg = _config(args)
    rows, out = [], []
    code = EXIT_OK
    for name, U in _utility_acts(problem, beta):
        entry: dict[str, Any] = {"name": name}
        if args.cross_check:
            report = solve_all(U, beta, cfg)
            entry["cross_check"] = {
                "values": report.values,
                "max_discrepancy": report.max_discrepancy,
                "tol": report.tol,
            }
            if not report.agrees:
                code = EXIT_DIVERGED
            value = report.values[args.algorithm]
        else:
            value = expectile(U, beta, cfg, algorithm=args.algorithm)
        Q = dual.optimal_scenario(U, beta)
        D = disappointment_set(U, value)
        entry.update(
            value=value,
            disappointment_set=_event_labels(problem.space, D),
            scenario={"density": list(Q.density), "probs": Q.probs.tolist()},
        )
        if problem.agent is not None:
            entry["certainty_equivalent"] = preferences.outcome_worth(value, problem.agent)
        out.append(entry)
        rows.append([name, value, "{" + ",".join(entry["disappointment_set"]) + "}",
                     entry["scenario"]["probs"],
                     entry.get("cross_check", {}).get("max_discrepancy")])
    doc = {"command": "eval", "beta": beta, "algorithm": args.algorithm, "acts": out}
    text = _table(["act", "value", "disappointed", "Q*", "max discrepancy"], rows)
    if code == EXIT_DIVERGED:
        print("solvers disagree beyond tolerance", file=sys.stderr)
    return code, doc, text


def cmd_trace(args, problem: Problem) -> tuple[int, dict, str]:
    beta = _resolve_beta(args, problem)
    out, blocks = [], []
    for name, U in _utility_acts(problem, beta):
        value, trace = iterative_reweighting(U, beta)
        rows = [{"step": k, "v": v, "masses": list(m)} for k, (v, m) in enumerate(trace.iterates)]
        out.append({"name": name, "value": value, "steps": trace.steps,
                    "converged": trace.converged, "rows": rows})
        blocks.append(f"{name}\n" + _table(["step", "v", "masses"],
                                           [[r["step"], r["v"], r["masses"]] for r in rows]))
    return EXIT_OK, {"command": "trace", "beta": beta, "acts": out}, "\n\n".join(blocks)


def cmd_dual(args, problem: Problem) -> tuple[int, dict, str]:
    beta = _resolve_beta(args, problem)
    space = problem.space
    out, blocks = [], []
    for name, U in _utility_acts(problem, beta):
        value = expectile(U, beta)
        Q = dual.optimal_scenario(U, beta)
        D = disappointment_set(U, value)
        entry: dict[str, Any] = {
            "name": name,
            "value": value,
            "scenario_value": dual.scenario_value(U, Q),
            "optimal_event": _event_labels(space, D),
            "scenario": {"density": list(Q.density), "probs": Q.probs.tolist()},
            "in_density_set": dual.scenario_in_density_set(Q, beta),
        }
        lines = [f"{name}: value {_fmt(value)}, Q* = {_fmt(Q.probs.tolist())}, "
                 f"event {{{','.join(entry['optimal_event'])}}}"]
        if args.brute_force:
            best, event = dual.brute_force_dual(U, beta, allow_large=args.allow_large)
            table = dual.event_table(U, beta, allow_large=args.allow_large)
            entry["brute_force"] = {
                "objective": "min" if beta >= 0 else "max",
                "value": best,
                "event": _event_labels(space, event),
                "table": [{"event": _event_labels(space, E), "value": v} for E, v in table],
            }
            lines.append(_table(["event", "value"],
                                [["{" + ",".join(_event_labels(space, E)) + "}", v] for E, v in table]))
            lines.append(f"{entry['brute_force']['objective']} {_fmt(best)} at "
                         f"{{{','.join(entry['brute_force']['event'])}}}")
        out.append(entry)
        blocks.append("\n".join(lines))
    return EXIT_OK, {"command": "dual", "beta": beta, "acts": out}, "\n\n".join(blocks)


def _axiom_space(args) -> FiniteSpace:
    if args.input:
        return load_problem(args.input).space
    if args.states < 1:
        raise UsageError("--states must be at least 1")
    return FiniteSpace.uniform(args.states)


def cmd_axioms(args) -> tuple[int, dict, str]:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    space = _axiom_space(args)
    doc: dict[str, Any] = {"command": "axioms", "seed": args.seed, "trials": args.trials,
                           "states": list(space.states), "tol": args.tol}
    if args.fingerprint:
        evaluator = _fingerprint_target(args.fingerprint)
        fp = axioms.fingerprint_functional(evaluator, space, args.trials, args.seed, args.tol)
        doc["fingerprint"] = {
            "target": args.fingerprint,
            "verdict": fp.verdict,
            "beta_hat": fp.beta_hat,
            "witness": list(fp.witness.values) if fp.witness is not None else None,
            "discrepancy": fp.discrepancy if fp.discrepancy != float("inf") else None,
        }
        text = (f"{args.fingerprint}: {fp.verdict}, beta_hat = {_fmt(fp.beta_hat)}"
                + (f", witness {_fmt(list(fp.witness.values))}" if fp.witness else ""))
        return (EXIT_OK if fp.consistent else EXIT_CHECK), doc, text

    props = args.property or [p.value for p in axioms.Property]
    if space.n < 2:
        props = [p for p in props if p not in _NEEDS_TWO_STATES]
    reports = []
    for beta in args.betas:
        for prop in props:
            reports.append(axioms.run_property(prop, space, beta, args.trials, args.seed, args.tol))
    doc["reports"] = [
        {"property": r.property_id, "beta": r.beta, "trials": r.trials, "failures": r.failures,
         "worst_violation": r.worst_violation, "seed": r.seed, "first_failure": r.first_failure}
        for r in reports
    ]
    failed = sum(r.failures for r in reports)
    doc["failures"] = failed
    text = _table(["property", "beta", "trials", "failures", "worst violation"],
                  [[r.property_id, r.beta, r.trials, r.failures, r.worst_violation] for r in reports])
    return (EXIT_CHECK if failed else EXIT_OK), doc, text


_NEEDS_TWO_STATES = {
    axioms.Property.CONCORDANT_ADDITIVITY.value,
    axioms.Property.DISAPPOINTMENT_HEDGING.value,
    axioms.Property.DISAPPOINTMENT_STACKING.value,
}


def _fingerprint_target(name: str):
    if name.startswith("expectile:"):
        return axioms.expectile_functional(float(name.split(":", 1)[1]))
    try:
        return axioms.REFERENCE_FUNCTIONALS[name]
    except KeyError:
        known = ", ".join([*axioms.REFERENCE_FUNCTIONALS, "expectile:<beta>"])
        raise UsageError(f"unknown functional {name!r} (known: {known})") from None


def cmd_sweep(args, problem: Problem) -> tuple[int, dict, str]:
    beta = args.beta if args.beta is not None else (problem.agent.beta if problem.agent else 0.0)
    out, blocks = [], []
    for name, U in _utility_acts(problem, beta):
        sweep = preferences.beta_sweep(U, args.betas)
        out.append({"name": name, "sweep": [{"beta": b, "value": v} for b, v in sweep]})
        if args.plot_table:
            blocks.append("\n".join([f"# {name}", "beta\tvalue"]
                                    + [f"{format(b, '.17g')}\t{format(v, '.17g')}" for b, v in sweep]))
        else:
            blocks.append(f"{name}\n" + _table(["beta", "value"], sweep))
    return EXIT_OK, {"command": "sweep", "acts": out}, "\n\n".join(blocks)


def cmd_infer_beta(args) -> tuple[int, dict, str]:
    if args.input:
        if not args.event:
            raise UsageError("--event is required with an input file")
        space = load_problem(args.input).space
        members = frozenset(space.index(s.strip()) for s in args.event.split(","))
        beta = axioms.infer_beta(space, DisappointmentSet(members), args.observed, args.ux, args.uy)
        p_event = space.prob(members)
    else:
        if args.prob is None:
            raise UsageError("give --prob, or an input file with --event")
        p_event = args.prob
        beta = axioms.infer_beta_from_prob(p_event, args.observed, args.ux, args.uy)
    doc = {"command": "infer-beta", "p_event": p_event, "observed": args.observed,
           "ux": args.ux, "uy": args.uy, "beta": beta}
    return EXIT_OK, doc, f"beta = {_fmt(beta)}"


def cmd_compare(args, problem: Problem) -> tuple[int, dict, str]:
    agents = dict(problem.agents)
    if len(agents) != 2:
        raise UsageError("the input must define exactly two agents under 'agents'")
    (name_a, A), (name_b, B) = problem.agents
    report = preferences.compare_agents(A, B, problem.space, args.trials, args.seed)
    verdict = report.describe(name_a, name_b)
    doc = {
        "command": "compare",
        "agents": [name_a, name_b],
        "affine_related": report.affine_related,
        "affine_coeffs": list(report.affine_coeffs) if report.affine_coeffs else None,
        "max_residual": report.max_residual,
        "beta_order": report.beta_order,
        "more_averse": report.more_averse,
        "empirical_relation_holds": report.empirical_relation_holds,
        "trials": report.trials,
        "seed": args.seed,
        "verdict": verdict,
    }
    code = EXIT_OK if report.empirical_relation_holds or not report.more_averse else EXIT_CHECK
    return code, doc, verdict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expectiled",
        description="Expectiled utility: evaluation, maxmin dual, traces and axiom checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="problem file (.json or .csv)")
        p.add_argument("--beta", type=float, default=None, help="disappointment aversion coefficient")
        p.add_argument("--format", choices=["json", "table"], default="json")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", type=int, default=200)

    p = sub.add_parser("eval", help="expectiled utility of each act")
    common(p)
    p.add_argument("--algorithm", choices=["balance", "gul", "iterative", "als"], default="iterative")
    p.add_argument("--cross-check", action="store_true", help="run all four solvers and compare")

    p = sub.add_parser("trace", help="iterative reweighting trace")
    common(p)

    p = sub.add_parser("dual", help="worst-case scenario and event enumeration")
    common(p)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--allow-large", action="store_true", help=f"lift the {dual.ENUMERATION_GUARD}-state guard")

    p = sub.add_parser("axioms", help="property and axiom suite on random acts")
    p.add_argument("input", nargs="?", help="optional problem file supplying the space")
    p.add_argument("--states", type=int, default=6, help="uniform space size when no input is given")
    p.add_argument("--beta", dest="betas", type=_floats, default=_floats(DEFAULT_AXIOM_BETAS))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--property", action="append", choices=[q.value for q in axioms.Property])
    p.add_argument("--fingerprint", help="test a functional instead: mean, max, median-like, mad, expectile:<beta>")
    p.add_argument("--format", choices=["json", "table"], default="json")

    p = sub.add_parser("sweep", help="value of each act across betas")
    common(p)
    p.add_argument("--betas", type=_floats, required=True)
    p.add_argument("--plot-table", action="store_true", help="two-column beta/value output")

    p = sub.add_parser("infer-beta", help="coefficient implied by the price of a bet")
    p.add_argument("input", nargs="?")
    p.add_argument("--event", help="comma-separated state labels of the winning event")
    p.add_argument("--prob", type=float, help="probability of the winning event")
    p.add_argument("--observed", type=float, required=True)
    p.add_argument("--ux", type=float, default=1.0)
    p.add_argument("--uy", type=float, default=0.0)
    p.add_argument("--format", choices=["json", "table"], default="json")

    p = sub.add_parser("compare", help="comparative disappointment aversion of two agents")
    p.add_argument("input")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "table"], default="json")
    return parser


_WITH_PROBLEM = {"eval": cmd_eval, "trace": cmd_trace, "dual": cmd_dual,
                 "sweep": cmd_sweep, "compare": cmd_compare}
_STANDALONE = {"axioms": cmd_axioms, "infer-beta": cmd_infer_beta}


def _glue_negative_lists(argv: Sequence[str]) -> list[str]:
    # argparse reads "-0.5,1" as an option flag; attach it to its option instead
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--beta", "--betas"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and "," in nxt:
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_negative_lists(sys.argv[1:] if argv is None else [str(a) for a in argv])
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command in _WITH_PROBLEM:
            problem = load_problem(args.input)
            code, doc, text = _WITH_PROBLEM[args.command](args, problem)
        else:
            code, doc, text = _STANDALONE[args.command](args)
    except (InputError, ModelError, MissingOutcomeError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc} (last bracket {exc.bracket})", file=sys.stderr)
        return EXIT_NONCONVERGED
    except CrossCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    print(canonical_json(doc) if args.format == "json" else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
