"""Command-line front end.

Subcommands: ``br``, ``contain``, ``simulate``, ``oracle``, ``cayley``.
Every run prints a structured-text report (sorted ``config.*`` and
``result.*`` lines, then CSV blocks); identical configurations produce
byte-identical reports.  Exit codes: 0 determinate result, 1 usage or
parse error, 2 indeterminate result, 3 strategy fault.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .branching import (
    br_bracket,
    br_exact_periodic,
    check_certificate,
    cut_weight,
    lower_bound_certificate,
    max_flow,
    min_cut_weight,
)
from .cayley import (
    group_from_name,
    growth_rate_estimate,
    lex_min_tree,
    polynomial_probe,
    wait_and_surround,
)
from .errors import (
    ResourceLimitError,
    SpecError,
    StrategyFault,
    SurroundCapError,
    SynthesisError,
)
from .game import (
    BudgetSequence,
    CanonicalStrategy,
    ScheduleStrategy,
    feasibility_check,
    format_trace,
    parse_trace,
    simulate,
    synthesize_cutset_strategy,
)
from .oracle import OracleCache, brute_force_containment, oracle_key
from .trees import (
    ExplicitSpec,
    PeriodicSpec,
    expand,
    format_tree_spec,
    load_tree_spec,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INDETERMINATE = 2
EXIT_FAULT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 \
            else str(value.numerator)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value) if value else "-"
    return str(value)


def emit_report(config: dict, result: dict, tables=(), out: str | None = None) -> str:
    lines = [f"config.{k} = {_fmt(config[k])}" for k in sorted(config)]
    lines += [f"result.{k} = {_fmt(result[k])}" for k in sorted(result)]
    for name, header, rows in tables:
        lines.append(f"csv {name}")
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _rate(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"rate {text!r} is not a rational number")


def _base_config(args, command: str) -> dict:
    cfg = {"command": command, "version": __version__, "seed": args.seed}
    return cfg


# ---------------------------------------------------------------------------


def cmd_br(args) -> int:
    spec = load_tree_spec(args.spec)
    config = _base_config(args, "br")
    config.update(spec=args.spec, tol=args.tol, depth_max=args.D_max)
    result: dict = {}
    tables = []
    code = EXIT_OK
    if getattr(args, "lambda") is not None:
        lam = _rate(getattr(args, "lambda"))
        config["lambda"] = lam
        rows = []
        for depth in range(1, args.cut_depths + 1):
            trunc = expand(spec, depth)
            rows.append((lam, depth, min_cut_weight(trunc, lam),
                         max_flow(trunc, lam).value))
        tables.append(("cuts", ("lambda", "depth", "min_cut", "flow_value"), rows))
    finite = isinstance(spec, ExplicitSpec) or (
        isinstance(spec, PeriodicSpec) and spec.is_finite()
    )
    if finite:
        result["br_exact"] = 1.0
        result["note"] = "finite tree; branching number is 1 by convention"
    else:
        if isinstance(spec, PeriodicSpec):
            result["br_exact"] = br_exact_periodic(spec)
        bracket = br_bracket(spec, tol=args.tol, depth_max=args.D_max)
        result.update(
            bracket_lo=bracket.lo,
            bracket_hi=bracket.hi,
            bracket_width=bracket.width,
            bracket_determinate=bracket.determinate,
        )
        tables.append((
            "probes", ("lambda", "verdict", "depth"),
            [(lam, verdict, depth) for lam, verdict, depth in bracket.probes],
        ))
        if not bracket.determinate:
            result["note"] = "heuristic bracket: a probe stayed indeterminate"
            code = EXIT_INDETERMINATE
    emit_report(config, result, tables, args.out)
    return code


def cmd_contain(args) -> int:
    spec = load_tree_spec(args.spec)
    lam = _rate(getattr(args, "lambda"))
    config = _base_config(args, "contain")
    config.update(spec=args.spec, **{"lambda": lam}, k=args.k, depth_max=args.D_max)
    result: dict = {}
    tables = []

    if isinstance(spec, ExplicitSpec) or (
        isinstance(spec, PeriodicSpec) and spec.is_finite()
    ):
        raise SpecError("contain needs an infinite tree spec")

    margin = 1e-6
    if isinstance(spec, PeriodicSpec):
        br = br_exact_periodic(spec)
        result["br_exact"] = br
        lo, hi = br - margin, br + margin
    else:
        bracket = br_bracket(spec, tol=min(1e-3, margin * 1000))
        if not bracket.determinate:
            result["regime"] = "undetermined"
            emit_report(config, result, tables, args.out)
            return EXIT_INDETERMINATE
        result.update(bracket_lo=bracket.lo, bracket_hi=bracket.hi)
        lo, hi = bracket.lo, bracket.hi

    lam_f = float(lam)
    if lam_f > hi:
        result["regime"] = "above"
        synth = synthesize_cutset_strategy(spec, lam, args.k, depth_max=args.D_max)
        budget = BudgetSequence.exponential(lam)
        verdict = simulate(synth.trunc, args.k, synth.strategy, budget)
        result.update(
            epsilon=float(synth.epsilon),
            cut_depth=synth.depth,
            cut_size=len(synth.cutset.edges),
            cut_weight=cut_weight(synth.trunc, synth.cutset, lam),
            flow_value=max_flow(synth.trunc, lam).value,
            verdict=verdict.kind,
            verdict_round=verdict.round_no,
            burnt=verdict.burnt,
        )
        tables.append((
            "schedule", ("round", "budget", "protect"),
            [
                (r, budget(r), " ".join(str(v) for v in vs))
                for r, vs in sorted(synth.strategy.by_round.items())
            ],
        ))
        emit_report(config, result, tables, args.out)
        return EXIT_OK

    if lam_f < lo:
        result["regime"] = "below"
        evidence_rows = []
        if isinstance(spec, PeriodicSpec):
            cert = lower_bound_certificate(spec, lam)
            checks = check_certificate(cert)
            result.update(
                certificate_mid_rate=cert.mid_rate,
                certificate_budget_coeff=cert.budget_coeff,
                certificate_cut_floor=cert.cut_weight_floor,
                certificate_radius=cert.radius,
                certificate_valid=all(checks.values()),
            )
            radius = cert.radius
        else:
            result["note"] = ("certificates need a periodic spec; feasibility "
                              "shown at the requested radius only (small balls "
                              "can stay containable below the threshold)")
            radius = args.k
        budget = BudgetSequence.exponential(lam)
        for depth in range(radius + 1, radius + 1 + args.evidence_depths):
            fr = feasibility_check(spec, radius, budget, depth)
            evidence_rows.append((depth, "feasible" if fr.feasible else "infeasible"))
        result["all_probed_depths_infeasible"] = all(
            row[1] == "infeasible" for row in evidence_rows
        )
        tables.append(("feasibility_evidence", ("depth", "decision"), evidence_rows))
        emit_report(config, result, tables, args.out)
        return EXIT_OK

    result["regime"] = "undetermined"
    result["note"] = "rate is at or too close to the containment threshold"
    emit_report(config, result, tables, args.out)
    return EXIT_INDETERMINATE


def cmd_simulate(args) -> int:
    spec = load_tree_spec(args.spec)
    budget = BudgetSequence.parse(args.budget)
    trunc = expand(spec, args.depth)
    config = _base_config(args, "simulate")
    config.update(spec=args.spec, k=args.k, budget=budget.describe(),
                  depth=args.depth, horizon=args.horizon)
    result: dict = {}
    tables = []

    if args.replay:
        with open(args.replay, "r", encoding="utf-8") as fh:
            schedule, claimed = parse_trace(fh.read())
        strategy = ScheduleStrategy(schedule)
        config["replay"] = args.replay
    elif args.protect:
        vprime = [int(t) for t in args.protect.split(",") if t]
        for v in vprime:
            if not 0 <= v < trunc.n_vertices:
                raise SpecError(f"vertex {v} is outside the depth-{args.depth} truncation")
        strategy = CanonicalStrategy(vprime)
        config["protect"] = ",".join(str(v) for v in vprime)
    elif args.schedule:
        schedule = {}
        for chunk in args.schedule.split(";"):
            r, _, ids = chunk.partition(":")
            schedule[int(r)] = tuple(int(t) for t in ids.split(",") if t)
        strategy = ScheduleStrategy(schedule)
        config["schedule"] = args.schedule
    else:
        strategy = ScheduleStrategy({})

    verdict = simulate(trunc, args.k, strategy, budget, horizon=args.horizon)
    result.update(verdict=verdict.kind, verdict_round=verdict.round_no,
                  burnt=verdict.burnt)
    tables.append((
        "trace", ("round", "protect", "burn"),
        [
            (r.round_no,
             " ".join(str(v) for v in r.protected) or "-",
             " ".join(str(v) for v in r.burnt) or "-")
            for r in verdict.trace
        ],
    ))
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(format_trace(verdict))
    code = EXIT_OK if verdict.contained else EXIT_INDETERMINATE
    if args.replay:
        match = (claimed.get("kind") == verdict.kind
                 and claimed.get("round_no") == verdict.round_no
                 and claimed.get("burnt") == verdict.burnt)
        result["replay_match"] = match
        if not match:
            code = EXIT_INDETERMINATE
    emit_report(config, result, tables, args.out)
    return code


def cmd_oracle(args) -> int:
    spec = load_tree_spec(args.spec)
    if not isinstance(spec, ExplicitSpec):
        raise SpecError("the oracle runs on explicit tree specs only")
    budget = BudgetSequence.parse(args.budget)
    depth = args.depth if args.depth is not None else spec.height()
    trunc = expand(spec, depth)
    if args.x0:
        fire = sorted({int(t) for t in args.x0.split(",") if t})
    else:
        fire = [v for v in range(trunc.n_vertices) if trunc.level[v] <= args.k]
    config = _base_config(args, "oracle")
    config.update(spec=args.spec, k=args.k, x0=",".join(str(v) for v in fire),
                  budget=budget.describe(), depth=depth, strict=args.strict,
                  horizon=args.horizon)
    result: dict = {}

    cache = OracleCache(args.cache) if args.cache else None
    key = oracle_key(format_tree_spec(spec), fire, budget, args.horizon,
                     restrict=not args.strict)
    decision = cache.get(key) if cache else None
    result["cache_hit"] = decision is not None
    if decision is None:
        decision = brute_force_containment(trunc, fire, budget,
                                           horizon=args.horizon,
                                           restrict=not args.strict)
        if cache:
            cache.put(key, decision)
    result["feasible"] = decision.feasible
    tables = []
    if decision.feasible:
        tables.append((
            "witness", ("round", "protect"),
            [
                (r, " ".join(str(v) for v in vs) or "-")
                for r, vs in enumerate(decision.schedule, start=1)
            ],
        ))
    emit_report(config, result, tables, args.out)
    return EXIT_OK


def cmd_cayley(args) -> int:
    model = group_from_name(args.group)
    config = _base_config(args, "cayley")
    config.update(group=args.group, mode=args.mode, R=args.R)
    result: dict = {}
    tables = []
    code = EXIT_OK

    if args.mode == "growth":
        est = growth_rate_estimate(model, args.R)
        result.update(ball_root=est.ball_root, sphere_ratio=est.sphere_ratio,
                      ball_size=est.ball_sizes[-1])
        tables.append((
            "growth", ("n", "sphere", "ball", "ball_root", "sphere_ratio"),
            [
                (n, est.sphere_sizes[n], est.ball_sizes[n],
                 est.ball_root_sequence[n - 1], est.sphere_ratio_sequence[n - 1])
                for n in range(1, args.R + 1)
            ],
        ))
    elif args.mode == "surround":
        lam = _rate(getattr(args, "lambda"))
        config["lambda"] = lam
        config["k"] = args.k
        try:
            res = wait_and_surround(model, args.k, lam, args.R)
        except SurroundCapError as exc:
            result.update(regime="cap_exhausted", note=str(exc))
            tables.append((
                "budget_vs_sphere", ("round", "budget", "sphere"), list(exc.trace),
            ))
            emit_report(config, result, tables, args.out)
            return EXIT_INDETERMINATE
        result.update(
            trigger_round=res.trigger_round,
            sphere_index=res.sphere_index,
            sphere_size=len(res.strategy.sphere),
            verdict=res.verdict.kind,
            verdict_round=res.verdict.round_no,
            burnt=res.verdict.burnt,
        )
        tables.append((
            "budget_vs_sphere", ("round", "budget", "sphere"), list(res.budget_trace),
        ))
        if not res.verdict.contained:
            code = EXIT_INDETERMINATE
    elif args.mode == "polyprobe":
        config["k"] = args.k
        config["c"] = args.c
        config["d"] = args.d
        report = polynomial_probe(model, Fraction(args.c), args.d, args.k, args.R)
        result.update(
            feasible=report.feasibility.feasible,
            note=report.note,
        )
        tables.append((
            "budget_vs_sphere", ("n", "cumulative_budget", "sphere_n_plus_1"),
            list(report.budget_vs_sphere),
        ))
    elif args.mode == "tree":
        tree = lex_min_tree(model, args.R)
        text = format_tree_spec(tree.spec)
        words = "".join(
            f"# vertex {v} = {tree.ball.word_str(v) or 'id'}\n"
            for v in range(tree.ball.n_vertices)
        )
        if not args.out:
            raise SpecError("--out is required for mode tree")
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(words + text)
        result.update(vertices=tree.ball.n_vertices, out=args.out,
                      level_counts=tuple(tree.level_counts()))
        emit_report(config, result, tables, None)
        return EXIT_OK
    else:
        raise SpecError(f"unknown cayley mode {args.mode!r}")

    emit_report(config, result, tables, args.out)
    return code


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="firebreak", description=__doc__)
    parser.add_argument("--seed", type=int, default=0,
                        help="seed recorded in reports (corpus shuffles)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("br", help="branching number: exact (periodic) and bracket")
    p.add_argument("spec")
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--D-max", dest="D_max", type=int, default=50_000)
    p.add_argument("--lambda", default=None,
                   help="also tabulate min-cut and flow values at this rate")
    p.add_argument("--cut-depths", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_br)

    p = sub.add_parser("contain", help="synthesize or refute containment at a rate")
    p.add_argument("spec")
    p.add_argument("--lambda", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--D-max", dest="D_max", type=int, default=40)
    p.add_argument("--evidence-depths", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_contain)

    p = sub.add_parser("simulate", help="play a strategy and print the trace")
    p.add_argument("spec")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", required=True)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--protect", help="comma-separated ids for a canonical strategy")
    p.add_argument("--schedule", help="round:ids;round:ids explicit schedule")
    p.add_argument("--replay", help="trace file to replay and verify")
    p.add_argument("--trace-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force containment on a small explicit tree")
    p.add_argument("spec")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--x0", help="explicit initial fire ids (overrides --k)")
    p.add_argument("--budget", required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--strict", action="store_true",
                   help="unpruned protect-set enumeration (soundness audits)")
    p.add_argument("--cache", help="plain-text result cache file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("cayley", help="Cayley-graph growth, surround, probes, exports")
    p.add_argument("group", help="free:R | zd:D | dinf | freeprod:M1,M2[,..]")
    p.add_argument("--mode", required=True,
                   choices=["growth", "surround", "polyprobe", "tree"])
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--lambda", default=None)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--c", default="1")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cayley)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SpecError as exc:
        sys.stderr.write(f"firebreak: {exc}\n")
        return EXIT_USAGE
    except StrategyFault as exc:
        sys.stderr.write(f"firebreak: strategy fault: {exc}\n")
        return EXIT_FAULT
    except SynthesisError as exc:
        sys.stderr.write(f"firebreak: {exc}\n")
        return EXIT_INDETERMINATE
    except ResourceLimitError as exc:
        sys.stderr.write(f"firebreak: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"firebreak: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
