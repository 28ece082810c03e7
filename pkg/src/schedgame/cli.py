"""Command-line entry point.

Exit codes: 0 success, 1 input or usage error, 2 no equilibrium (or an
infeasible profile for ``spe``), 3 an equilibrium failed ``--verify``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .equilibrium import (
    MatrixBuildError,
    MixedProfile,
    build_matrix,
    mixed_nash_2p,
    pure_nash,
    verify_equilibrium,
)
from .nfg import export_nfg
from .problem_io import ProblemFormatError, check_sentinel, load_problem
from .render import format_cell, render_gantt, render_matrix, render_report
from .report import build_report, config_echo, report_to_json
from .schedule_game import ORDER_MODES, TIE_BREAKS, solve_internal

EXIT_OK, EXIT_INPUT, EXIT_NO_EQUILIBRIUM, EXIT_VERIFY = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("problem", help="problem file (YAML, format 1)")
    p.add_argument("--penalty", type=float, help="delay penalty per step")
    p.add_argument("--goal-reward", type=float, help="reward per declared goal")
    p.add_argument("--sentinel", type=float, help="payoff of infeasible plan profiles")
    p.add_argument("--seed", type=int, help="seed for agent order and seeded tie-breaks")
    p.add_argument("--agent-order", choices=ORDER_MODES)
    p.add_argument("--tie-break", choices=TIE_BREAKS)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--output", help="write the output here instead of stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the matrix build")


def build_parser():
    parser = _Parser(prog="schedgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", help="matrix, equilibria, annotations and schedules")
    _common(p)
    p.add_argument("--verify", action="store_true", help="re-check every reported equilibrium")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("matrix", help="render the payoff matrix only")
    _common(p)
    p.set_defaults(func=cmd_matrix)
    p = sub.add_parser("spe", help="solve the schedule game of one plan profile")
    _common(p)
    p.add_argument("selection", nargs="*",
                   help="AGENT=PLAN pairs, or plan names in agent order (default: first plans)")
    p.set_defaults(func=cmd_spe)
    p = sub.add_parser("export", help="write the normal-form game as .nfg")
    _common(p)
    p.set_defaults(func=cmd_export)
    return parser


def _load(args):
    try:
        problem = load_problem(args.problem)
    except OSError as exc:
        raise InputError(f"cannot read {args.problem}: {exc.strerror or exc}") from None
    except ProblemFormatError as exc:
        raise InputError(f"{args.problem}: {exc}") from None
    try:
        problem = problem.with_overrides(
            goal_reward=args.goal_reward, delay_penalty=args.penalty,
            infeasible_payoff=args.sentinel, seed=args.seed,
            tie_break=args.tie_break, agent_order=args.agent_order,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    problem_msg = check_sentinel(problem)
    if problem_msg:
        raise InputError(problem_msg)
    return problem


def _matrix(problem, args):
    if args.jobs < 1:
        raise InputError(f"--jobs must be at least 1, got {args.jobs}")
    try:
        return build_matrix(problem, workers=args.jobs)
    except (ValueError, MatrixBuildError) as exc:
        raise InputError(str(exc)) from None


def _emit(text, args):
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {args.output}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    problem = _load(args)
    game = _matrix(problem, args)
    report = build_report(problem, game)
    if args.verify:
        candidates = list(pure_nash(game))
        if game.n == 2:
            candidates += [m for m in mixed_nash_2p(game).equilibria if not m.is_pure]
        for eq in candidates:
            if not verify_equilibrium(game, eq):
                label = eq.probabilities if isinstance(eq, MixedProfile) else game.cell_names(eq)
                print(f"verification failed for equilibrium {label}", file=sys.stderr)
                return EXIT_VERIFY
    text = report_to_json(report) if args.format == "structured" else render_report(report)
    _emit(text, args)
    found = report.equilibrium_count + len(report.degenerate_supports)
    return EXIT_OK if found else EXIT_NO_EQUILIBRIUM


def cmd_matrix(args) -> int:
    problem = _load(args)
    game = _matrix(problem, args)
    if args.format == "structured":
        report = build_report(problem, game)
        doc = {"problem": report.problem, "config": asdict(report.config), "agents": report.agents,
               "strategies": report.strategies, "cells": [asdict(c) for c in report.cells]}
        _emit(json.dumps(doc, indent=2) + "\n", args)
    else:
        _emit(render_matrix(game) + "\n", args)
    return EXIT_OK


def _select(problem, selection):
    plans = [a.plans[0] if a.plans else None for a in problem.agents]
    positional = 0
    for item in selection:
        if "=" in item:
            agent_name, plan_name = item.split("=", 1)
            try:
                idx = problem.agent_names.index(agent_name)
            except ValueError:
                raise InputError(f"unknown agent {agent_name!r}; agents: "
                                 f"{', '.join(problem.agent_names)}") from None
        else:
            idx, plan_name = positional, item
            positional += 1
            if idx >= len(problem.agents):
                raise InputError("more plan names than agents")
        agent = problem.agents[idx]
        try:
            plans[idx] = agent.plan(plan_name)
        except KeyError:
            valid = ", ".join(p.name for p in agent.plans)
            raise InputError(f"unknown plan {plan_name!r} for agent {agent.name}; valid plans: {valid}") from None
    for agent, plan in zip(problem.agents, plans):
        if plan is None:
            raise InputError(f"agent {agent.name!r} has no plan")
    return plans


def cmd_spe(args) -> int:
    problem = _load(args)
    plans = _select(problem, args.selection)
    result = solve_internal(plans, problem.init, problem.utility, problem.seed,
                            order_mode=problem.agent_order, tie_break=problem.tie_break)
    profile = result.profile
    agents = problem.agent_names
    order = [agents[i] for i in result.agent_order]
    if args.format == "structured":
        doc = {
            "problem": problem.name,
            "config": asdict(config_echo(problem)),
            "plans": [p.name for p in plans],
            "feasible": profile.feasible,
            "payoffs": list(result.payoff_vector),
            "delays": list(profile.delays),
            "schedule": [list(r) for r in profile.action_names()] if profile.feasible else [],
            "agent_order": order,
            "tree_stats": asdict(result.tree_stats),
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"plans: {', '.join(f'{a}={p.name}' for a, p in zip(agents, plans))}",
                 f"agent order: {' '.join(order)}"]
        if profile.feasible:
            lines.append(f"payoffs (delays): {format_cell(result.payoff_vector, profile.delays, True)}")
            lines.append(render_gantt(agents, profile.action_names()))
        else:
            lines.append("infeasible: no valid joint schedule")
            lines.append(f"payoffs: {format_cell(result.payoff_vector, (), False)} "
                         f"(sentinel {result.payoff_vector[0]:g})")
        s = result.tree_stats
        lines.append(f"tree: {s.nodes} nodes, {s.terminals} terminals, {s.pruned} pruned moves, "
                     f"{s.dead_ends} dead ends")
        text = "\n".join(lines) + "\n"
    _emit(text, args)
    return EXIT_OK if profile.feasible else EXIT_NO_EQUILIBRIUM


def cmd_export(args) -> int:
    problem = _load(args)
    game = _matrix(problem, args)
    text = export_nfg(game, title=f"{problem.name} seed={problem.seed}")
    dest = Path(args.output) if args.output else Path(args.problem).with_suffix(".nfg")
    try:
        dest.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {dest}: {exc.strerror or exc}") from None
    print(f"wrote {dest}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
