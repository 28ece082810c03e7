"""Plain-text tables: payoff matrices, schedule charts and full reports."""

from __future__ import annotations

import itertools

from .equilibrium import NormalFormGame, pure_nash
from .schedule_game import ScheduleProfile

EMPTY_GLYPH = "·"
NE_MARK = "*"


def format_value(x: float) -> str:
    """Bare integer when integral, one decimal place otherwise."""
    x = float(x)
    if x.is_integer():
        return str(int(x))
    return f"{x:.1f}"


def format_cell(payoffs, delays, feasible: bool) -> str:
    if not feasible:
        return ",".join("-inf" for _ in payoffs)
    return f"{','.join(format_value(v) for v in payoffs)} ({','.join(str(int(d)) for d in delays)})"


def _table(rows):
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = []
    for r in rows:
        lines.append(" | ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def _grid(agents, strategies, text_of):
    if len(agents) == 2:
        header = [f"{agents[0]} \\ {agents[1]}"] + list(strategies[1])
        rows = [header]
        for i, row_name in enumerate(strategies[0]):
            rows.append([row_name] + [text_of((i, j)) for j in range(len(strategies[1]))])
        return _table(rows)
    if len(agents) == 1:
        rows = [[agents[0], "payoff"]]
        rows += [[name, text_of((k,))] for k, name in enumerate(strategies[0])]
        return _table(rows)
    rows = [list(agents) + ["payoffs (delays)"]]
    for cell in itertools.product(*(range(len(s)) for s in strategies)):
        rows.append([strategies[i][k] for i, k in enumerate(cell)] + [text_of(cell)])
    return _table(rows)


def render_matrix(game: NormalFormGame, equilibria=None) -> str:
    """Payoff grid with ``uA,uB (dA,dB)`` per cell; equilibria marked with ``*``.

    Two-agent games are laid out with the first agent's plans as rows. Other
    agent counts fall back to one row per plan profile.
    """
    marked = set(map(tuple, pure_nash(game) if equilibria is None else equilibria))

    def text_of(cell):
        text = format_cell(game.payoffs[cell], game.delays[cell], bool(game.feasible[cell]))
        return f"{text} {NE_MARK}" if cell in marked else text

    return _grid(game.agents, game.strategies, text_of)


def render_gantt(agents, rows) -> str:
    """One row per agent, one column per time step; ``None`` is an empty move."""
    steps = max((len(r) for r in rows), default=0)
    padded = [[EMPTY_GLYPH if name is None else name for name in r] + [EMPTY_GLYPH] * (steps - len(r))
              for r in rows]
    header = ["t"] + [str(t) for t in range(steps)]
    table = [header] + [[str(agent)] + r for agent, r in zip(agents, padded)]
    widths = [max(len(line[c]) for line in table) for c in range(len(header))]
    return "\n".join(" ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in table)


def render_schedule(profile: ScheduleProfile, agents=None) -> str:
    if not profile.feasible:
        raise ValueError("an infeasible profile has no schedule to draw")
    agents = agents or [p.owner for p in profile.plans]
    return render_gantt(agents, profile.action_names())


def render_report(report) -> str:
    """Human-readable form of a :class:`~schedgame.report.SolutionReport`."""
    cfg = report.config
    out = [
        f"problem: {report.problem}",
        f"config: goal_reward={format_value(cfg.goal_reward)} delay_penalty={format_value(cfg.delay_penalty)} "
        f"infeasible_payoff={format_value(cfg.infeasible_payoff)} seed={cfg.seed} "
        f"tie_break={cfg.tie_break} agent_order={cfg.agent_order}",
        "",
    ]
    by_plans = {c.plans: c for c in report.cells}
    ne = {e.plans for e in report.pure_equilibria}

    def text_of(cell):
        plans = tuple(report.strategies[i][k] for i, k in enumerate(cell))
        c = by_plans[plans]
        text = format_cell(c.payoffs, c.delays, c.feasible)
        return f"{text} {NE_MARK}" if plans in ne else text

    out.append(_grid(report.agents, report.strategies, text_of))
    out.append("")
    out.append(f"pure Nash equilibria: {len(report.pure_equilibria)}")
    for e in report.pure_equilibria:
        tags = []
        if e.pareto_optimal:
            tags.append("pareto-optimal")
        if e.max_welfare:
            tags.append("max-welfare")
        out.append(
            f"  ({', '.join(e.plans)}) payoffs {format_cell(e.payoffs, e.delays, True)} "
            f"welfare {format_value(e.welfare)}" + (f" [{', '.join(tags)}]" if tags else "")
        )
        out.extend("    " + line for line in render_gantt(report.agents, e.schedule).splitlines())
    if report.mixed_equilibria:
        out.append(f"mixed Nash equilibria: {len(report.mixed_equilibria)}")
        for m in report.mixed_equilibria:
            parts = []
            for agent, strategies, probs in zip(report.agents, report.strategies, m.probabilities):
                parts.append(f"{agent}: " + " ".join(
                    f"{s}={p:.6g}" for s, p in zip(strategies, probs) if p > 0))
            payoff = ",".join(f"{v:.6g}" for v in m.payoffs)
            out.append(f"  {'; '.join(parts)} expected payoffs {payoff}")
    for sup in report.degenerate_supports:
        out.append(f"degenerate support (continuum of equilibria): "
                   + " x ".join("{" + ", ".join(s) + "}" for s in sup))
    out.append("pareto front: " + "; ".join(f"({', '.join(c)})" for c in report.pareto_front))
    out.append("max welfare: " + "; ".join(f"({', '.join(c)})" for c in report.max_welfare))
    return "\n".join(out) + "\n"
