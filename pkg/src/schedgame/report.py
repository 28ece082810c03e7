"""Solution reports: what a solve produced, as dataclasses with a JSON form."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .equilibrium import (
    NormalFormGame,
    build_matrix,
    max_welfare,
    mixed_nash_2p,
    pareto_front,
    pure_nash,
    welfare,
)
from .problem import ProblemSpec


@dataclass(frozen=True)
class ConfigEcho:
    goal_reward: float
    delay_penalty: float
    infeasible_payoff: float
    seed: int
    tie_break: str
    agent_order: str


@dataclass(frozen=True)
class CellReport:
    plans: tuple
    feasible: bool
    payoffs: tuple
    delays: tuple
    agent_order: tuple
    schedule: tuple


@dataclass(frozen=True)
class PureEquilibrium:
    plans: tuple
    payoffs: tuple
    delays: tuple
    pareto_optimal: bool
    welfare: float
    max_welfare: bool
    schedule: tuple


@dataclass(frozen=True)
class MixedEquilibrium:
    probabilities: tuple
    support: tuple
    payoffs: tuple


@dataclass(frozen=True)
class SolutionReport:
    problem: str
    config: ConfigEcho
    agents: tuple
    strategies: tuple
    cells: tuple
    pure_equilibria: tuple
    mixed_equilibria: tuple
    degenerate_supports: tuple
    pareto_front: tuple
    max_welfare: tuple

    @property
    def equilibrium_count(self) -> int:
        return len(self.pure_equilibria) + len(self.mixed_equilibria)

    def cell(self, plans) -> CellReport:
        plans = tuple(plans)
        for c in self.cells:
            if c.plans == plans:
                return c
        raise KeyError(plans)


def config_echo(problem: ProblemSpec) -> ConfigEcho:
    u = problem.utility
    return ConfigEcho(u.goal_reward, u.delay_penalty, u.infeasible_payoff,
                      problem.seed, problem.tie_break, problem.agent_order)


def _schedule_names(result):
    if result is None or not result.feasible:
        return ()
    return result.profile.action_names()


def build_report(problem: ProblemSpec, game: NormalFormGame, mixed=None) -> SolutionReport:
    """Assemble the report of a solved game.

    ``mixed`` is the :func:`mixed_nash_2p` result; it is computed here for
    two-agent games when not supplied.
    """
    if mixed is None and game.n == 2:
        mixed = mixed_nash_2p(game)
    front = pareto_front(game)
    best = max_welfare(game)
    cells = []
    for cell in game.cells():
        result = game.results.get(cell)
        feasible = bool(game.feasible[cell])
        cells.append(CellReport(
            plans=game.cell_names(cell),
            feasible=feasible,
            payoffs=tuple(float(v) for v in game.payoffs[cell]),
            delays=tuple(int(d) for d in game.delays[cell]) if feasible else (),
            agent_order=tuple(game.agents[i] for i in result.agent_order) if result else (),
            schedule=_schedule_names(result),
        ))
    pure = tuple(
        PureEquilibrium(
            plans=game.cell_names(cell),
            payoffs=tuple(float(v) for v in game.payoffs[cell]),
            delays=tuple(int(d) for d in game.delays[cell]),
            pareto_optimal=cell in front,
            welfare=welfare(game, cell),
            max_welfare=cell in best,
            schedule=_schedule_names(game.results.get(cell)),
        )
        for cell in pure_nash(game)
    )
    mixed_eq, degenerate = (), ()
    if mixed is not None:
        mixed_eq = tuple(
            MixedEquilibrium(
                probabilities=m.probabilities,
                support=tuple(tuple(game.strategies[i][k] for k in s) for i, s in enumerate(m.support)),
                payoffs=tuple(m.payoffs),
            )
            for m in mixed.equilibria if not m.is_pure
        )
        degenerate = tuple(
            tuple(tuple(game.strategies[i][k] for k in s) for i, s in enumerate(d.support))
            for d in mixed.degenerate
        )
    return SolutionReport(
        problem=problem.name,
        config=config_echo(problem),
        agents=game.agents,
        strategies=game.strategies,
        cells=tuple(cells),
        pure_equilibria=pure,
        mixed_equilibria=mixed_eq,
        degenerate_supports=degenerate,
        pareto_front=tuple(game.cell_names(c) for c in front),
        max_welfare=tuple(game.cell_names(c) for c in best),
    )


def solve_problem(problem: ProblemSpec, *, workers: int = 1):
    """Build the general game of ``problem`` and report on it."""
    game = build_matrix(problem, workers=workers)
    return game, build_report(problem, game)


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


def report_to_json(report: SolutionReport) -> str:
    return json.dumps(asdict(report), indent=2) + "\n"


def report_from_json(text: str) -> SolutionReport:
    raw = json.loads(text)

    def build(cls, data):
        return cls(**{k: _tuplify(v) for k, v in data.items()})

    return SolutionReport(
        problem=raw["problem"],
        config=ConfigEcho(**raw["config"]),
        agents=_tuplify(raw["agents"]),
        strategies=_tuplify(raw["strategies"]),
        cells=tuple(build(CellReport, c) for c in raw["cells"]),
        pure_equilibria=tuple(build(PureEquilibrium, e) for e in raw["pure_equilibria"]),
        mixed_equilibria=tuple(build(MixedEquilibrium, e) for e in raw["mixed_equilibria"]),
        degenerate_supports=_tuplify(raw["degenerate_supports"]),
        pareto_front=_tuplify(raw["pareto_front"]),
        max_welfare=_tuplify(raw["max_welfare"]),
    )
