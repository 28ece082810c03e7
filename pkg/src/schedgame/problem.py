"""In-memory problem description shared by the solver, the IO layer and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .schedule_game import ACTION_FIRST, ORDER_MODES, SEEDED, TIE_BREAKS
from .strips import UtilityConfig


@dataclass(frozen=True)
class Agent:
    name: str
    plans: tuple = ()

    def plan(self, name: str):
        for p in self.plans:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class ProblemSpec:
    """A multi-agent problem: initial state, agents with alternative plans, settings."""

    name: str
    init: frozenset
    agents: tuple
    utility: UtilityConfig = field(default_factory=UtilityConfig)
    seed: int = 0
    tie_break: str = ACTION_FIRST
    agent_order: str = SEEDED

    def __post_init__(self):
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie-break mode {self.tie_break!r}")
        if self.agent_order not in ORDER_MODES:
            raise ValueError(f"unknown agent order mode {self.agent_order!r}")

    @property
    def agent_names(self) -> tuple:
        return tuple(a.name for a in self.agents)

    def agent(self, name: str) -> Agent:
        for a in self.agents:
            if a.name == name:
                return a
        raise KeyError(name)

    def with_overrides(self, *, goal_reward=None, delay_penalty=None,
                       infeasible_payoff=None, seed=None, tie_break=None,
                       agent_order=None) -> "ProblemSpec":
        """Copy with every non-``None`` setting replaced."""
        utility = self.utility
        changes = {
            k: v for k, v in dict(goal_reward=goal_reward, delay_penalty=delay_penalty,
                                  infeasible_payoff=infeasible_payoff).items()
            if v is not None
        }
        if changes:
            utility = replace(utility, **changes)
        rest = {
            k: v for k, v in dict(seed=seed, tie_break=tie_break,
                                  agent_order=agent_order).items()
            if v is not None
        }
        return replace(self, utility=utility, **rest)
