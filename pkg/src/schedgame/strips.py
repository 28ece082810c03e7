"""Propositional STRIPS world model.

Literals are plain strings and states are frozensets of them. Only positive
literals exist; negation happens through delete lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

Literal = str
State = frozenset


class InapplicableActionError(ValueError):
    """Raised when an action is applied in a state missing its preconditions."""


class MutexActionsError(ValueError):
    """Raised when mutually exclusive actions are applied in the same step."""


def _literals(items: Iterable[Literal]) -> frozenset:
    return frozenset(items)


@dataclass(frozen=True)
class Action:
    """A STRIPS operator ``<pre, add, del>``.

    ``delete`` holds the delete list (``del`` is a Python keyword).
    """

    name: str
    pre: frozenset = field(default_factory=frozenset)
    add: frozenset = field(default_factory=frozenset)
    delete: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "pre", _literals(self.pre))
        object.__setattr__(self, "add", _literals(self.add))
        object.__setattr__(self, "delete", _literals(self.delete))
        clash = self.add & self.delete
        if clash:
            raise ValueError(
                f"action {self.name!r} both adds and deletes {sorted(clash)}"
            )

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Plan:
    """A totally ordered action sequence owned by one agent.

    ``goals`` are declared labels; only their count enters the benefit.
    """

    name: str
    owner: str
    actions: tuple = ()
    goals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "goals", tuple(self.goals))
        if len(set(self.goals)) != len(self.goals):
            raise ValueError(f"plan {self.name!r} declares a goal twice")

    def __len__(self):
        return len(self.actions)


@dataclass(frozen=True)
class UtilityConfig:
    goal_reward: float = 10.0
    delay_penalty: float = 1.0
    # finite stand-in for minus infinity on infeasible plan profiles
    infeasible_payoff: float = -1000.0

    def __post_init__(self):
        if not self.goal_reward > 0:
            raise ValueError("goal_reward must be positive")
        if not self.delay_penalty >= 0:
            raise ValueError("delay_penalty must be non-negative")


def is_applicable(state: State, action: Action) -> bool:
    return action.pre <= state


def apply(state: State, action: Action) -> State:
    """Return ``(state - del) | add``; the input state is left untouched."""
    if not is_applicable(state, action):
        missing = sorted(action.pre - state)
        raise InapplicableActionError(
            f"{action.name} is not applicable, missing {missing}"
        )
    return (frozenset(state) - action.delete) | action.add


def mutex(a: Action, b: Action) -> bool:
    """Interference or inconsistent effects between two actions.

    One action deleting something the other needs or asserts makes the pair
    mutually exclusive. Competing needs do not apply: there are no negative
    preconditions.
    """
    return bool(a.delete & (b.pre | b.add)) or bool(b.delete & (a.pre | a.add))


def joint_apply(state: State, actions: Iterable[Action]) -> State:
    """Apply a set of simultaneous, pairwise non-mutex actions in one step.

    Preconditions are checked against ``state`` (the start of the step).
    """
    actions = list(actions)
    for i, a in enumerate(actions):
        if not is_applicable(state, a):
            missing = sorted(a.pre - state)
            raise InapplicableActionError(
                f"{a.name} is not applicable, missing {missing}"
            )
        for b in actions[i + 1:]:
            if mutex(a, b):
                raise MutexActionsError(f"{a.name} and {b.name} are mutex")
    deleted = frozenset().union(*(a.delete for a in actions))
    added = frozenset().union(*(a.add for a in actions))
    return (frozenset(state) - deleted) | added


def benefit(plan: Plan, cfg: UtilityConfig) -> float:
    """Goal reward minus the earliest-execution makespan.

    The makespan of an ``m``-action plan executed without gaps is ``m``.
    """
    return len(plan.goals) * cfg.goal_reward - len(plan.actions)
