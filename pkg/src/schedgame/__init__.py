"""Non-cooperative plan scheduling games.

Self-interested agents each pick one of their alternative STRIPS plans. Every
plan profile is scheduled by a perfect-information game solved with backward
induction; the resulting utilities form a normal-form game whose Nash
equilibria predict which plans (and schedules) the agents settle on.
"""

from .equilibrium import (
    MixedProfile,
    NormalFormGame,
    build_matrix,
    max_welfare,
    mixed_nash_2p,
    pareto_front,
    pure_nash,
    verify_equilibrium,
)
from .problem import Agent, ProblemSpec
from .problem_io import ProblemFormatError, load_problem, parse_problem, serialize_problem
from .schedule_game import EMPTY, ScheduleProfile, SolveResult, enumerate_terminals, solve_internal
from .strips import Action, Plan, UtilityConfig, apply, benefit, is_applicable, joint_apply, mutex

__all__ = [
    "Action", "Agent", "EMPTY", "MixedProfile", "NormalFormGame", "Plan", "ProblemFormatError",
    "ProblemSpec", "ScheduleProfile", "SolveResult", "UtilityConfig", "apply", "benefit",
    "build_matrix", "enumerate_terminals", "is_applicable", "joint_apply", "load_problem",
    "max_welfare", "mixed_nash_2p", "mutex", "parse_problem", "pareto_front", "pure_nash",
    "serialize_problem", "solve_internal", "verify_equilibrium",
]
