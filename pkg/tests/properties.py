"""Seeded property checks shared by the unit suite and the acceptance gate.

Each ``check_*`` function raises ``AssertionError`` on the first violation
and returns the number of instances it examined.
"""

import itertools
import random

import numpy as np

from oracles import (
    UNIVERSE,
    brute_force_pure_nash,
    brute_force_schedules,
    random_action,
    random_instance,
    validate_schedule,
)
from schedgame.equilibrium import NormalFormGame, pure_nash
from schedgame.nfg import export_nfg, parse_nfg
from schedgame.problem import Agent, ProblemSpec
from schedgame.report import report_from_json, report_to_json, solve_problem
from schedgame.schedule_game import build_tree, enumerate_terminals, solve_internal
from schedgame.strips import MutexActionsError, Plan, UtilityConfig, apply, is_applicable, joint_apply, mutex


def check_mutex_and_joint_apply(count=1000, seed=0):
    rng = random.Random(seed)
    for k in range(count):
        acts = [random_action(rng, f"x{j}") for j in range(rng.randint(2, 3))]
        # most states satisfy every precondition so joint application is exercised
        state = frozenset(x for x in UNIVERSE if rng.random() < 0.6)
        if k % 4:
            state |= frozenset().union(*(a.pre for a in acts))
        for a, b in itertools.combinations(acts, 2):
            assert mutex(a, b) == mutex(b, a), (k, a, b)
        if not all(is_applicable(state, a) for a in acts):
            continue
        if any(mutex(a, b) for a, b in itertools.combinations(acts, 2)):
            try:
                joint_apply(state, acts)
            except MutexActionsError:
                continue
            raise AssertionError(f"mutex set accepted: {acts}")
        results = {joint_apply(state, perm) for perm in itertools.permutations(acts)}
        assert len(results) == 1, (k, acts)
        # non-interfering actions also commute when applied one at a time
        for perm in itertools.permutations(acts):
            s = state
            for a in perm:
                s = apply(s, a)
            assert s == next(iter(results)), (k, perm)
    return count


def _check_values(game, node):
    if node.mover is None and not node.children:
        assert node.value == game.profile(node).utilities
        return
    backed = [(mv, child) for mv, child in node.children if child.value is not None]
    if not backed:
        assert node.value is None
        return
    i = node.mover
    best = max(child.value[i] for _, child in backed)
    assert node.value == node.children[node.chosen][1].value
    assert node.value[i] == best
    for _, child in node.children:
        _check_values(game, child)


def check_backward_induction(count=1000, seed=0):
    """Tree values, SPE membership among all terminals, validity of the SPE."""
    cfg = UtilityConfig()
    for k in range(count):
        plans, init = random_instance(seed * 100_000 + k)
        order = (0, 1) if k % 2 == 0 else (1, 0)
        game, root, _ = build_tree(plans, init, cfg, order=order)
        _check_values(game, root)
        terminals = enumerate_terminals(plans, init, cfg, order=order)
        result = solve_internal(plans, init, cfg, order=order)
        if not result.feasible:
            assert terminals == [] and root.value is None, k
            continue
        assert result.payoff_vector == root.value
        assert result.profile in terminals, k
        assert validate_schedule(plans, init, result.profile.schedules), k
        assert {t.schedules for t in terminals} == brute_force_schedules(plans, init), k
        for t in terminals:
            for i, plan in enumerate(plans):
                beta = len(plan.goals) * cfg.goal_reward - len(plan)
                assert t.utilities[i] == beta - cfg.delay_penalty * t.delays[i]
            # every terminal finishes within the sum of plan lengths
            assert t.makespan <= sum(len(p) for p in plans)
    return count


def random_matrix_game(rng, max_dim=5):
    shape = tuple(int(v) for v in rng.integers(1, max_dim + 1, size=2))
    # small integer range so ties and weak equilibria are common
    payoffs = rng.integers(-3, 4, size=shape + (2,)).astype(float)
    feasible = rng.random(shape) > 0.1
    payoffs[~feasible] = -1000.0
    return NormalFormGame(("A", "B"), (tuple(f"a{k}" for k in range(shape[0])),
                                       tuple(f"b{k}" for k in range(shape[1]))),
                          payoffs, np.zeros(shape + (2,), dtype=int), feasible)


def check_pure_nash_oracle(count=200, seed=0):
    rng = np.random.default_rng(seed)
    for k in range(count):
        game = random_matrix_game(rng)
        assert pure_nash(game) == brute_force_pure_nash(game.payoffs, game.feasible), k
    return count


def check_affine_invariance(count=200, seed=1):
    rng = np.random.default_rng(seed)
    for k in range(count):
        game = random_matrix_game(rng)
        scale = rng.uniform(0.25, 8.0, size=2)
        shift = rng.uniform(-50, 50, size=2)
        moved = NormalFormGame(game.agents, game.strategies, game.payoffs * scale + shift,
                               game.delays, game.feasible)
        assert pure_nash(moved) == pure_nash(game), k
    return count


def check_nfg_round_trip(count=200, seed=2):
    rng = np.random.default_rng(seed)
    for k in range(count):
        n = int(rng.integers(1, 4))
        shape = tuple(int(v) for v in rng.integers(1, 4, size=n))
        payoffs = [rng.normal(scale=10.0, size=shape) for _ in range(n)]
        if k % 2:
            payoffs = [np.round(p * 2) / 2 for p in payoffs]
        game = NormalFormGame.from_payoffs(payoffs)
        back = parse_nfg(export_nfg(game, f"g{k}"))
        assert back.shape == shape and back.players == game.agents
        assert np.array_equal(back.payoffs, game.payoffs), k
    return count


def random_problem(seed, n_plans=2):
    rng = random.Random(seed)
    agents = []
    for name in ("A", "B"):
        plans = []
        for j in range(n_plans):
            plan, _ = random_instance(rng.randrange(10**9), max_len=2)
            p = plan[0]
            plans.append(Plan(f"pi{name}{j + 1}", name, p.actions, p.goals))
        agents.append(Agent(name, tuple(plans)))
    init = frozenset(x for x in UNIVERSE if rng.random() < 0.6)
    return ProblemSpec(f"rand{seed}", init, tuple(agents), seed=seed % 5)


def check_report_round_trip(count=25, seed=3):
    for k in range(count):
        problem = random_problem(seed * 1000 + k)
        _, report = solve_problem(problem)
        assert report_from_json(report_to_json(report)) == report, k
    return count


def check_determinism(count=25, seed=4):
    for k in range(count):
        problem = random_problem(seed * 1000 + k)
        seeded = problem.with_overrides(tie_break="seeded")
        for spec in (problem, seeded):
            first = report_to_json(solve_problem(spec)[1])
            assert report_to_json(solve_problem(spec)[1]) == first, k
    return count


SUITES = {
    "mutex symmetry and joint_apply order-independence": check_mutex_and_joint_apply,
    "backward induction consistency, SPE membership and validity": check_backward_induction,
    "pure_nash against brute force": check_pure_nash_oracle,
    "affine invariance of pure_nash": check_affine_invariance,
    "nfg export round trip": check_nfg_round_trip,
    "report serialization round trip": check_report_round_trip,
    "determinism under a fixed seed": check_determinism,
}
