"""Joint plan schedule game.

Simultaneous plan execution is unrolled into a perfect-information game tree:
within a time step the agents move one after another (in a fixed agent order),
each either playing its next plan action or the empty move. A step is
committed once every agent has moved, and the planning state advances by the
joint application of the step's real actions. Backward induction over this
tree yields a subgame perfect joint schedule.

Moves are encoded as the index of the action in the owner's plan, or
``EMPTY`` (``None``) for the empty move.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .strips import Plan, UtilityConfig, benefit, is_applicable, joint_apply, mutex

EMPTY = None

ACTION_FIRST = "action-first"
SEEDED = "seeded"
DECLARED = "declared"
TIE_BREAKS = (ACTION_FIRST, SEEDED)
ORDER_MODES = (SEEDED, DECLARED)


class HorizonExceededError(RuntimeError):
    """A step count beyond the sum of plan lengths was reached."""


class NodeBudgetExceeded(RuntimeError):
    pass


@dataclass
class GameNode:
    """A node of the schedule game tree.

    ``state`` is the planning state at the start of step ``time``; moves in
    ``pending`` were committed earlier in the same step by the agents preceding
    ``mover`` in the agent order. ``schedules`` holds each agent's moves for
    the completed steps.
    """

    state: frozenset
    time: int
    mover: Optional[int]
    pending: tuple
    progress: tuple
    schedules: tuple
    children: list = field(default_factory=list)
    value: Optional[tuple] = None
    chosen: Optional[int] = None


@dataclass(frozen=True)
class ScheduleProfile:
    """Timed schedules of one plan profile with their delays and utilities.

    ``finish_times[i]`` is the step right after agent ``i``'s last real
    action (0 for an empty plan). Infeasible profiles carry no schedules and
    every utility equals the infeasible payoff.
    """

    plans: tuple
    schedules: tuple
    finish_times: tuple
    delays: tuple
    utilities: tuple
    feasible: bool
    final_state: frozenset = frozenset()

    @property
    def makespan(self) -> int:
        return len(self.schedules[0]) if self.schedules else 0

    def action_names(self) -> tuple:
        """Per agent, the action name (or ``None``) scheduled at each step."""
        return tuple(
            tuple(None if mv is EMPTY else plan.actions[mv].name for mv in sched)
            for plan, sched in zip(self.plans, self.schedules)
        )


@dataclass
class TreeStats:
    nodes: int = 0
    terminals: int = 0
    pruned: int = 0
    dead_ends: int = 0


@dataclass(frozen=True)
class SolveResult:
    profile: ScheduleProfile
    payoff_vector: tuple
    agent_order: tuple
    tree_stats: TreeStats

    @property
    def feasible(self) -> bool:
        return self.profile.feasible


def delay(schedule: Sequence, m: int) -> int:
    """Steps lost relative to the gap-free execution of an ``m``-action plan.

    Empty moves after the last real action do not count.
    """
    real = [t for t, mv in enumerate(schedule) if mv is not EMPTY]
    if len(real) != m:
        raise ValueError(f"schedule holds {len(real)} real actions, expected {m}")
    if m == 0:
        return 0
    return real[-1] + 1 - m


def utility(beta: float, delay_steps: int, cfg: UtilityConfig) -> float:
    if delay_steps < 0:
        raise ValueError("delay cannot be negative")
    return beta - cfg.delay_penalty * delay_steps


def _profile_key(plans: Sequence[Plan]) -> str:
    return "|".join(f"{p.owner}/{p.name}" for p in plans)


def choose_order(plans: Sequence[Plan], seed: int = 0, mode: str = SEEDED) -> tuple:
    """Agent order for tree generation.

    In seeded mode the order is a shuffle keyed on the seed and the plan
    profile, so each cell of the general game gets its own reproducible
    order independent of evaluation sequence.
    """
    if mode not in ORDER_MODES:
        raise ValueError(f"unknown agent order mode {mode!r}")
    order = list(range(len(plans)))
    if mode == SEEDED:
        random.Random(f"order:{seed}:{_profile_key(plans)}").shuffle(order)
    return tuple(order)


class ScheduleGame:
    """Game tree generator for one plan profile."""

    def __init__(self, plans, init, cfg: UtilityConfig = UtilityConfig(), order=None):
        self.plans = tuple(plans)
        self.n = len(self.plans)
        if self.n == 0:
            raise ValueError("a plan profile needs at least one agent")
        self.init = frozenset(init)
        self.cfg = cfg
        self.order = tuple(range(self.n)) if order is None else tuple(order)
        if sorted(self.order) != list(range(self.n)):
            raise ValueError(f"agent order {self.order} is not a permutation")
        self.lengths = tuple(len(p) for p in self.plans)
        self.horizon = sum(self.lengths)
        self.benefits = tuple(benefit(p, cfg) for p in self.plans)

    def root(self) -> GameNode:
        node = GameNode(
            state=self.init,
            time=0,
            mover=self.order[0],
            pending=(),
            progress=(0,) * self.n,
            schedules=((),) * self.n,
        )
        if self.is_terminal(node):
            node.mover = None
        return node

    def is_terminal(self, node: GameNode) -> bool:
        return not node.pending and node.progress == self.lengths

    def _pending_actions(self, node: GameNode):
        for pos, mv in enumerate(node.pending):
            if mv is not EMPTY:
                yield self.plans[self.order[pos]].actions[mv]

    def legal_moves(self, node: GameNode) -> tuple:
        """Moves available to the agent at ``node``, real action first.

        The next plan action must hold in the start-of-step state and must not
        be mutex with real moves already committed this step. The empty move
        is refused to the last mover of a step in which nobody acted.
        """
        i = node.mover
        moves = []
        k = node.progress[i]
        if k < self.lengths[i]:
            action = self.plans[i].actions[k]
            if is_applicable(node.state, action) and not any(
                mutex(action, other) for other in self._pending_actions(node)
            ):
                moves.append(k)
        last = len(node.pending) == self.n - 1
        if not (last and all(mv is EMPTY for mv in node.pending)):
            moves.append(EMPTY)
        return tuple(moves)

    def play(self, node: GameNode, move) -> GameNode:
        i = node.mover
        progress = node.progress
        if move is not EMPTY:
            if move != progress[i]:
                raise ValueError(f"agent {i} must play action {progress[i]}, got {move}")
            progress = progress[:i] + (progress[i] + 1,) + progress[i + 1:]
        pending = node.pending + (move,)
        child = GameNode(
            state=node.state,
            time=node.time,
            mover=None,
            pending=pending,
            progress=progress,
            schedules=node.schedules,
        )
        if len(pending) == self.n:
            return self.advance_step(child)
        child.mover = self.order[len(pending)]
        return child

    def advance_step(self, node: GameNode) -> GameNode:
        """Commit a complete step and move to the start of the next one."""
        if len(node.pending) != self.n:
            raise ValueError("not every agent has moved in this step")
        state = joint_apply(node.state, list(self._pending_actions(node)))
        by_agent = [EMPTY] * self.n
        for pos, mv in enumerate(node.pending):
            by_agent[self.order[pos]] = mv
        schedules = tuple(s + (mv,) for s, mv in zip(node.schedules, by_agent))
        time = node.time + 1
        if time > self.horizon:
            raise HorizonExceededError(f"step {time} exceeds horizon {self.horizon}")
        nxt = GameNode(
            state=state,
            time=time,
            mover=self.order[0],
            pending=(),
            progress=node.progress,
            schedules=schedules,
        )
        if self.is_terminal(nxt):
            nxt.mover = None
        return nxt

    def profile(self, node: GameNode) -> ScheduleProfile:
        """Schedule profile of a terminal node."""
        if not self.is_terminal(node):
            raise ValueError("schedule profiles exist only at terminal nodes")
        delays, finish, utils = [], [], []
        for i, sched in enumerate(node.schedules):
            d = delay(sched, self.lengths[i])
            delays.append(d)
            finish.append(self.lengths[i] + d)
            utils.append(utility(self.benefits[i], d, self.cfg))
        return ScheduleProfile(
            plans=self.plans,
            schedules=node.schedules,
            finish_times=tuple(finish),
            delays=tuple(delays),
            utilities=tuple(utils),
            feasible=True,
            final_state=node.state,
        )

    def infeasible_profile(self) -> ScheduleProfile:
        return ScheduleProfile(
            plans=self.plans,
            schedules=(),
            finish_times=(),
            delays=(),
            utilities=(self.cfg.infeasible_payoff,) * self.n,
            feasible=False,
        )

    def backward_induction(self, node, stats, rng=None, keep_tree=False):
        """Back up the subgame perfect outcome below ``node``.

        Returns the chosen terminal node and its payoff vector, or ``None`` if
        the subtree holds no valid schedule profile. Ties go to the earlier
        child in depth-first order (real action before the empty move) unless
        ``rng`` is given, in which case one of the tied children is drawn.
        With ``keep_tree`` the explored children, backed-up values and choices
        are stored on the nodes.
        """
        stats.nodes += 1
        if self.is_terminal(node):
            stats.terminals += 1
            payoff = self.profile(node).utilities
            node.value = payoff
            return node, payoff
        moves = self.legal_moves(node)
        stats.pruned += (2 if node.progress[node.mover] < self.lengths[node.mover] else 1) - len(moves)
        i = node.mover
        best = []
        best_value = None
        for pos, mv in enumerate(moves):
            child = self.play(node, mv)
            outcome = self.backward_induction(child, stats, rng, keep_tree)
            if keep_tree:
                node.children.append((mv, child))
            if outcome is None:
                continue
            v = outcome[1][i]
            if best_value is None or v > best_value:
                best_value, best = v, [(pos, outcome)]
            elif v == best_value:
                best.append((pos, outcome))
        if not best:
            stats.dead_ends += 1
            return None
        pos, outcome = best[0] if rng is None or len(best) == 1 else rng.choice(best)
        if keep_tree:
            node.value = outcome[1]
            node.chosen = pos
        return outcome


def build_tree(plans, init, cfg: UtilityConfig = UtilityConfig(), order=None,
               tie_break: str = ACTION_FIRST, seed: int = 0):
    """Fully expanded game tree annotated by backward induction.

    Meant for inspection and tests; :func:`solve_internal` does not keep the
    tree in memory.
    """
    game = ScheduleGame(plans, init, cfg, order)
    root = game.root()
    stats = TreeStats()
    game.backward_induction(root, stats, _tie_rng(plans, seed, tie_break), keep_tree=True)
    return game, root, stats


def _tie_rng(plans, seed, tie_break):
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"unknown tie-break mode {tie_break!r}")
    if tie_break == SEEDED:
        return random.Random(f"tie:{seed}:{_profile_key(plans)}")
    return None


def solve_internal(
    plans: Sequence[Plan],
    init,
    cfg: UtilityConfig = UtilityConfig(),
    order_seed: int = 0,
    *,
    order_mode: str = SEEDED,
    order: Optional[Sequence[int]] = None,
    tie_break: str = ACTION_FIRST,
    check_goals: bool = False,
) -> SolveResult:
    """Subgame perfect joint schedule of one plan profile.

    Args:
        plans: One plan per agent, in agent declaration order.
        init: Initial planning state.
        cfg: Utility parameters.
        order_seed: Seed for the agent order and for seeded tie-breaking.
        order_mode: ``"seeded"`` shuffles the agent order, ``"declared"``
            keeps declaration order. Ignored when ``order`` is given.
        order: Explicit agent order (a permutation of agent indices).
        tie_break: ``"action-first"`` or ``"seeded"``.
        check_goals: Warn when a declared goal literal does not hold in the
            final state of the chosen schedule.

    Returns:
        A :class:`SolveResult`. When no valid joint schedule exists the
        profile is infeasible and every payoff is ``cfg.infeasible_payoff``.
    """
    plans = tuple(plans)
    if order is None:
        order = choose_order(plans, order_seed, order_mode)
    game = ScheduleGame(plans, init, cfg, order)
    stats = TreeStats()
    outcome = game.backward_induction(game.root(), stats, _tie_rng(plans, order_seed, tie_break))
    if outcome is None:
        profile = game.infeasible_profile()
    else:
        profile = game.profile(outcome[0])
        if check_goals:
            _check_goals(profile)
    return SolveResult(
        profile=profile,
        payoff_vector=profile.utilities,
        agent_order=game.order,
        tree_stats=stats,
    )


def _check_goals(profile: ScheduleProfile):
    for plan in profile.plans:
        missing = [g for g in plan.goals if g not in profile.final_state]
        if missing:
            warnings.warn(
                f"plan {plan.name} of {plan.owner}: declared goals {missing} "
                "do not hold in the final state",
                stacklevel=3,
            )


def enumerate_terminals(
    plans: Sequence[Plan],
    init,
    cfg: UtilityConfig = UtilityConfig(),
    *,
    order: Optional[Sequence[int]] = None,
    node_budget: int = 1_000_000,
) -> list:
    """Every valid schedule profile of a plan profile, in depth-first order."""
    game = ScheduleGame(plans, init, cfg, order)
    out = []
    visited = 0
    stack = [game.root()]
    while stack:
        node = stack.pop()
        visited += 1
        if visited > node_budget:
            raise NodeBudgetExceeded(f"more than {node_budget} nodes")
        if game.is_terminal(node):
            out.append(game.profile(node))
            continue
        # reversed so the real action is explored first
        for mv in reversed(game.legal_moves(node)):
            stack.append(game.play(node, mv))
    return out
