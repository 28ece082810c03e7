"""The general game: normal-form payoff tensor over plan profiles and its equilibria."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog

from .problem import ProblemSpec
from .schedule_game import solve_internal
from .strips import UtilityConfig

TOLERANCE = 1e-9


class MatrixBuildError(RuntimeError):
    """One or more cells failed; the partially filled game is attached."""

    def __init__(self, game, errors):
        self.game = game
        self.errors = errors
        lines = ", ".join(f"{cell}: {err}" for cell, err in sorted(errors.items()))
        super().__init__(f"{len(errors)} cell(s) failed: {lines}")


@dataclass
class NormalFormGame:
    """Payoffs, delays and feasibility for every plan profile.

    ``payoffs`` and ``delays`` have shape ``(*strategy_counts, n_agents)``;
    ``feasible`` has shape ``strategy_counts``. Infeasible cells hold the
    sentinel payoff and zero delays.
    """

    agents: tuple
    strategies: tuple
    payoffs: np.ndarray
    delays: np.ndarray
    feasible: np.ndarray
    results: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        shape = tuple(len(s) for s in self.strategies)
        if len(self.agents) != len(self.strategies):
            raise ValueError("one strategy list per agent is required")
        if self.payoffs.shape != shape + (len(self.agents),):
            raise ValueError(f"payoff tensor shape {self.payoffs.shape} does not match {shape}")
        if self.feasible.shape != shape or self.delays.shape != self.payoffs.shape:
            raise ValueError("delay/feasibility tensors do not match the payoff tensor")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def shape(self) -> tuple:
        return self.feasible.shape

    def cells(self):
        return itertools.product(*(range(k) for k in self.shape))

    def cell_names(self, cell) -> tuple:
        return tuple(self.strategies[i][k] for i, k in enumerate(cell))

    @classmethod
    def from_payoffs(cls, payoffs, feasible=None, delays=None, agents=None, strategies=None):
        """Build a game from one payoff array per agent (all of equal shape)."""
        per_agent = [np.asarray(p, dtype=float) for p in payoffs]
        shape = per_agent[0].shape
        tensor = np.stack(per_agent, axis=-1)
        n = len(per_agent)
        if agents is None:
            agents = tuple(chr(ord("A") + i) for i in range(n))
        if strategies is None:
            strategies = tuple(
                tuple(f"{agents[i]}{k + 1}" for k in range(shape[i])) for i in range(n)
            )
        if feasible is None:
            feasible = np.ones(shape, dtype=bool)
        if delays is None:
            delays = np.zeros(tensor.shape, dtype=int)
        return cls(
            agents=tuple(agents),
            strategies=tuple(tuple(s) for s in strategies),
            payoffs=tensor,
            delays=np.asarray(delays, dtype=int),
            feasible=np.asarray(feasible, dtype=bool),
        )


def _solve_cell(args):
    plans, init, cfg, seed, order_mode, tie_break = args
    try:
        return solve_internal(plans, init, cfg, seed, order_mode=order_mode, tie_break=tie_break), None
    except Exception as exc:  # reported per cell, remaining cells still run
        return None, f"{type(exc).__name__}: {exc}"


def build_matrix(problem: ProblemSpec, cfg: Optional[UtilityConfig] = None,
                 seed: Optional[int] = None, *, workers: int = 1) -> NormalFormGame:
    """Run the internal game on every plan profile.

    Raises:
        ValueError: an agent has no plan.
        MatrixBuildError: some cells raised; all other cells are still filled.
    """
    cfg = problem.utility if cfg is None else cfg
    seed = problem.seed if seed is None else seed
    for agent in problem.agents:
        if not agent.plans:
            raise ValueError(f"agent {agent.name!r} has no plan")
    strategies = tuple(tuple(p.name for p in a.plans) for a in problem.agents)
    shape = tuple(len(s) for s in strategies)
    n = len(problem.agents)
    cells = list(itertools.product(*(range(k) for k in shape)))
    jobs = [
        (tuple(problem.agents[i].plans[k] for i, k in enumerate(cell)),
         problem.init, cfg, seed, problem.agent_order, problem.tie_break)
        for cell in cells
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_solve_cell, jobs))
    else:
        outcomes = [_solve_cell(job) for job in jobs]

    payoffs = np.full(shape + (n,), cfg.infeasible_payoff, dtype=float)
    delays = np.zeros(shape + (n,), dtype=int)
    feasible = np.zeros(shape, dtype=bool)
    results, errors = {}, {}
    for cell, (result, err) in zip(cells, outcomes):
        if err is not None:
            errors[cell] = err
            continue
        results[cell] = result
        payoffs[cell] = result.payoff_vector
        if result.feasible:
            feasible[cell] = True
            delays[cell] = result.profile.delays
    game = NormalFormGame(
        agents=problem.agent_names,
        strategies=strategies,
        payoffs=payoffs,
        delays=delays,
        feasible=feasible,
        results=results,
    )
    if errors:
        raise MatrixBuildError(game, errors)
    return game


def _deviation_line(cell, i):
    return cell[:i] + (slice(None),) + cell[i + 1:] + (i,)


def pure_nash(game: NormalFormGame) -> list:
    """All feasible cells where no agent gains by a unilateral switch of plan."""
    found = []
    for cell in game.cells():
        if not game.feasible[cell]:
            continue
        if all(game.payoffs[cell + (i,)] >= game.payoffs[_deviation_line(cell, i)].max()
               for i in range(game.n)):
            found.append(cell)
    return found


@dataclass(frozen=True)
class MixedProfile:
    """One probability vector per agent, with the expected payoffs it yields."""

    probabilities: tuple
    payoffs: tuple = ()
    support: tuple = ()

    def __post_init__(self):
        probs = tuple(tuple(float(x) for x in p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if not self.support:
            support = tuple(tuple(k for k, x in enumerate(p) if x > TOLERANCE) for p in probs)
            object.__setattr__(self, "support", support)
        for p in probs:
            if min(p) < 0 or abs(sum(p) - 1.0) > TOLERANCE:
                raise ValueError(f"{p} is not a probability vector")

    @property
    def is_pure(self) -> bool:
        return all(len(s) == 1 for s in self.support)


class DegenerateSupport(NamedTuple):
    """A support pair whose equilibria form a continuum rather than a point."""

    support: tuple


class MixedNashResult(NamedTuple):
    equilibria: list
    degenerate: list


def _indifference_system(payoff, support, rival_support):
    """Matrix for mixing over ``support`` so that the rival is indifferent.

    ``payoff[s, r]`` is the rival's payoff when we play ``s`` and it plays ``r``.
    Unknowns are the ``k`` probabilities and the rival's common value.
    """
    k = len(support)
    sub = payoff[np.ix_(support, rival_support)]
    m = np.zeros((k + 1, k + 1))
    m[:k, :k] = sub.T
    m[:k, k] = -1.0
    m[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    return m, rhs


def _full_support_feasible(payoff, support, rival_support, tol):
    """Whether some mix with every ``support`` entry positive makes
    ``rival_support`` exactly the rival's best responses. Used when the
    indifference system is singular."""
    k = len(support)
    n_rival = payoff.shape[1]
    off = [r for r in range(n_rival) if r not in rival_support]
    # variables: x_1..x_k, v, eps
    c = np.zeros(k + 2)
    c[-1] = -1.0
    a_eq = np.zeros((len(rival_support) + 1, k + 2))
    for row, r in enumerate(rival_support):
        a_eq[row, :k] = payoff[support, r]
        a_eq[row, k] = -1.0
    a_eq[-1, :k] = 1.0
    b_eq = np.zeros(len(rival_support) + 1)
    b_eq[-1] = 1.0
    a_ub = np.zeros((len(off) + k, k + 2))
    for row, r in enumerate(off):
        a_ub[row, :k] = payoff[support, r]
        a_ub[row, k] = -1.0
    for j in range(k):
        a_ub[len(off) + j, j] = -1.0
        a_ub[len(off) + j, -1] = 1.0
    bounds = [(0, None)] * k + [(None, None), (None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(off) + k), A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    return res.status == 0 and -res.fun > tol


def _clamp(vec, tol):
    vec = np.where(vec < tol, 0.0, vec)
    return vec / vec.sum()


def mixed_nash_2p(game: NormalFormGame, tolerance: float = TOLERANCE) -> MixedNashResult:
    """Support enumeration over equal-size support pairs of a two-agent game.

    Pure equilibria show up as singleton supports (those on infeasible cells
    are dropped, as in :func:`pure_nash`). Support pairs whose indifference
    system is singular yet admits equilibria are listed in
    ``result.degenerate`` instead of being represented by an arbitrary member.
    """
    if game.n != 2:
        raise ValueError("mixed equilibria are computed for two-agent games only")
    a = game.payoffs[..., 0]
    b = game.payoffs[..., 1]
    rows, cols = a.shape
    found, degenerate = [], []
    for k in range(1, min(rows, cols) + 1):
        for sup_a in itertools.combinations(range(rows), k):
            for sup_b in itertools.combinations(range(cols), k):
                if k == 1 and not game.feasible[sup_a[0], sup_b[0]]:
                    continue
                mx, rx = _indifference_system(b, list(sup_a), list(sup_b))
                my, ry = _indifference_system(a.T, list(sup_b), list(sup_a))
                singular_x = np.linalg.matrix_rank(mx) < k + 1
                singular_y = np.linalg.matrix_rank(my) < k + 1
                if singular_x or singular_y:
                    ok_x = _full_support_feasible(b, list(sup_a), list(sup_b), tolerance)
                    ok_y = _full_support_feasible(a.T, list(sup_b), list(sup_a), tolerance)
                    if ok_x and ok_y:
                        degenerate.append(DegenerateSupport((sup_a, sup_b)))
                    continue
                sx = np.linalg.solve(mx, rx)[:k]
                sy = np.linalg.solve(my, ry)[:k]
                if sx.min() < -tolerance or sy.min() < -tolerance:
                    continue
                x = np.zeros(rows)
                y = np.zeros(cols)
                x[list(sup_a)] = sx
                y[list(sup_b)] = sy
                x, y = _clamp(x, tolerance), _clamp(y, tolerance)
                profile = MixedProfile((x, y), payoffs=(float(x @ a @ y), float(x @ b @ y)))
                if not verify_equilibrium(game, profile, tolerance):
                    continue
                if any(_same_mix(profile, other, tolerance) for other in found):
                    continue
                found.append(profile)
    return MixedNashResult(found, degenerate)


def _same_mix(p, q, tol):
    return all(np.allclose(x, y, atol=tol, rtol=0) for x, y in zip(p.probabilities, q.probabilities))


def strategy_values(game: NormalFormGame, mixes, i: int) -> np.ndarray:
    """Expected payoff of each pure strategy of agent ``i`` against ``mixes``."""
    t = game.payoffs[..., i]
    for ax in reversed(range(game.n)):
        if ax != i:
            t = np.tensordot(t, np.asarray(mixes[ax], dtype=float), axes=([ax], [0]))
    return t


def verify_equilibrium(game: NormalFormGame, profile, tolerance: float = TOLERANCE) -> bool:
    """Independent deviation check for a pure cell or a :class:`MixedProfile`."""
    if isinstance(profile, MixedProfile):
        mixes = profile.probabilities
        for i in range(game.n):
            p = np.asarray(mixes[i])
            if p.shape != (game.shape[i],) or p.min() < -tolerance or abs(p.sum() - 1) > tolerance:
                return False
            values = strategy_values(game, mixes, i)
            expected = float(p @ values)
            if values.max() > expected + tolerance:
                return False
            if any(abs(values[s] - expected) > tolerance for s in profile.support[i]):
                return False
        return True
    cell = tuple(profile)
    if not game.feasible[cell]:
        return False
    return all(
        game.payoffs[_deviation_line(cell, i)].max() <= game.payoffs[cell + (i,)] + tolerance
        for i in range(game.n)
    )


def pareto_front(game: NormalFormGame) -> list:
    """Feasible cells whose payoff vector no other feasible cell Pareto-dominates."""
    feasible = [c for c in game.cells() if game.feasible[c]]
    front = []
    for c in feasible:
        pc = game.payoffs[c]
        if not any(np.all(game.payoffs[d] >= pc) and np.any(game.payoffs[d] > pc) for d in feasible):
            front.append(c)
    return front


def max_welfare(game: NormalFormGame, tolerance: float = TOLERANCE) -> list:
    feasible = [c for c in game.cells() if game.feasible[c]]
    if not feasible:
        return []
    sums = {c: float(game.payoffs[c].sum()) for c in feasible}
    best = max(sums.values())
    return [c for c in feasible if sums[c] >= best - tolerance]


def welfare(game: NormalFormGame, cell) -> float:
    return float(game.payoffs[tuple(cell)].sum())
