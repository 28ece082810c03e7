"""Problem files: YAML documents with a ``format: 1`` version field.

Example::

    format: 1
    name: two-couriers
    init: [p, ra, rb]
    config:            # all optional
      goal_reward: 10
      delay_penalty: 1
      infeasible_payoff: -1000
      seed: 0
      tie_break: action-first     # or: seeded
      agent_order: seeded         # or: declared
    agents:
      - name: A
        plans:
          - name: piA
            goals: [gA]
            actions:
              - {name: a1, pre: [ra], add: [qa]}
              - {name: a2, pre: [p, qa], add: [gA]}

Errors carry the offending field path and, when known, its line number.
"""

from __future__ import annotations

import re

import yaml

from .problem import Agent, ProblemSpec
from .schedule_game import ORDER_MODES, TIE_BREAKS
from .strips import Action, Plan, UtilityConfig

FORMAT_VERSION = 1
SYMBOL = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_\-.:/]*$")

_TOP_KEYS = {"format", "name", "init", "config", "agents"}
_CONFIG_KEYS = {"goal_reward", "delay_penalty", "infeasible_payoff", "seed", "tie_break", "agent_order"}
_AGENT_KEYS = {"name", "plans"}
_PLAN_KEYS = {"name", "goals", "actions"}
_ACTION_KEYS = {"name", "pre", "add", "del"}


class ProblemFormatError(ValueError):
    def __init__(self, message: str, path: str = "", line=None):
        self.message = message
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


def _record_lines(node, path, lines):
    if isinstance(node, yaml.MappingNode):
        seen = set()
        for key_node, value_node in node.value:
            key = key_node.value
            sub = f"{path}.{key}" if path else str(key)
            if key in seen:
                raise ProblemFormatError(f"duplicate key {key!r}", sub, key_node.start_mark.line + 1)
            seen.add(key)
            lines[sub] = key_node.start_mark.line + 1
            _record_lines(value_node, sub, lines)
    elif isinstance(node, yaml.SequenceNode):
        for idx, item in enumerate(node.value):
            sub = f"{path}[{idx}]"
            lines[sub] = item.start_mark.line + 1
            _record_lines(item, sub, lines)


def _load(text: str):
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        if node is None:
            raise ProblemFormatError("empty problem document")
        lines = {"": node.start_mark.line + 1}
        _record_lines(node, "", lines)
        data = loader.construct_document(node)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        raise ProblemFormatError(f"malformed YAML: {exc.problem or exc}", line=line) from None
    finally:
        loader.dispose()
    return data, lines


class _Checker:
    def __init__(self, lines):
        self.lines = lines

    def fail(self, path, message):
        probe = path
        while probe and probe not in self.lines:
            probe = re.sub(r"(\.[^.\[]+|\[\d+\])$", "", probe)
        raise ProblemFormatError(message, path, self.lines.get(probe))

    def mapping(self, value, path, allowed, required=()):
        if not isinstance(value, dict):
            self.fail(path, "expected a mapping")
        for key in value:
            if key not in allowed:
                self.fail(f"{path}.{key}" if path else str(key), f"unknown field {key!r}")
        for key in required:
            if key not in value:
                self.fail(path, f"missing required field {key!r}")
        return value

    def symbol(self, value, path):
        if not isinstance(value, str) or not SYMBOL.match(value):
            self.fail(path, f"invalid symbol {value!r}")
        return value

    def symbols(self, value, path):
        if value is None:
            return []
        if not isinstance(value, list):
            self.fail(path, "expected a list of symbols")
        return [self.symbol(v, f"{path}[{i}]") for i, v in enumerate(value)]

    def items(self, value, path):
        if value is None:
            return []
        if not isinstance(value, list):
            self.fail(path, "expected a list")
        return value

    def number(self, value, path):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {value!r}")
        return float(value)


def parse_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem document.

    Raises:
        ProblemFormatError: on malformed YAML or any schema/semantic violation.
    """
    data, lines = _load(text)
    chk = _Checker(lines)
    chk.mapping(data, "", _TOP_KEYS, required=("format", "agents"))
    if data["format"] != FORMAT_VERSION or isinstance(data["format"], bool):
        chk.fail("format", f"unsupported format {data['format']!r}, expected {FORMAT_VERSION}")
    name = chk.symbol(data.get("name", "problem"), "name")
    init = frozenset(chk.symbols(data.get("init"), "init"))

    config = data.get("config") or {}
    chk.mapping(config, "config", _CONFIG_KEYS)
    defaults = UtilityConfig()
    util_args = {}
    for key in ("goal_reward", "delay_penalty", "infeasible_payoff"):
        util_args[key] = chk.number(config.get(key, getattr(defaults, key)), f"config.{key}")
    try:
        utility = UtilityConfig(**util_args)
    except ValueError as exc:
        chk.fail("config", str(exc))
    seed = config.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        chk.fail("config.seed", f"seed must be a non-negative integer, got {seed!r}")
    tie_break = config.get("tie_break", TIE_BREAKS[0])
    if tie_break not in TIE_BREAKS:
        chk.fail("config.tie_break", f"expected one of {list(TIE_BREAKS)}")
    agent_order = config.get("agent_order", ORDER_MODES[0])
    if agent_order not in ORDER_MODES:
        chk.fail("config.agent_order", f"expected one of {list(ORDER_MODES)}")

    agents_data = chk.items(data["agents"], "agents")
    if not agents_data:
        chk.fail("agents", "at least one agent is required")
    agents = []
    for ai, adata in enumerate(agents_data):
        apath = f"agents[{ai}]"
        chk.mapping(adata, apath, _AGENT_KEYS, required=("name",))
        aname = chk.symbol(adata["name"], f"{apath}.name")
        if any(a.name == aname for a in agents):
            chk.fail(f"{apath}.name", f"duplicate agent name {aname!r}")
        plans = []
        for pi, pdata in enumerate(chk.items(adata.get("plans"), f"{apath}.plans")):
            ppath = f"{apath}.plans[{pi}]"
            chk.mapping(pdata, ppath, _PLAN_KEYS, required=("name",))
            pname = chk.symbol(pdata["name"], f"{ppath}.name")
            if any(p.name == pname for p in plans):
                chk.fail(f"{ppath}.name", f"duplicate plan name {pname!r} for agent {aname!r}")
            goals = chk.symbols(pdata.get("goals"), f"{ppath}.goals")
            if len(set(goals)) != len(goals):
                chk.fail(f"{ppath}.goals", f"plan {pname!r} lists a goal twice")
            actions = []
            for xi, xdata in enumerate(chk.items(pdata.get("actions"), f"{ppath}.actions")):
                xpath = f"{ppath}.actions[{xi}]"
                chk.mapping(xdata, xpath, _ACTION_KEYS, required=("name",))
                xname = chk.symbol(xdata["name"], f"{xpath}.name")
                pre = chk.symbols(xdata.get("pre"), f"{xpath}.pre")
                add = chk.symbols(xdata.get("add"), f"{xpath}.add")
                dele = chk.symbols(xdata.get("del"), f"{xpath}.del")
                clash = set(add) & set(dele)
                if clash:
                    chk.fail(xpath, f"action {xname!r} both adds and deletes {sorted(clash)}")
                actions.append(Action(xname, pre, add, dele))
            plans.append(Plan(pname, aname, actions, goals))
        agents.append(Agent(aname, tuple(plans)))

    spec = ProblemSpec(
        name=name,
        init=init,
        agents=tuple(agents),
        utility=utility,
        seed=seed,
        tie_break=tie_break,
        agent_order=agent_order,
    )
    problem = check_sentinel(spec)
    if problem:
        chk.fail("config.infeasible_payoff", problem)
    return spec


def check_sentinel(spec: ProblemSpec):
    """Return an error message if the infeasible payoff could be reached by a
    real schedule, else ``None``.

    No agent can be delayed by more than the longest joint horizon minus its
    own plan length, which bounds the worst reachable utility.
    """
    if not all(a.plans for a in spec.agents):
        return None
    cfg = spec.utility
    horizon = sum(max(len(p) for p in a.plans) for a in spec.agents)
    worst = min(
        len(p.goals) * cfg.goal_reward - len(p) - cfg.delay_penalty * (horizon - len(p))
        for a in spec.agents for p in a.plans
    )
    if cfg.infeasible_payoff >= worst:
        return (f"infeasible payoff {cfg.infeasible_payoff:g} must be below every reachable "
                f"utility (lowest is {worst:g})")
    return None


def load_problem(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _num(x: float):
    return int(x) if float(x).is_integer() else float(x)


def problem_to_dict(spec: ProblemSpec) -> dict:
    cfg = spec.utility
    return {
        "format": FORMAT_VERSION,
        "name": spec.name,
        "init": sorted(spec.init),
        "config": {
            "goal_reward": _num(cfg.goal_reward),
            "delay_penalty": _num(cfg.delay_penalty),
            "infeasible_payoff": _num(cfg.infeasible_payoff),
            "seed": spec.seed,
            "tie_break": spec.tie_break,
            "agent_order": spec.agent_order,
        },
        "agents": [
            {
                "name": agent.name,
                "plans": [
                    {
                        "name": plan.name,
                        "goals": list(plan.goals),
                        "actions": [
                            {"name": a.name, "pre": sorted(a.pre), "add": sorted(a.add),
                             "del": sorted(a.delete)}
                            for a in plan.actions
                        ],
                    }
                    for plan in agent.plans
                ],
            }
            for agent in spec.agents
        ],
    }


def serialize_problem(spec: ProblemSpec) -> str:
    return yaml.safe_dump(problem_to_dict(spec), sort_keys=False, default_flow_style=None, width=100)
