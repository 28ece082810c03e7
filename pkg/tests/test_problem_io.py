import textwrap

import numpy as np
import pytest

from published import STEEP_MATRIX, matrix_game
from schedgame.equilibrium import NormalFormGame, build_matrix
from schedgame.fixtures import NAMES, fixture_path, load_fixture
from schedgame.nfg import NfgParseError, export_nfg, parse_nfg
from schedgame.problem_io import ProblemFormatError, parse_problem, serialize_problem
from schedgame.render import render_matrix, render_schedule
from schedgame.report import report_from_json, report_to_json, solve_problem
from schedgame.schedule_game import EMPTY, ScheduleProfile, solve_internal
from schedgame.strips import Action, Plan


def doc(text):
    return textwrap.dedent(text).lstrip()


MINIMAL = doc("""
    format: 1
    agents:
      - name: A
        plans:
          - name: empty
""")


class TestParse:
    def test_problem1_fixture(self):
        spec = load_fixture("problem1")
        assert spec.agent_names == ("A", "B")
        assert [len(a.plans) for a in spec.agents] == [3, 3]

    @pytest.mark.parametrize("name", NAMES)
    def test_all_fixtures_load(self, name):
        assert fixture_path(name).exists()
        load_fixture(name)

    def test_minimal_file(self):
        spec = parse_problem(MINIMAL)
        assert spec.agents[0].plans[0].actions == ()
        assert spec.utility.goal_reward == 10
        assert spec.utility.delay_penalty == 1
        assert spec.utility.infeasible_payoff == -1000
        assert spec.seed == 0

    def test_add_delete_overlap_names_action(self):
        text = doc("""
            format: 1
            agents:
              - name: A
                plans:
                  - name: p
                    actions:
                      - {name: ok, add: [x]}
                      - {name: clash, add: [x, y], del: [y]}
        """)
        with pytest.raises(ProblemFormatError, match="'clash'") as info:
            parse_problem(text)
        assert info.value.line == 8
        assert info.value.path == "agents[0].plans[0].actions[1]"

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("format: 1\nagents: []\nextra: 1\n", "unknown field 'extra'"),
            ("format: 2\nagents: [{name: A}]\n", "unsupported format"),
            ("format: 1\nagents: []\n", "at least one agent"),
            ("format: 1\nagents: [{name: A}, {name: A}]\n", "duplicate agent name 'A'"),
            ("format: 1\nagents: [{name: A, plans: [{name: p}, {name: p}]}]\n", "duplicate plan name 'p'"),
            ("format: 1\nagents: [{name: A, plans: [{name: p, actions: [{name: x, cost: 1}]}]}]\n",
             "unknown field 'cost'"),
            ("format: 1\nagents: [{name: 'has space'}]\n", "invalid symbol"),
            ("format: 1\nformat: 1\nagents: [{name: A}]\n", "duplicate key 'format'"),
            ("format: 1\nconfig: {seed: -3}\nagents: [{name: A}]\n", "non-negative"),
            ("format: 1\nconfig: {tie_break: coin}\nagents: [{name: A}]\n", "expected one of"),
            ("format: 1\nconfig: {infeasible_payoff: 5}\nagents: [{name: A, plans: [{name: p}]}]\n",
             "infeasible payoff"),
            ("format: 1\nagents: [{name: A\n", "malformed YAML"),
            ("", "empty problem"),
        ],
    )
    def test_rejections(self, text, fragment):
        with pytest.raises(ProblemFormatError, match=fragment):
            parse_problem(text)

    def test_error_positions(self):
        text = "format: 1\nagents:\n  - name: A\n    plans:\n      - name: p\n        colour: red\n"
        with pytest.raises(ProblemFormatError) as info:
            parse_problem(text)
        assert info.value.line == 6
        assert str(info.value).startswith("line 6, agents[0].plans[0].colour:")

    @pytest.mark.parametrize("name", NAMES)
    def test_serialize_round_trip(self, name):
        spec = load_fixture(name)
        assert parse_problem(serialize_problem(spec)) == spec


@pytest.fixture(scope="module")
def problem1():
    return build_matrix(load_fixture("problem1"))


class TestRenderMatrix:
    def test_problem1_cell(self, problem1):
        text = render_matrix(problem1)
        row = next(line for line in text.splitlines() if line.startswith("piA1"))
        assert row.split(" | ")[1].strip() == "15,16 (2,2) *"

    def test_dimensions(self, problem1):
        lines = render_matrix(problem1).splitlines()
        assert len(lines) == 1 + 3
        assert all(len(line.split(" | ")) == 1 + 3 for line in lines)

    def test_infeasible_and_fractional(self):
        text = render_matrix(matrix_game(STEEP_MATRIX))
        assert "-inf,-inf" in text
        assert "7.5,9 (3,2)" in text
        assert "16,-1.5 (0,3)" in text

    def test_single_agent_list(self):
        game = NormalFormGame.from_payoffs([[3, 4]], agents=("A",))
        assert render_matrix(game).splitlines()[1:] == ["A1 | 3 (0)", "A2 | 4 (0) *"]


class TestRenderSchedule:
    def profile(self, plans, schedules):
        return ScheduleProfile(
            plans=tuple(plans), schedules=tuple(schedules), finish_times=(), delays=(),
            utilities=(), feasible=True, final_state=frozenset(),
        )

    def test_search_space_example(self):
        plan = Plan("pi", "A", [Action("a1"), Action("a2"), Action("a3")])
        text = render_schedule(self.profile([plan], [(0, EMPTY, EMPTY, 1, 2)]))
        assert text.splitlines()[1].split() == ["A", "a1", "·", "·", "a2", "a3"]

    def test_empty_plan_row_is_all_waits(self):
        plans = [Plan("pi", "A", [Action("x"), Action("y")]), Plan("idle", "B")]
        result = solve_internal(plans, set())
        rows = render_schedule(result.profile).splitlines()
        assert rows[0].split() == ["t", "0", "1"]
        assert rows[2].split() == ["B", "·", "·"]

    def test_single_step(self):
        plans = [Plan("p", "A", [Action("x")]), Plan("q", "B", [Action("y")])]
        rows = render_schedule(solve_internal(plans, set()).profile).splitlines()
        assert [r.split() for r in rows] == [["t", "0"], ["A", "x"], ["B", "y"]]

    def test_infeasible_rejected(self):
        problem = load_fixture("unsolvable")
        result = solve_internal([a.plans[0] for a in problem.agents], problem.init)
        with pytest.raises(ValueError):
            render_schedule(result.profile)


def payoff_section(text):
    return text.split("\n\n", 1)[1].strip()


class TestNfg:
    def test_single_cell(self):
        game = NormalFormGame.from_payoffs([[[5]], [[7]]])
        assert payoff_section(export_nfg(game)) == "5 7"

    def test_first_player_fastest(self):
        game = NormalFormGame.from_payoffs([[[1, 2], [3, 4]], [[5, 6], [7, 8]]])
        assert payoff_section(export_nfg(game)) == "1 5 3 7 2 6 4 8"

    def test_header(self):
        game = NormalFormGame.from_payoffs([np.zeros((3, 2)), np.zeros((3, 2))], agents=("A", "B"))
        assert export_nfg(game, "demo seed=4").splitlines()[0] == 'NFG 1 R "demo seed=4" { "A" "B" } { 3 2 }'

    def test_problem2_sentinel(self):
        game = build_matrix(load_fixture("problem2"))
        assert payoff_section(export_nfg(game)).startswith("-1000 -1000 ")

    def test_round_trip_fractional(self):
        game = matrix_game(STEEP_MATRIX)
        back = parse_nfg(export_nfg(game, "t4"))
        assert back.title == "t4" and back.players == ("A", "B") and back.shape == (4, 4)
        assert np.array_equal(back.payoffs, game.payoffs)

    def test_round_trip_non_terminating_decimal(self):
        game = NormalFormGame.from_payoffs([[[1 / 3, 0.1]], [[2 / 7, 1e-17]]])
        assert np.array_equal(parse_nfg(export_nfg(game)).payoffs, game.payoffs)

    @pytest.mark.parametrize("bad", ["", "NFG 1 X", 'NFG 1 R "t" { "A" } { 2 }\n\n1\n'])
    def test_parse_errors(self, bad):
        with pytest.raises(NfgParseError):
            parse_nfg(bad)


class TestReport:
    @pytest.mark.parametrize("name", ["problem1", "problem2", "handoff"])
    def test_json_round_trip(self, name):
        _, report = solve_problem(load_fixture(name))
        assert report_from_json(report_to_json(report)) == report

    def test_problem1_content(self):
        _, report = solve_problem(load_fixture("problem1"))
        assert [e.plans for e in report.pure_equilibria] == [("piA1", "piB1")]
        eq = report.pure_equilibria[0]
        assert eq.payoffs == (15, 16) and eq.delays == (2, 2)
        assert eq.max_welfare and eq.pareto_optimal
        assert len(eq.schedule) == 2
        assert report.config.seed == 0
