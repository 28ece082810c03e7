"""Problem files shipped with the package."""

from importlib import resources

NAMES = ("handoff", "unsolvable", "problem1", "problem2")


def fixture_path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__).joinpath("problems", f"{name}.yaml")


def load_fixture(name: str):
    from .problem_io import parse_problem

    return parse_problem(fixture_path(name).read_text(encoding="utf-8"))
