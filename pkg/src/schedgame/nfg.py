"""Normal-form ``.nfg`` files, payoff-list flavour.

Layout::

    NFG 1 R "title" { "A" "B" } { 3 3 }

    uA(1,1) uB(1,1) uA(2,1) uB(2,1) ...

Payoffs are listed cell by cell with the first player's strategy varying
fastest, each cell giving one payoff per player.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

_TOKEN = re.compile(r'"((?:\\.|[^"\\])*)"|(\{)|(\})|([^\s{}"]+)')


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def payoff_order(shape):
    """Cells in file order: first player's index varies fastest."""
    for idx in itertools.product(*(range(k) for k in reversed(shape))):
        yield tuple(reversed(idx))


def export_nfg(game, title: str = "") -> str:
    """Serialise a :class:`~schedgame.equilibrium.NormalFormGame`.

    Infeasible cells carry whatever sentinel payoff the game holds.
    """
    players = " ".join(_quote(a) for a in game.agents)
    counts = " ".join(str(k) for k in game.shape)
    values = []
    for cell in payoff_order(game.shape):
        values.extend(format_number(v) for v in game.payoffs[cell])
    return f"NFG 1 R {_quote(title)} {{ {players} }} {{ {counts} }}\n\n{' '.join(values)}\n"


@dataclass
class NfgData:
    title: str
    players: tuple
    shape: tuple
    payoffs: np.ndarray


class NfgParseError(ValueError):
    pass


def _tokens(text):
    for m in _TOKEN.finditer(text):
        quoted, lbrace, rbrace, bare = m.groups()
        if quoted is not None:
            yield ("str", re.sub(r"\\(.)", r"\1", quoted))
        elif lbrace:
            yield ("{", "{")
        elif rbrace:
            yield ("}", "}")
        else:
            yield ("word", bare)


def parse_nfg(text: str) -> NfgData:
    """Read a payoff-list ``.nfg`` document back into a payoff tensor."""
    toks = list(_tokens(text))
    pos = 0

    def take(kind=None):
        nonlocal pos
        if pos >= len(toks):
            raise NfgParseError("unexpected end of file")
        tok = toks[pos]
        if kind is not None and tok[0] != kind:
            raise NfgParseError(f"expected {kind}, got {tok[1]!r}")
        pos += 1
        return tok[1]

    if take("word") != "NFG" or take("word") != "1" or take("word") != "R":
        raise NfgParseError("missing 'NFG 1 R' header")
    title = take("str")
    take("{")
    players = []
    while toks[pos][0] == "str":
        players.append(take("str"))
    take("}")
    take("{")
    shape = []
    while toks[pos][0] == "word":
        shape.append(int(take("word")))
    if toks[pos][0] == "{":
        raise NfgParseError("outcome-style strategy lists are not supported")
    take("}")
    if pos < len(toks) and toks[pos][0] == "str":
        pos += 1  # optional comment
    numbers = [float(v) for kind, v in toks[pos:] if kind == "word"]
    if len(numbers) != len(toks) - pos:
        raise NfgParseError("unexpected token in payoff list")
    n = len(players)
    cells = list(payoff_order(tuple(shape)))
    if len(numbers) != n * len(cells):
        raise NfgParseError(f"expected {n * len(cells)} payoffs, found {len(numbers)}")
    payoffs = np.empty(tuple(shape) + (n,))
    for k, cell in enumerate(cells):
        payoffs[cell] = numbers[k * n:(k + 1) * n]
    return NfgData(title, tuple(players), tuple(shape), payoffs)
