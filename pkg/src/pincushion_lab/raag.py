"""
Right-angled Artin group words.

A group word is a sequence of syllables ``(vertex, exponent)``. Generators
commute exactly along the edges of the graph. Normal forms reuse the vertex
piles of :mod:`pincushion_lab.words`, summing exponents on a pile top and
dropping the syllable (with its blockers) when the sum reaches zero.
"""

import re
from collections.abc import Iterable
from collections.abc import Sequence

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import model_validator

from .errors import FormatError
from .errors import WordError
from .graph_core import SimplicialGraph
from .words import VertexPiles

Syllable = tuple[str, int]

_TOKEN = re.compile(r"^([^\s^]+)(?:\^(-?\d+))?$")


class GroupWord(BaseModel):
    """Product of generator powers. Build with :func:`new_group_word`."""

    model_config = ConfigDict(frozen=True)

    graph: SimplicialGraph
    syllables: tuple[Syllable, ...] = ()

    @model_validator(mode="after")
    def _check_syllables(self) -> "GroupWord":
        for v, k in self.syllables:
            if v not in self.graph:
                msg = f"Generator {v!r} is not a vertex of the graph"
                raise ValueError(msg)
            if k == 0:
                msg = f"Syllable {v!r} has exponent zero"
                raise ValueError(msg)
        return self

    @property
    def is_empty(self) -> bool:
        return not self.syllables


def new_group_word(
    g: SimplicialGraph, syllables: Iterable[tuple[object, int]]
) -> GroupWord:
    checked: list[Syllable] = []
    for vertex, exponent in syllables:
        v = str(vertex)
        if v not in g:
            msg = f"Generator {v!r} is not a vertex of the graph"
            raise WordError(msg)
        if exponent == 0:
            msg = f"Syllable {v!r} has exponent zero"
            raise WordError(msg)
        checked.append((v, int(exponent)))
    return GroupWord(graph=g, syllables=tuple(checked))


def _same_graph(a: GroupWord, b: GroupWord) -> None:
    if a.graph != b.graph:
        msg = "Group words live over different graphs"
        raise WordError(msg)


def raag_normal_form(gw: GroupWord) -> GroupWord:
    """Shortest syllable form, least by (vertex, exponent) among the shortest."""
    piles = VertexPiles(gw.graph)
    for v, k in gw.syllables:
        top = piles.top(v)
        if not top:
            piles.push(v, k)
        elif top + k:
            piles.set_top(v, top + k)
        else:
            piles.drop_top(v)
    return GroupWord(graph=gw.graph, syllables=tuple(piles.depile()))


def raag_is_trivial(gw: GroupWord) -> bool:
    return raag_normal_form(gw).is_empty


def raag_multiply(a: GroupWord, b: GroupWord) -> GroupWord:
    _same_graph(a, b)
    return raag_normal_form(
        GroupWord(graph=a.graph, syllables=a.syllables + b.syllables)
    )


def raag_invert(gw: GroupWord) -> GroupWord:
    inverse = tuple((v, -k) for v, k in reversed(gw.syllables))
    return raag_normal_form(GroupWord(graph=gw.graph, syllables=inverse))


def raag_syllable_length(gw: GroupWord) -> int:
    return len(raag_normal_form(gw).syllables)


def raag_letter_length(gw: GroupWord) -> int:
    """Word length in the standard generators (sum of absolute exponents)."""
    return sum(abs(k) for _, k in raag_normal_form(gw).syllables)


def parse_group_word(g: SimplicialGraph, text: str | Sequence[str]) -> GroupWord:
    """Read ``v^k`` tokens; a bare ``v`` means ``v^1``."""
    tokens = text.split() if isinstance(text, str) else [t for s in text for t in s.split()]
    syllables: list[Syllable] = []
    for token in tokens:
        match = _TOKEN.match(token)
        if match is None:
            msg = f"Malformed group-word token {token!r}"
            raise FormatError(msg)
        vertex, exponent = match.group(1), int(match.group(2) or 1)
        if vertex not in g:
            msg = f"Unknown generator in group word: {vertex!r}"
            raise FormatError(msg)
        if exponent == 0:
            msg = f"Zero exponent in token {token!r}"
            raise FormatError(msg)
        syllables.append((vertex, exponent))
    return GroupWord(graph=g, syllables=tuple(syllables))


def format_group_word(gw: GroupWord) -> str:
    return " ".join(v if k == 1 else f"{v}^{k}" for v, k in gw.syllables)
