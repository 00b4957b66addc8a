"""
Graph-product word calculus.

Words over the vertices of a graph are equivalent under two moves: swapping
neighbouring letters whose vertices are adjacent, and deleting one of two
equal neighbouring letters. Canonical forms are computed with vertex piles
(heaps of pieces): every appended letter lands on its own pile and drops a
blocker on the pile of each vertex it does not commute with.
"""

from collections import deque
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Sequence

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import model_validator

from .errors import FormatError
from .errors import WordError
from .graph_core import SimplicialGraph


class Word(BaseModel):
    """Sequence of vertices of ``graph``. Build with :func:`new_word`."""

    model_config = ConfigDict(frozen=True)

    graph: SimplicialGraph
    letters: tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_letters(self) -> "Word":
        unknown = sorted(set(self.letters) - set(self.graph.vertices))
        if unknown:
            msg = f"Letters {unknown} are not vertices of the graph"
            raise ValueError(msg)
        return self

    def __len__(self) -> int:
        return len(self.letters)


class Permutation(BaseModel):
    """Bijection on 1..n, stored as its sequence of images."""

    model_config = ConfigDict(frozen=True)

    images: tuple[int, ...] = ()

    @model_validator(mode="after")
    def _check_bijection(self) -> "Permutation":
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            msg = f"Not a permutation of 1..{len(self.images)}: {self.images}"
            raise ValueError(msg)
        return self

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def is_identity(self) -> bool:
        return all(image == k for k, image in enumerate(self.images, start=1))


class VertexPiles:
    """One pile per vertex; piles hold nonzero markers and zero blockers.

    The same structure serves words (markers are 1) and group words
    (markers are exponents).
    """

    def __init__(self, g: SimplicialGraph) -> None:
        adj = g.adjacency()
        self.order = g.vertices
        self.blocked = {
            v: tuple(u for u in g.vertices if u != v and u not in adj[v])
            for v in g.vertices
        }
        self.piles: dict[str, deque[int]] = {v: deque() for v in g.vertices}

    def top(self, v: str) -> int:
        pile = self.piles[v]
        return pile[-1] if pile else 0

    def push(self, v: str, marker: int) -> None:
        self.piles[v].append(marker)
        for u in self.blocked[v]:
            self.piles[u].append(0)

    def set_top(self, v: str, marker: int) -> None:
        self.piles[v][-1] = marker

    def drop_top(self, v: str) -> None:
        self.piles[v].pop()
        for u in self.blocked[v]:
            self.piles[u].pop()

    def depile(self) -> list[tuple[str, int]]:
        """Empty the piles, always taking the smallest available vertex first."""
        out: list[tuple[str, int]] = []
        while True:
            chosen = next(
                (v for v in self.order if self.piles[v] and self.piles[v][0]), None
            )
            if chosen is None:
                return out
            out.append((chosen, self.piles[chosen].popleft()))
            for u in self.blocked[chosen]:
                self.piles[u].popleft()


def new_word(g: SimplicialGraph, letters: Iterable[object]) -> Word:
    """Build a word, rejecting letters that are not vertices of ``g``."""
    ids = tuple(str(x) for x in letters)
    unknown = sorted(set(ids) - set(g.vertices))
    if unknown:
        msg = f"Letters {unknown} are not vertices of the graph"
        raise WordError(msg)
    return Word(graph=g, letters=ids)


def _same_graph(w1: Word, w2: Word) -> None:
    if w1.graph != w2.graph:
        msg = "Words live over different graphs"
        raise WordError(msg)


def is_reduced(w: Word) -> bool:
    """Every two equal letters are separated by a letter not adjacent to them."""
    letters = w.letters
    g = w.graph
    for k, x in enumerate(letters):
        for j in range(k + 1, len(letters)):
            if letters[j] != x:
                continue
            if not any(not g.has_edge(x, letters[p]) for p in range(k + 1, j)):
                return False
            break
    return True


def reduce(w: Word) -> Word:
    """Equivalent reduced word; surviving letters keep their original order."""
    piles = VertexPiles(w.graph)
    kept: list[str] = []
    for x in w.letters:
        if piles.top(x):
            continue
        piles.push(x, 1)
        kept.append(x)
    return Word(graph=w.graph, letters=tuple(kept))


def reduced_length(w: Word) -> int:
    return len(reduce(w))


def normal_form(w: Word) -> Word:
    """Lexicographically least reduced word equivalent to ``w``."""
    piles = VertexPiles(w.graph)
    for x in w.letters:
        if not piles.top(x):
            piles.push(x, 1)
    return Word(graph=w.graph, letters=tuple(v for v, _ in piles.depile()))


def equivalent(w1: Word, w2: Word) -> bool:
    _same_graph(w1, w2)
    return normal_form(w1) == normal_form(w2)


def matching_permutation(w1: Word, w2: Word) -> Permutation:
    """The unique sigma with ``w2[i] == w1[sigma(i)]`` preserving the order of equal letters."""
    _same_graph(w1, w2)
    for name, w in (("first", w1), ("second", w2)):
        if not is_reduced(w):
            msg = f"The {name} word is not reduced: {format_word(w)!r}"
            raise WordError(msg)
    if not equivalent(w1, w2):
        msg = f"Words are not equivalent: {format_word(w1)!r} vs {format_word(w2)!r}"
        raise WordError(msg)

    positions: dict[str, deque[int]] = {}
    for i, x in enumerate(w1.letters, start=1):
        positions.setdefault(x, deque()).append(i)
    return Permutation(images=tuple(positions[x].popleft() for x in w2.letters))


def _neighbours(
    g: SimplicialGraph, letters: tuple[str, ...], cap: int
) -> Iterator[tuple[str, ...]]:
    for i in range(len(letters) - 1):
        a, b = letters[i], letters[i + 1]
        if a == b:
            yield letters[:i] + letters[i + 1 :]
        elif g.has_edge(a, b):
            yield (*letters[:i], b, a, *letters[i + 2 :])
    if len(letters) < cap:
        for i, x in enumerate(letters):
            yield (*letters[: i + 1], x, *letters[i + 1 :])


def bfs_class(w: Word, cap: int) -> set[Word]:
    """Equivalence class of ``w`` restricted to words of length at most ``cap``.

    Explores shuffles, merges and un-merges; exponential, for testing only.
    """
    if cap < len(w):
        msg = f"cap {cap} is shorter than the word ({len(w)} letters)"
        raise WordError(msg)
    seen = {w.letters}
    queue = deque([w.letters])
    while queue:
        current = queue.popleft()
        for nxt in _neighbours(w.graph, current, cap):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return {Word(graph=w.graph, letters=letters) for letters in seen}


def parse_word(g: SimplicialGraph, text: str | Sequence[str]) -> Word:
    """Read whitespace-separated vertex ids; ``text`` may also be pre-split tokens."""
    tokens = text.split() if isinstance(text, str) else [t for s in text for t in s.split()]
    unknown = [t for t in tokens if t not in g]
    if unknown:
        msg = f"Unknown vertex in word: {unknown[0]!r}"
        raise FormatError(msg)
    return Word(graph=g, letters=tuple(tokens))


def format_word(w: Word) -> str:
    return " ".join(w.letters)
