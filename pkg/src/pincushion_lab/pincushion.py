"""
Pincushion class membership.

A graph lies in level ``m`` when it can be built by appending level ``m - 1``
blocks one after another, each block either isolated or pinned at a single
vertex that already exists. Level 0 holds the single-vertex graph (and, by
convention, the empty graph).

Membership is decided from the last appended block backwards, memoized on
(vertex-subset bitmask, level). A successful search returns a
:class:`ConstructionTrace` that :func:`replay` turns back into the graph.
"""

from collections.abc import Iterator
from enum import StrEnum
from itertools import combinations
from itertools import count
from pathlib import Path

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field

from .config import logger
from .errors import FormatError
from .errors import GraphError
from .errors import TraceError
from .graph_core import SimplicialGraph
from .graph_core import disjoint_union
from .graph_core import empty_graph
from .graph_core import new_graph
from .graph_core import pin_graph
from .graph_core import pins
from .graph_core import read_text_file


class ConstructionTrace(BaseModel):
    """Certificate of membership at a given level.

    A level-0 trace names its single vertex (``None`` for the empty graph).
    Higher levels list the appended blocks in construction order.
    """

    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=0)
    vertex: str | None = None
    steps: tuple["TraceStep", ...] = ()


class TraceStep(BaseModel):
    """One appended block; ``pinned_at`` is ``None`` for an isolated block."""

    model_config = ConfigDict(frozen=True)

    block: ConstructionTrace
    pinned_at: str | None = None

    @property
    def isolated(self) -> bool:
        return self.pinned_at is None


ConstructionTrace.model_rebuild()


class LevelResult(BaseModel):
    """Outcome of :func:`min_level`. ``trace`` is ``None`` for non-members."""

    model_config = ConfigDict(frozen=True)

    min_level: int | None = None
    trace: ConstructionTrace | None = None

    @property
    def member(self) -> bool:
        return self.trace is not None


class Role(StrEnum):
    """What a vertex algebra must satisfy in a stable graph product."""

    ISOLATED = "isolated"
    LONE_PIN = "lone-pin"
    COMMUTATIVE = "commutative"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _submasks(mask: int) -> Iterator[int]:
    """Nonempty submasks of ``mask``."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _leaf(vertex: str | None, level: int) -> ConstructionTrace:
    """Trace of a graph with at most one vertex, wrapped up to ``level``."""
    if level == 0:
        return ConstructionTrace(level=0, vertex=vertex)
    if vertex is None:
        return ConstructionTrace(level=level)
    return ConstructionTrace(
        level=level, steps=(TraceStep(block=_leaf(vertex, level - 1)),)
    )


def _lift(trace: ConstructionTrace) -> ConstructionTrace:
    return ConstructionTrace(level=trace.level + 1, steps=(TraceStep(block=trace),))


class _LevelSearch:
    """Memoized backward search over induced subgraphs of one graph."""

    def __init__(self, g: SimplicialGraph) -> None:
        self.labels = g.vertices
        index = {v: i for i, v in enumerate(self.labels)}
        self.adj = [0] * len(self.labels)
        for a, b in g.edges:
            self.adj[index[a]] |= 1 << index[b]
            self.adj[index[b]] |= 1 << index[a]
        self.full = (1 << len(self.labels)) - 1
        self._memo: dict[tuple[int, int], ConstructionTrace | None] = {}

    def member(self, mask: int, level: int) -> ConstructionTrace | None:
        key = (mask, level)
        if key not in self._memo:
            self._memo[key] = self._search(mask, level)
        return self._memo[key]

    def _search(self, mask: int, level: int) -> ConstructionTrace | None:
        if mask.bit_count() <= 1:
            vertex = self.labels[mask.bit_length() - 1] if mask else None
            return _leaf(vertex, level)
        if level == 0:
            return None

        lower = self.member(mask, level - 1)
        if lower is not None:
            return _lift(lower)

        for block in self._candidates(mask):
            rest = mask & ~block
            admissible, target = self._attachment(block, rest)
            if not admissible:
                continue
            block_trace = self.member(block, level - 1)
            if block_trace is None:
                continue
            head = self.member(rest, level)
            if head is None:
                continue
            pinned_at = None if target is None else self.labels[target]
            step = TraceStep(block=block_trace, pinned_at=pinned_at)
            return ConstructionTrace(level=level, steps=(*head.steps, step))
        return None

    def _attachment(self, block: int, rest: int) -> tuple[bool, int | None]:
        """Cross edges from ``block`` into ``rest`` must be none or all to one vertex."""
        reach = 0
        for i in _bits(block):
            reach |= self.adj[i] & rest
        if reach == 0:
            return True, None
        if reach.bit_count() != 1:
            return False, None
        if any(self.adj[i] & rest != reach for i in _bits(block)):
            return False, None
        return True, reach.bit_length() - 1

    def _components(self, mask: int) -> list[int]:
        comps = []
        remaining = mask
        while remaining:
            comp = frontier = remaining & -remaining
            while frontier:
                reach = 0
                for i in _bits(frontier):
                    reach |= self.adj[i]
                frontier = reach & mask & ~comp
                comp |= frontier
            comps.append(comp)
            remaining &= ~comp
        return comps

    def _candidates(self, mask: int) -> Iterator[int]:
        """Candidate last blocks: component splits first, then by increasing size."""
        tried: set[int] = set()
        comps = self._components(mask)
        if len(comps) > 1:
            for comp in comps:
                tried.add(comp)
                yield comp
        members = list(_bits(mask))
        for size in range(1, len(members)):
            for combo in combinations(members, size):
                block = sum(1 << i for i in combo)
                if block not in tried:
                    yield block


def is_in_level(g: SimplicialGraph, m: int) -> ConstructionTrace | None:
    """Certificate of level exactly ``m`` for ``g``, or ``None`` if ``g`` is not at that level."""
    if m < 0:
        msg = f"Level must be non-negative, got {m}"
        raise GraphError(msg)
    search = _LevelSearch(g)
    return search.member(search.full, m)


def min_level(g: SimplicialGraph, max_level: int | None = None) -> LevelResult:
    """Smallest level containing ``g``.

    The search runs up to ``max_level``, which defaults to the number of
    vertices.
    """
    cap = len(g.vertices) if max_level is None else max_level
    if cap < 0:
        msg = f"max_level must be non-negative, got {cap}"
        raise GraphError(msg)
    search = _LevelSearch(g)
    for m in range(cap + 1):
        trace = search.member(search.full, m)
        if trace is not None:
            logger.debug(f"Graph on {len(g.vertices)} vertices: member at level {m}")
            return LevelResult(min_level=m, trace=trace)
    logger.debug(f"Graph on {len(g.vertices)} vertices: no level up to {cap}")
    return LevelResult()


def is_pincushion(g: SimplicialGraph) -> bool:
    return min_level(g).member


def replay(trace: ConstructionTrace) -> SimplicialGraph:
    """Rebuild the graph a trace describes, checking it along the way."""
    if trace.level == 0:
        if trace.steps:
            msg = "A level-0 trace cannot contain steps"
            raise TraceError(msg)
        return empty_graph() if trace.vertex is None else new_graph([trace.vertex])
    if trace.vertex is not None:
        msg = f"A level-{trace.level} trace cannot name a bare vertex"
        raise TraceError(msg)

    graph = empty_graph()
    for position, step in enumerate(trace.steps, start=1):
        if step.block.level != trace.level - 1:
            msg = (
                f"Step {position} of a level-{trace.level} trace has a "
                f"level-{step.block.level} block"
            )
            raise TraceError(msg)
        block = replay(step.block)
        overlap = set(graph.vertices) & set(block.vertices)
        if overlap:
            msg = f"Step {position} reuses vertices {sorted(overlap)}"
            raise TraceError(msg)
        if step.pinned_at is None:
            graph = disjoint_union(graph, block)
            continue
        if position == 1:
            msg = "The first step must append an isolated block"
            raise TraceError(msg)
        if step.pinned_at not in graph:
            msg = f"Step {position} is pinned at {step.pinned_at!r}, which does not exist yet"
            raise TraceError(msg)
        graph = pin_graph(graph, step.pinned_at, block)
    return graph


def vertex_roles(g: SimplicialGraph) -> dict[str, Role]:
    """Classify vertices as isolated, lone pins, or vertices needing commutative data.

    A lone pin is a pin whose neighbour is not itself a pin; both ends of an
    isolated edge are therefore commutative.
    """
    adj = g.adjacency()
    pin_set = pins(g)
    roles: dict[str, Role] = {}
    for v in g.vertices:
        if not adj[v]:
            roles[v] = Role.ISOLATED
        elif v in pin_set and not adj[v] & pin_set:
            roles[v] = Role.LONE_PIN
        else:
            roles[v] = Role.COMMUTATIVE
    return roles


# =============================================================================
# Forward oracle
# =============================================================================


class _ForwardClosure:
    """All level-m edge sets on vertex subsets, built by appending blocks forward."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.pair_bit = {
            pair: 1 << k for k, pair in enumerate(combinations(range(n), 2))
        }
        self._memo: dict[tuple[int, int], frozenset[int]] = {}

    def spokes(self, block: int, v: int) -> int:
        edges = 0
        for s in _bits(block):
            edges |= self.pair_bit[(s, v) if s < v else (v, s)]
        return edges

    def graphs(self, universe: int, level: int) -> frozenset[int]:
        key = (universe, level)
        if key not in self._memo:
            self._memo[key] = self._build(universe, level)
        return self._memo[key]

    def _build(self, universe: int, level: int) -> frozenset[int]:
        if universe == 0:
            return frozenset({0})
        if level == 0:
            return frozenset({0}) if universe.bit_count() == 1 else frozenset()

        frontier = {
            (first, edges)
            for first in _submasks(universe)
            for edges in self.graphs(first, level - 1)
        }
        seen = set(frontier)
        finished: set[int] = set()
        while frontier:
            grown: set[tuple[int, int]] = set()
            for used, edges in frontier:
                if used == universe:
                    finished.add(edges)
                    continue
                for block in _submasks(universe & ~used):
                    for block_edges in self.graphs(block, level - 1):
                        base = edges | block_edges
                        options = [base]
                        options.extend(base | self.spokes(block, v) for v in _bits(used))
                        for option in options:
                            state = (used | block, option)
                            if state not in seen:
                                seen.add(state)
                                grown.add(state)
            frontier = grown
        return frozenset(finished)

    def to_graph(self, edges: int) -> SimplicialGraph:
        labels = [str(i + 1) for i in range(self.n)]
        return new_graph(
            labels,
            [(labels[i], labels[j]) for (i, j), bit in self.pair_bit.items() if edges & bit],
        )


def enumerate_level(n: int, m: int) -> set[SimplicialGraph]:
    """Every labeled graph on vertices "1".."n" that the construction rules reach at level ``m``.

    Exponential; meant as a brute-force oracle for small ``n``.
    """
    if n < 0 or m < 0:
        msg = f"enumerate_level needs n >= 0 and m >= 0, got n={n}, m={m}"
        raise GraphError(msg)
    closure = _ForwardClosure(n)
    found = closure.graphs((1 << n) - 1, m)
    logger.debug(f"enumerate_level(n={n}, m={m}): {len(found)} graphs")
    return {closure.to_graph(edges) for edges in found}


# =============================================================================
# Certificate text format
# =============================================================================


def serialize_trace(trace: ConstructionTrace) -> str:
    """Indented certificate text, one step per line, blocks nested below their step."""
    lines: list[str] = []
    block_ids = count(1)

    def emit(node: ConstructionTrace, depth: int) -> None:
        pad = "  " * depth
        if node.level == 0:
            lines.append(f"{pad}empty" if node.vertex is None else f"{pad}vertex {node.vertex}")
            return
        lines.append(f"{pad}level {node.level}")
        for step in node.steps:
            attach = "isolated" if step.isolated else f"pinned-at {step.pinned_at}"
            lines.append(f"{pad}append b{next(block_ids)} {attach}")
            emit(step.block, depth + 1)

    emit(trace, 0)
    return "".join(f"{line}\n" for line in lines)


class _TraceParser:
    def __init__(self, text: str) -> None:
        self.lines: list[tuple[int, int, list[str]]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].rstrip()
            if not body.strip():
                continue
            indent = len(body) - len(body.lstrip(" "))
            if indent % 2:
                msg = "indentation must be a multiple of two spaces"
                raise FormatError(msg, lineno)
            self.lines.append((lineno, indent // 2, body.split()))
        self.pos = 0

    def parse(self) -> ConstructionTrace:
        if not self.lines:
            msg = "empty certificate"
            raise FormatError(msg)
        trace = self._node(0)
        if self.pos != len(self.lines):
            lineno = self.lines[self.pos][0]
            msg = "unexpected line after the certificate"
            raise FormatError(msg, lineno)
        return trace

    def _node(self, depth: int) -> ConstructionTrace:
        if self.pos >= len(self.lines):
            msg = "certificate ends where a block was expected"
            raise FormatError(msg)
        lineno, indent, tokens = self.lines[self.pos]
        if indent != depth:
            msg = f"expected indentation depth {depth}, got {indent}"
            raise FormatError(msg, lineno)
        self.pos += 1
        if tokens == ["empty"]:
            return ConstructionTrace(level=0)
        if tokens[0] == "vertex" and len(tokens) == 2:
            return ConstructionTrace(level=0, vertex=tokens[1])
        if tokens[0] != "level" or len(tokens) != 2 or not tokens[1].isdecimal():
            msg = f"expected 'level <m>', 'vertex <id>' or 'empty', got {' '.join(tokens)!r}"
            raise FormatError(msg, lineno)
        level = int(tokens[1])

        steps: list[TraceStep] = []
        while self.pos < len(self.lines):
            lineno, indent, tokens = self.lines[self.pos]
            if indent != depth or tokens[0] != "append":
                break
            self.pos += 1
            if len(tokens) == 3 and tokens[2] == "isolated":
                pinned_at = None
            elif len(tokens) == 4 and tokens[2] == "pinned-at":
                pinned_at = tokens[3]
            else:
                msg = f"malformed step {' '.join(tokens)!r}"
                raise FormatError(msg, lineno)
            steps.append(TraceStep(block=self._node(depth + 1), pinned_at=pinned_at))
        return ConstructionTrace(level=level, steps=tuple(steps))


def parse_trace(text: str) -> ConstructionTrace:
    return _TraceParser(text).parse()


def read_trace(path: Path) -> ConstructionTrace:
    return parse_trace(read_text_file(path))
