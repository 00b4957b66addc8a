"""
Finite simplicial graphs.

Graphs are immutable pydantic models over opaque string vertex ids. Vertices
are kept in lexicographic order and every edge is stored once as a sorted
pair, so two graphs compare equal exactly when they are equal as labeled
graphs.
"""

from collections.abc import Iterable
from pathlib import Path

import networkx as nx
from pydantic import BaseModel
from pydantic import ConfigDict

from .errors import FormatError
from .errors import GraphError

Vertex = str
Edge = tuple[str, str]
VertexSet = frozenset[str]


class SimplicialGraph(BaseModel):
    """Finite undirected graph without loops or multiple edges.

    Build instances with :func:`new_graph`, which validates and normalizes.
    """

    model_config = ConfigDict(frozen=True)

    vertices: tuple[str, ...] = ()
    edges: frozenset[tuple[str, str]] = frozenset()

    def __contains__(self, v: object) -> bool:
        return v in self.vertices

    def adjacency(self) -> dict[str, set[str]]:
        """Map each vertex to the set of its neighbours."""
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def has_edge(self, v: str, w: str) -> bool:
        return _pair(v, w) in self.edges


def _pair(v: str, w: str) -> Edge:
    return (v, w) if v <= w else (w, v)


def new_graph(
    vertices: Iterable[object], edges: Iterable[tuple[object, object]] = ()
) -> SimplicialGraph:
    """Validate and build a graph.

    Identifiers are converted with ``str`` and must be non-empty, without
    whitespace or ``#``, so that every graph survives the text format.
    Duplicate edges collapse and pair order is normalized; self-loops,
    unknown endpoints and duplicate vertex ids are rejected.
    """
    ids = [str(v) for v in vertices]
    seen: set[str] = set()
    for v in ids:
        if not v or "#" in v or any(c.isspace() for c in v):
            msg = f"Invalid vertex identifier: {v!r}"
            raise GraphError(msg)
        if v in seen:
            msg = f"Duplicate vertex identifier: {v!r}"
            raise GraphError(msg)
        seen.add(v)

    pairs: set[Edge] = set()
    for a_raw, b_raw in edges:
        a, b = str(a_raw), str(b_raw)
        if a == b:
            msg = f"Self-loop at vertex {a!r} is not allowed"
            raise GraphError(msg)
        for end in (a, b):
            if end not in seen:
                msg = f"Edge ({a!r}, {b!r}) mentions unknown vertex {end!r}"
                raise GraphError(msg)
        pairs.add(_pair(a, b))

    return SimplicialGraph(vertices=tuple(sorted(ids)), edges=frozenset(pairs))


def empty_graph() -> SimplicialGraph:
    return SimplicialGraph()


def neighbors(g: SimplicialGraph, v: object) -> set[str]:
    """Vertices adjacent to ``v``."""
    key = _require_vertex(g, v)
    return {b if a == key else a for a, b in g.edges if key in (a, b)}


def degree(g: SimplicialGraph, v: object) -> int:
    return len(neighbors(g, v))


def pins(g: SimplicialGraph) -> VertexSet:
    """Vertices adjacent to exactly one other vertex."""
    adj = g.adjacency()
    return frozenset(v for v, nbrs in adj.items() if len(nbrs) == 1)


def _require_vertex(g: SimplicialGraph, v: object) -> str:
    key = str(v)
    if key not in g:
        msg = f"Vertex {key!r} is not in the graph"
        raise GraphError(msg)
    return key


def _require_disjoint(g: SimplicialGraph, g2: SimplicialGraph) -> None:
    overlap = set(g.vertices) & set(g2.vertices)
    if overlap:
        msg = f"Vertex identifiers overlap: {sorted(overlap)}"
        raise GraphError(msg)


def disjoint_union(g: SimplicialGraph, g2: SimplicialGraph) -> SimplicialGraph:
    """Union of two graphs on disjoint vertex sets, with no cross edges."""
    _require_disjoint(g, g2)
    return SimplicialGraph(
        vertices=tuple(sorted(g.vertices + g2.vertices)),
        edges=g.edges | g2.edges,
    )


def pin_graph(g: SimplicialGraph, v: object, g2: SimplicialGraph) -> SimplicialGraph:
    """Pin ``g2`` to ``g`` at ``v``: every vertex of ``g2`` gets an edge to ``v``.

    The caller is responsible for renaming ``g2`` apart from ``g``.
    """
    key = _require_vertex(g, v)
    union = disjoint_union(g, g2)
    spokes = {_pair(w, key) for w in g2.vertices}
    return SimplicialGraph(vertices=union.vertices, edges=union.edges | spokes)


def induced_subgraph(g: SimplicialGraph, s: Iterable[object]) -> SimplicialGraph:
    """Restrict ``g`` to the vertex subset ``s``."""
    keep = {_require_vertex(g, v) for v in s}
    return SimplicialGraph(
        vertices=tuple(sorted(keep)),
        edges=frozenset(e for e in g.edges if e[0] in keep and e[1] in keep),
    )


def to_networkx(g: SimplicialGraph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(g.vertices)
    graph.add_edges_from(g.edges)
    return graph


def connected_components(g: SimplicialGraph) -> list[VertexSet]:
    """Connected components, ordered by their smallest vertex."""
    comps = [frozenset(c) for c in nx.connected_components(to_networkx(g))]
    return sorted(comps, key=min)


def is_forest(g: SimplicialGraph) -> bool:
    """True when ``g`` has no cycles. The empty graph counts as a forest."""
    if not g.vertices:
        return True
    return bool(nx.is_forest(to_networkx(g)))


# =============================================================================
# Standard families on vertices "1".."n"
# =============================================================================


def _check_order(n: int, minimum: int, name: str) -> None:
    if n < minimum:
        msg = f"{name} needs n >= {minimum}, got {n}"
        raise GraphError(msg)


def _labels(n: int) -> list[str]:
    return [str(i) for i in range(1, n + 1)]


def complete_graph(n: int) -> SimplicialGraph:
    _check_order(n, 1, "complete_graph")
    labels = _labels(n)
    return new_graph(
        labels,
        [(a, b) for i, a in enumerate(labels) for b in labels[i + 1 :]],
    )


def path_graph(n: int) -> SimplicialGraph:
    _check_order(n, 1, "path_graph")
    labels = _labels(n)
    return new_graph(labels, zip(labels, labels[1:], strict=False))


def cycle_graph(n: int) -> SimplicialGraph:
    _check_order(n, 3, "cycle_graph")
    labels = _labels(n)
    return new_graph(labels, zip(labels, labels[1:] + labels[:1], strict=True))


def star_graph(n: int) -> SimplicialGraph:
    """Star on ``n`` vertices with center "1"."""
    _check_order(n, 1, "star_graph")
    labels = _labels(n)
    return new_graph(labels, [("1", leaf) for leaf in labels[1:]])


# =============================================================================
# Text format
# =============================================================================


def parse_graph(text: str) -> SimplicialGraph:
    """Parse the line-oriented graph format.

    ``#`` starts a comment, ``vertex <id>`` declares a vertex and
    ``edge <a> <b>`` declares an edge together with both endpoints.
    """
    declared: dict[str, None] = {}
    pairs: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        keyword, args = tokens[0], tokens[1:]
        if keyword == "vertex" and len(args) == 1:
            declared.setdefault(args[0])
        elif keyword == "edge" and len(args) == 2:
            a, b = args
            if a == b:
                msg = f"self-loop at vertex {a!r}"
                raise FormatError(msg, lineno)
            declared.setdefault(a)
            declared.setdefault(b)
            pairs.append((a, b))
        else:
            msg = f"expected 'vertex <id>' or 'edge <id> <id>', got {raw.strip()!r}"
            raise FormatError(msg, lineno)
    return new_graph(declared, pairs)


def serialize_graph(g: SimplicialGraph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines.extend(f"edge {a} {b}" for a, b in sorted(g.edges))
    return "".join(f"{line}\n" for line in lines)


def read_text_file(path: Path) -> str:
    """Read a UTF-8 input file; undecodable bytes are a format error."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        msg = f"{path}: not valid UTF-8 text (byte {e.start})"
        raise FormatError(msg) from e


def read_graph(path: Path) -> SimplicialGraph:
    return parse_graph(read_text_file(path))


def write_graph(g: SimplicialGraph, path: Path) -> None:
    Path(path).write_text(serialize_graph(g), encoding="utf-8")
