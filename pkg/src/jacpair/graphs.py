"""Multigraphs, the standard constructions, and the text file format.

A graph is a vertex count plus a sorted tuple of ``(u, v, mult)`` records
with ``u < v``. Loops are not representable. Instances are immutable and
hashable so they can key caches.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DisconnectedGraphError, GraphError, GraphFormatError
from .linalg import determinant

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class Multigraph:
    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        n = self.vertex_count
        if n < 1:
            raise GraphError("a graph needs at least one vertex")
        seen = set()
        for u, v, m in self.edges:
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u > v:
                raise GraphError(f"edge ({u}, {v}) must be stored with u < v")
            if m < 1:
                raise GraphError(f"edge ({u}, {v}) has multiplicity {m}")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge record ({u}, {v})")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Multigraph:
        """Build from ``(u, v)`` or ``(u, v, mult)`` items, merging repeats."""
        acc: dict[tuple[int, int], int] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            m = int(e[2]) if len(e) > 2 else 1
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            acc[key] = acc.get(key, 0) + m
        return cls(n, tuple(sorted((u, v, m) for (u, v), m in acc.items())))

    @cached_property
    def adjacency(self) -> tuple[dict[int, int], ...]:
        adj: list[dict[int, int]] = [{} for _ in range(self.vertex_count)]
        for u, v, m in self.edges:
            adj[u][v] = m
            adj[v][u] = m
        return tuple(adj)

    @cached_property
    def valences(self) -> tuple[int, ...]:
        return tuple(sum(a.values()) for a in self.adjacency)

    @property
    def edge_total(self) -> int:
        return sum(m for _, _, m in self.edges)

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for _, _, m in self.edges)

    def is_connected(self) -> bool:
        return len(_component(self, 0)) == self.vertex_count

    def laplacian(self) -> list[list[int]]:
        n = self.vertex_count
        L = [[0] * n for _ in range(n)]
        for u, v, m in self.edges:
            L[u][v] -= m
            L[v][u] -= m
            L[u][u] += m
            L[v][v] += m
        return L

    def reduced_laplacian(self, base: int = 0) -> list[list[int]]:
        L = self.laplacian()
        keep = [i for i in range(self.vertex_count) if i != base]
        return [[L[i][j] for j in keep] for i in keep]

    def __str__(self):
        return emit_graph(self)


def _component(G: Multigraph, start: int) -> set[int]:
    seen = {start}
    todo = [start]
    adj = G.adjacency
    while todo:
        u = todo.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def require_connected(G: Multigraph) -> None:
    if not G.is_connected():
        raise DisconnectedGraphError("graph is not connected")


def check_vertex(G: Multigraph, v: int, what: str = "vertex") -> None:
    if not 0 <= v < G.vertex_count:
        raise GraphError(f"{what} {v} out of range for {G.vertex_count} vertices")


# -- constructions ---------------------------------------------------------


def normalize_tuple(s: Iterable[int]) -> tuple[int, ...]:
    parts = tuple(sorted(int(x) for x in s))
    if len(parts) < 2:
        raise GraphError("an s-tuple needs at least two parts")
    if parts[0] < 1:
        raise GraphError(f"s-tuple parts must be positive, got {parts}")
    return parts


def cycle(n: int) -> Multigraph:
    """C_n; n = 1 is a single vertex and n = 2 the double edge."""
    if n < 1:
        raise GraphError(f"cycle length must be positive, got {n}")
    if n == 1:
        return Multigraph(1, ())
    if n == 2:
        return Multigraph(2, ((0, 1, 2),))
    return Multigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def banana(m: int) -> Multigraph:
    """Two vertices joined by m parallel edges."""
    if m < 1:
        raise GraphError(f"banana needs at least one edge, got {m}")
    return Multigraph(2, ((0, 1, m),))


def subdivided_banana(s: Iterable[int]) -> Multigraph:
    """Banana graph whose i-th edge is subdivided into s_i edges.

    Hubs are vertices 0 and 1; strand vertices follow strand by strand,
    in ascending order of the sorted tuple, walking from hub 0 to hub 1.
    """
    parts = normalize_tuple(s)
    n = 2 + sum(x - 1 for x in parts)
    edges = []
    nxt = 2
    for length in parts:
        prev = 0
        for _ in range(length - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, 1))
    return Multigraph.from_edges(n, edges)


def multicycle(s: Iterable[int]) -> Multigraph:
    """Cycle on m vertices with s_i parallel edges between v_i and v_{i+1}."""
    parts = normalize_tuple(s)
    m = len(parts)
    return Multigraph.from_edges(m, [(i, (i + 1) % m, x) for i, x in enumerate(parts)])


def complete(n: int) -> Multigraph:
    if n < 1:
        raise GraphError(f"complete graph needs n >= 1, got {n}")
    return Multigraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def wedge_vertex_maps(
    n1: int, n2: int, v1: int, v2: int
) -> tuple[list[int], list[int]]:
    """Vertex relabelings of both summands inside their wedge sum."""
    map1 = list(range(n1))
    map2 = []
    nxt = n1
    for w in range(n2):
        if w == v2:
            map2.append(v1)
        else:
            map2.append(nxt)
            nxt += 1
    return map1, map2


def wedge(G1: Multigraph, G2: Multigraph, v1: int = 0, v2: int = 0) -> Multigraph:
    """Glue G1 and G2 by identifying v1 in G1 with v2 in G2.

    G1 keeps its labels; the vertices of G2 other than v2 follow in order.
    """
    check_vertex(G1, v1, "wedge vertex")
    check_vertex(G2, v2, "wedge vertex")
    map1, map2 = wedge_vertex_maps(G1.vertex_count, G2.vertex_count, v1, v2)
    edges = [(map1[u], map1[v], m) for u, v, m in G1.edges]
    edges += [(map2[u], map2[v], m) for u, v, m in G2.edges]
    return Multigraph.from_edges(G1.vertex_count + G2.vertex_count - 1, edges)


def doubled_tree(
    tree: Sequence[tuple[int, int]], doubled: Iterable[tuple[int, int]]
) -> Multigraph:
    """Tree with each edge of ``doubled`` replaced by a double edge."""
    tree_edges = [(min(u, v), max(u, v)) for u, v in tree]
    n = len(tree_edges) + 1
    if len(set(tree_edges)) != len(tree_edges):
        raise GraphError("tree has a repeated edge")
    T = Multigraph.from_edges(n, tree_edges)
    if not T.is_connected():
        raise GraphError("edge list is not a tree")
    chosen = {(min(u, v), max(u, v)) for u, v in doubled}
    missing = chosen - set(tree_edges)
    if missing:
        raise GraphError(f"doubled edges {sorted(missing)} are not tree edges")
    return Multigraph.from_edges(
        n, [(u, v, 2 if (u, v) in chosen else 1) for u, v in tree_edges]
    )


def construct(family: str, *args) -> Multigraph:
    """Dispatch by family name, e.g. ``construct("multicycle", (1, 3, 4, 2))``."""
    table = {
        "cycle": cycle,
        "banana": banana,
        "subdivided_banana": subdivided_banana,
        "multicycle": multicycle,
        "complete": complete,
        "wedge": wedge,
        "doubled_tree": doubled_tree,
    }
    try:
        fn = table[family]
    except KeyError:
        raise GraphError(f"unknown graph family {family!r}") from None
    return fn(*args)


# -- statistics --------------------------------------------------------------


@dataclass(frozen=True)
class GraphStats:
    genus: int
    max_valence: int
    biconnected: bool
    two_edge_connected: bool


def spanning_tree_count(G: Multigraph) -> int:
    """Number of spanning trees, via the determinant of a reduced Laplacian."""
    require_connected(G)
    if G.vertex_count == 1:
        return 1
    return determinant(G.reduced_laplacian(0))


def _lowpoint_scan(G: Multigraph) -> tuple[set[int], list[tuple[int, int]]]:
    """Cut vertices and bridges by an iterative DFS."""
    n = G.vertex_count
    adj = G.adjacency
    disc = [-1] * n
    low = [0] * n
    cut: set[int] = set()
    bridges: list[tuple[int, int]] = []
    timer = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = timer
        timer += 1
        children = 0
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if disc[w] < 0:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, u, iter(adj[w])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                low[parent] = min(low[parent], low[u])
                if stack[-1][1] >= 0 and low[u] >= disc[parent]:
                    cut.add(parent)
                if low[u] > disc[parent] and adj[u][parent] == 1:
                    bridges.append((min(u, parent), max(u, parent)))
                if parent == root:
                    children += 1
        if children > 1:
            cut.add(root)
    return cut, bridges


def stats(G: Multigraph) -> GraphStats:
    require_connected(G)
    cut, bridges = _lowpoint_scan(G)
    n = G.vertex_count
    return GraphStats(
        genus=G.edge_total - n + 1,
        max_valence=max(G.valences),
        biconnected=n >= 2 and not cut,
        two_edge_connected=not bridges,
    )


def cut_vertices(G: Multigraph) -> set[int]:
    return _lowpoint_scan(G)[0]


def bridges(G: Multigraph) -> list[tuple[int, int]]:
    return sorted(_lowpoint_scan(G)[1])


def bfs_distances(G: Multigraph, source: int) -> list[int]:
    dist = [-1] * G.vertex_count
    dist[source] = 0
    queue = deque([source])
    adj = G.adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


# -- file format -------------------------------------------------------------


def emit_graph(G: Multigraph) -> str:
    lines = [f"{G.vertex_count} {len(G.edges)}"]
    lines += [f"{u} {v} {m}" for u, v, m in sorted(G.edges)]
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int, count: int, what: str) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise GraphFormatError(
            f"expected {count} integers in {what}, got {len(parts)}", lineno
        )
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise GraphFormatError(f"non-integer token in {what}", lineno) from None


def parse_graph(text: str) -> Multigraph:
    """Parse the ``n k`` header plus ``u v mult`` records format."""
    header = None
    records: list[tuple[int, tuple[int, int, int]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = _ints(line, lineno, 2, "header")
            if header[0] < 1:
                raise GraphFormatError("vertex count must be positive", lineno)
            if header[1] < 0:
                raise GraphFormatError("edge record count must be nonnegative", lineno)
            continue
        u, v, m = _ints(line, lineno, 3, "edge record")
        records.append((lineno, (u, v, m)))
    if header is None:
        raise GraphFormatError("missing header line")
    n, k = header
    if len(records) != k:
        raise GraphFormatError(f"header announces {k} edge records, found {len(records)}")
    seen: dict[tuple[int, int], int] = {}
    edges = []
    for lineno, (u, v, m) in records:
        if u == v:
            raise GraphFormatError(f"loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex index out of range [0, {n})", lineno)
        if u > v:
            raise GraphFormatError(f"record must have u < v, got {u} {v}", lineno)
        if m < 1:
            raise GraphFormatError(f"multiplicity must be >= 1, got {m}", lineno)
        if (u, v) in seen:
            raise GraphFormatError(
                f"duplicate pair {u} {v} (first on line {seen[(u, v)]})", lineno
            )
        seen[(u, v)] = lineno
        edges.append((u, v, m))
    return Multigraph(n, tuple(sorted(edges)))
