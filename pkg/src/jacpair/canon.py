"""Canonical labeling of small multigraphs.

Colour refinement on (colour, multiset of (neighbour colour, multiplicity))
followed by individualization of the first non-singleton cell; among all
discrete leaves the lexicographically smallest relabeled edge list wins.
Fine for the graph sizes enumerated here (a few dozen vertices at most).
"""

from __future__ import annotations

from .graphs import Multigraph

EdgeKey = tuple[tuple[int, int, int], ...]


def _rank(signatures: list) -> list[int]:
    order = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return [order[s] for s in signatures]


def _refine(adj, colors: list[int]) -> list[int]:
    n = len(colors)
    classes = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted((colors[w], m) for w, m in adj[v].items())))
            for v in range(n)
        ]
        new = _rank(sigs)
        count = len(set(new))
        if count == classes:
            return new
        colors, classes = new, count


def _relabel(G: Multigraph, perm: list[int]) -> EdgeKey:
    out = []
    for u, v, m in G.edges:
        a, b = perm[u], perm[v]
        out.append((a, b, m) if a < b else (b, a, m))
    return tuple(sorted(out))


def canonical_labeling(G: Multigraph) -> tuple[EdgeKey, list[int]]:
    """(canonical edge key, permutation old -> new) for G."""
    n = G.vertex_count
    adj = G.adjacency
    start = _refine(adj, [0] * n)
    best: list = [None, None]

    def search(colors: list[int]) -> None:
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = c
                break
        if target is None:
            key = _relabel(G, colors)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, list(colors)
            return
        for v in cells[target]:
            split = [(c, 0 if (u == v or c != target) else 1) for u, c in enumerate(colors)]
            search(_refine(adj, _rank(split)))

    search(start)
    return best[0], best[1]


def canonical_key(G: Multigraph) -> tuple[int, EdgeKey]:
    return (G.vertex_count, canonical_labeling(G)[0])


def canonical_form(G: Multigraph) -> Multigraph:
    key, _ = canonical_labeling(G)
    return Multigraph(G.vertex_count, key)
