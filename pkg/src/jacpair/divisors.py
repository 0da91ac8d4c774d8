"""Divisors on a multigraph: principal divisors, reduction, class order.

Divisors and potential functions are tuples of ints indexed by vertex.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .errors import DivisorError
from .graphs import Multigraph, bfs_distances, check_vertex, require_connected

Divisor = tuple[int, ...]


def _check_length(G: Multigraph, values: Sequence[int], what: str) -> None:
    if len(values) != G.vertex_count:
        raise DivisorError(
            f"{what} has length {len(values)}, graph has {G.vertex_count} vertices"
        )


def degree(D: Sequence[int]) -> int:
    return sum(D)


def indicator(n: int, v: int, coeff: int = 1) -> Divisor:
    D = [0] * n
    D[v] = coeff
    return tuple(D)


def vertex_difference(n: int, v: int, w: int) -> Divisor:
    """The divisor v - w."""
    D = [0] * n
    D[v] += 1
    D[w] -= 1
    return tuple(D)


def add(D1: Sequence[int], D2: Sequence[int]) -> Divisor:
    return tuple(a + b for a, b in zip(D1, D2))


def scale(c: int, D: Sequence[int]) -> Divisor:
    return tuple(c * a for a in D)


def div_of(G: Multigraph, f: Sequence[int]) -> Divisor:
    """Principal divisor of f: at v, the sum over neighbours w of f(v) - f(w)."""
    _check_length(G, f, "potential")
    out = [0] * G.vertex_count
    for u, v, m in G.edges:
        d = m * (f[u] - f[v])
        out[u] += d
        out[v] -= d
    return tuple(out)


def fire(G: Multigraph, D: Sequence[int], v: int, times: int = 1) -> Divisor:
    """Chip-fire v ``times`` times (negative values borrow)."""
    out = list(D)
    out[v] -= times * G.valences[v]
    for w, m in G.adjacency[v].items():
        out[w] += times * m
    return tuple(out)


def _burn(G: Multigraph, D: Sequence[int], base: int) -> set[int]:
    """Run the burning process from base; return the unburnt vertices."""
    adj = G.adjacency
    burnt_edges = [0] * G.vertex_count
    burnt = {base}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for w, m in adj[u].items():
            if w in burnt:
                continue
            burnt_edges[w] += m
            if burnt_edges[w] > D[w]:
                burnt.add(w)
                queue.append(w)
    return set(range(G.vertex_count)) - burnt


def is_reduced(G: Multigraph, D: Sequence[int], base: int) -> bool:
    """Burning test: nonnegative away from base and the fire burns everything."""
    _check_length(G, D, "divisor")
    if any(D[v] < 0 for v in range(G.vertex_count) if v != base):
        return False
    return not _burn(G, D, base)


def dhar_reduce(G: Multigraph, D: Sequence[int], base: int = 0) -> Divisor:
    """The unique base-reduced divisor equivalent to D.

    Debts away from base are first cleared by borrowing (farthest vertices
    first); then the unburnt set of Dhar's process is fired until the fire
    consumes the whole graph.
    """
    require_connected(G)
    check_vertex(G, base, "base vertex")
    _check_length(G, D, "divisor")
    n = G.vertex_count
    if n == 1:
        return tuple(D)
    val = G.valences
    adj = G.adjacency
    if max(abs(a) for v, a in enumerate(D) if v != base) > 2 * max(val):
        # large entries make chip-firing slow; jump close to the answer first
        from .jacobian import jacobian

        D = jacobian(G, base).shrink(D)
    cur = list(D)

    dist = bfs_distances(G, base)
    order = sorted((v for v in range(n) if v != base), key=lambda v: (-dist[v], v))
    while True:
        debtors = [v for v in order if cur[v] < 0]
        if not debtors:
            break
        for v in debtors:
            if cur[v] >= 0:
                continue
            k = -(cur[v] // val[v])  # ceil(-cur[v] / val[v])
            cur[v] += k * val[v]
            for w, m in adj[v].items():
                cur[w] -= k * m

    while True:
        unburnt = _burn(G, cur, base)
        if not unburnt:
            return tuple(cur)
        outdeg = {}
        for v in unburnt:
            outdeg[v] = sum(m for w, m in adj[v].items() if w not in unburnt)
        # firing the unburnt set repeatedly stays effective while every
        # vertex can pay its out-degree
        times = min(cur[v] // outdeg[v] for v in unburnt if outdeg[v])
        for v in unburnt:
            d = outdeg[v]
            if d:
                cur[v] -= times * d
                for w, m in adj[v].items():
                    if w not in unburnt:
                        cur[w] += times * m


def is_equivalent(G: Multigraph, D1: Sequence[int], D2: Sequence[int]) -> bool:
    _check_length(G, D1, "divisor")
    _check_length(G, D2, "divisor")
    if sum(D1) != sum(D2):
        return False
    diff = tuple(a - b for a, b in zip(D1, D2))
    return not any(dhar_reduce(G, diff, 0))


def _require_degree_zero(D: Sequence[int]) -> None:
    if sum(D) != 0:
        raise DivisorError(f"expected a degree-0 divisor, degree is {sum(D)}")


def class_order(G: Multigraph, D: Sequence[int], base: int = 0) -> int:
    """Least m >= 1 with m·D principal, read off invariant-factor coordinates."""
    from .jacobian import jacobian

    _check_length(G, D, "divisor")
    _require_degree_zero(D)
    return jacobian(G, base).order_of(D)


def class_order_naive(G: Multigraph, D: Sequence[int], limit: int | None = None) -> int:
    """Reference order by repeated addition and reduction; for small orders."""
    _check_length(G, D, "divisor")
    _require_degree_zero(D)
    acc = tuple(D)
    m = 1
    while any(dhar_reduce(G, acc, 0)):
        m += 1
        if limit is not None and m > limit:
            raise DivisorError(f"order exceeds limit {limit}")
        acc = add(acc, D)
    return m


def parse_divisor(text: str, n: int) -> Divisor:
    """Parse ``"0:-1,3:1"``; unlisted vertices are 0, repeats accumulate."""
    D = [0] * n
    text = text.strip()
    if not text:
        return tuple(D)
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            idx, val = item.split(":")
            v, c = int(idx), int(val)
        except ValueError:
            raise DivisorError(f"malformed divisor entry {item!r}") from None
        if not 0 <= v < n:
            raise DivisorError(f"vertex {v} out of range for {n} vertices")
        D[v] += c
    return tuple(D)


def format_divisor(D: Sequence[int]) -> str:
    items = [f"{v}:{c}" for v, c in enumerate(D) if c]
    return ",".join(items) if items else ""
