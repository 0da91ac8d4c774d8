"""Exhaustive small-graph enumeration and a Jacobian census.

Two generators live here:

* :func:`enumerate_multigraphs` lists connected multigraphs up to
  isomorphism by vertex count and total multiplicity (test corpus);
* :func:`enumerate_2ec` lists simple 2-edge-connected graphs with at most
  ``max_trees`` spanning trees by ear augmentation.

Every 2-edge-connected graph has an ear decomposition starting at any of
its cycles, and adding an ear of length l to H multiplies the tree count by
at least l, so every intermediate graph stays under the bound and the
closure under "add an ear" starting from cycles reaches every target.
"""

from __future__ import annotations

import os
import tempfile
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import graphs
from .canon import canonical_form, canonical_labeling
from .errors import PreconditionError
from .forms import classify
from .graphs import Multigraph, emit_graph, spanning_tree_count
from .jacobian import gram_matrix, jacobian
from .numtheory import factorize


def _dedupe(candidates: Iterable[Multigraph], into: dict) -> None:
    for H in candidates:
        key, _ = canonical_labeling(H)
        if key not in into:
            into[key] = Multigraph(H.vertex_count, key)


def _sorted(found: dict) -> list[Multigraph]:
    return [found[k] for k in sorted(found)]


def _trees(n: int) -> list[Multigraph]:
    """Unlabeled trees on n vertices, grown leaf by leaf."""
    level = {(): Multigraph(1, ())}
    for k in range(1, n):
        nxt: dict = {}
        _dedupe(
            (Multigraph.from_edges(k + 1, T.edges + ((v, k, 1),)) for T in level.values() for v in range(k)),
            nxt,
        )
        level = nxt
    return _sorted(level)


def enumerate_multigraphs(max_vertices: int, max_multiplicity: int) -> Iterator[Multigraph]:
    """Connected loopless multigraphs up to isomorphism, in canonical form.

    Grown from spanning trees one multiplicity unit at a time; a connected
    graph above tree size always has a unit whose removal keeps it
    connected, so the closure is complete.
    """
    for n in range(1, max_vertices + 1):
        if n - 1 > max_multiplicity:
            break
        level = {canonical_labeling(T)[0]: T for T in _trees(n)}
        total = n - 1
        while True:
            yield from _sorted(level)
            if total == max_multiplicity or n == 1:
                break
            nxt: dict = {}
            pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
            _dedupe(
                (Multigraph.from_edges(n, G.edges + ((u, v, 1),)) for G in level.values() for u, v in pairs),
                nxt,
            )
            level = nxt
            total += 1


def _ears(H: Multigraph, max_len: int, max_vertices: int) -> Iterator[Multigraph]:
    n = H.vertex_count
    adj = H.adjacency
    for u in range(n):
        for v in range(u, n):
            lo = 3 if u == v else (1 if v not in adj[u] else 2)
            for length in range(lo, max_len + 1):
                new = length - 1
                if n + new > max_vertices:
                    break
                path = [u] + list(range(n, n + new)) + [v]
                edges = H.edges + tuple((path[i], path[i + 1], 1) for i in range(length))
                yield Multigraph.from_edges(n + new, edges)


def enumerate_2ec(max_trees: int) -> Iterator[Multigraph]:
    """Simple 2-edge-connected graphs with at most max_trees spanning trees.

    One canonical representative per isomorphism class, ordered by
    (tree count, vertex count, canonical edge list).
    """
    if max_trees < 3:
        raise PreconditionError("max_trees must be at least 3")
    found: dict = {}
    tau: dict = {}
    frontier = []
    for n in range(3, max_trees + 1):
        C = canonical_form(graphs.cycle(n))
        key = C.edges
        found[key], tau[key] = C, n
        frontier.append(key)
    while frontier:
        nxt = []
        for key in frontier:
            H = found[key]
            # a tree-count-t graph plus an ear of length l has >= l·t trees
            max_len = max_trees // tau[key]
            for G in _ears(H, max_len, max_trees):
                t = spanning_tree_count(G)
                if t > max_trees:
                    continue
                k, _ = canonical_labeling(G)
                if k in found:
                    continue
                found[k], tau[k] = Multigraph(G.vertex_count, k), t
                nxt.append(k)
        frontier = nxt
    for k in sorted(found, key=lambda k: (tau[k], found[k].vertex_count, k)):
        yield found[k]


@dataclass(frozen=True)
class CensusRecord:
    canonical_graph: Multigraph
    tree_count: int
    invariant_factors: tuple[int, ...]
    pairing_class: str

    def tsv_row(self) -> str:
        edges = emit_graph(self.canonical_graph).rstrip("\n").replace("\n", ";")
        factors = ",".join(map(str, self.invariant_factors)) or "1"
        return "\t".join(
            [str(self.tree_count), str(self.canonical_graph.vertex_count), factors, self.pairing_class, edges]
        )


@dataclass(frozen=True)
class Census:
    max_trees: int
    records: tuple[CensusRecord, ...]


def _record(G: Multigraph) -> CensusRecord:
    J = jacobian(G)
    return CensusRecord(G, J.order, J.invariant_factors, classify(gram_matrix(J)).text())


def census(max_trees: int, jobs: int = 1) -> Census:
    """One record per graph of :func:`enumerate_2ec`, in the same order."""
    found = list(enumerate_2ec(max_trees))
    if jobs > 1 and len(found) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_record, found, chunksize=8))
    else:
        records = [_record(G) for G in found]
    return Census(max_trees, tuple(records))


CENSUS_HEADER = "trees\tn\tfactors\tclass\tedges"


def census_tsv(c: Census) -> str:
    return "\n".join([CENSUS_HEADER] + [r.tsv_row() for r in c.records]) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".census-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- absence checks ------------------------------------------------------------


def elementary_divisors(factors: Sequence[int]) -> Counter:
    out: Counter = Counter()
    for d in factors:
        for p, e in factorize(d).items():
            out[p**e] += 1
    return out


@dataclass(frozen=True)
class AbsenceVerdict:
    absent: bool
    witnesses: tuple[CensusRecord, ...] = ()

    @property
    def witness_graph(self) -> Multigraph | None:
        if self.absent:
            return None
        G = graphs.cycle(1)
        for r in self.witnesses:
            G = graphs.wedge(G, r.canonical_graph)
        return G

    def text(self) -> str:
        return "ABSENT" if self.absent else "PRESENT"


def check_absence(factors: Sequence[int], max_trees: int, table: Census | None = None) -> AbsenceVerdict:
    """Is there a simple graph whose Jacobian has these invariant factors?

    Contracting bridges and splitting at cut vertices writes any simple
    graph's Jacobian as a direct sum of Jacobians of 2-edge-connected simple
    graphs, each of order at most the target's. So the question reduces to
    splitting the target's elementary divisors among census groups.
    """
    factors = [int(d) for d in factors if int(d) != 1]
    if any(d < 1 for d in factors):
        raise PreconditionError("factors must be positive")
    order = 1
    for d in factors:
        order *= d
    if order > max_trees:
        raise PreconditionError(f"group order {order} exceeds max_trees {max_trees}")
    if table is None:
        table = census(max_trees)
    elif table.max_trees < order:
        raise PreconditionError(f"census bound {table.max_trees} is below the group order {order}")
    target = elementary_divisors(factors)
    if not target:
        # trees have trivial Jacobian
        return AbsenceVerdict(False, ())
    pieces: dict[tuple, CensusRecord] = {}
    for r in table.records:
        key = tuple(sorted(elementary_divisors(r.invariant_factors).items()))
        # prefer the sparsest witness, so cyclic groups are shown as cycles
        if key not in pieces or r.canonical_graph.vertex_count > pieces[key].canonical_graph.vertex_count:
            pieces[key] = r
    options = sorted(pieces)

    def search(rest: Counter, start: int) -> list[CensusRecord] | None:
        if not +rest:
            return []
        for idx in range(start, len(options)):
            need = Counter(dict(options[idx]))
            if all(rest[q] >= c for q, c in need.items()):
                sub = search(rest - need, idx)
                if sub is not None:
                    return [pieces[options[idx]]] + sub
        return None

    found = search(target, 0)
    if found is None:
        return AbsenceVerdict(True)
    return AbsenceVerdict(False, tuple(found))
