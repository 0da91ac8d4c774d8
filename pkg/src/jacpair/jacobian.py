"""Jacobian of a multigraph with explicit generators and the monodromy pairing.

The reduced Laplacian is first shrunk by eliminating unit pivots (every
2-valent vertex on a simple path contributes one), which is a unimodular
change of basis and so preserves the cokernel. The small remainder goes
through the dense Smith form. Realized graphs can have hundreds of
thousands of vertices, almost all of them on subdivided strands, so this
keeps both the group computation and the potential solves linear.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

from .divisors import Divisor, dhar_reduce, div_of
from .errors import DivisorError
from .graphs import Multigraph, check_vertex, require_connected
from .linalg import matvec, smith_decomposition

# generators of graphs up to this size are replaced by their reduced forms
READABLE_LIMIT = 64

_INF = float("inf")


class _Elimination:
    """Unit-pivot elimination record for a sparse square integer system."""

    def __init__(self, rows: dict[int, dict[int, int]]):
        cols: dict[int, set[int]] = {j: set() for j in rows}
        for i, r in rows.items():
            for j in r:
                cols[j].add(i)
        self.steps: list[tuple[int, int, int, dict, dict]] = []
        self._run(rows, cols)
        self.rows = sorted(rows)
        self.cols = sorted(cols)
        self.matrix = [[rows[i].get(j, 0) for j in self.cols] for i in self.rows]

    def _run(self, rows, cols):
        for threshold in (4, 16, 64, _INF):
            queue = sorted(rows)
            queued = set(queue)
            pos = 0
            while pos < len(queue):
                i = queue[pos]
                pos += 1
                queued.discard(i)
                row = rows.get(i)
                if row is None:
                    continue
                best_j, best_c = None, None
                for j, a in row.items():
                    if a == 1 or a == -1:
                        c = len(cols[j])
                        if best_c is None or c < best_c:
                            best_j, best_c = j, c
                if best_j is None or (len(row) - 1) * (best_c - 1) > threshold:
                    continue
                for k in self._eliminate(rows, cols, i, best_j):
                    if k not in queued:
                        queued.add(k)
                        queue.append(k)

    def _eliminate(self, rows, cols, i, j):
        row_i = rows.pop(i)
        s = row_i[j]
        touched = cols.pop(j)
        touched.discard(i)
        colmult = {}
        for k in touched:
            rk = rows[k]
            c = rk.pop(j) * s
            colmult[k] = c
            for l, a in row_i.items():
                if l == j:
                    continue
                nv = rk.get(l, 0) - c * a
                if nv:
                    if l not in rk:
                        cols[l].add(k)
                    rk[l] = nv
                elif l in rk:
                    del rk[l]
                    cols[l].discard(k)
        for l in row_i:
            if l != j:
                cols[l].discard(i)
        self.steps.append((i, j, s, row_i, colmult))
        return touched

    def forward(self, b: dict[int, int]) -> dict[int, int]:
        """Apply the recorded row operations to a right-hand side, in place."""
        for i, _j, _s, _row, colmult in self.steps:
            bi = b.get(i)
            if bi:
                for k, c in colmult.items():
                    b[k] = b.get(k, 0) - c * bi
        return b

    def back_substitute(self, b: dict[int, int], x: dict[int, int]) -> dict[int, int]:
        """Recover eliminated unknowns given the remainder's solution in x."""
        for i, j, s, row_i, _ in reversed(self.steps):
            acc = b.get(i, 0)
            for l, a in row_i.items():
                if l != j:
                    acc -= a * x[l]
            x[j] = s * acc
        return x


class _Chain(NamedTuple):
    start: int
    end: int
    interior: tuple[int, ...]


def _find_chains(G: Multigraph, base: int) -> list[_Chain]:
    """Maximal paths whose interior vertices have two simple edges each."""
    adj = G.adjacency
    # valence 2 spread over two neighbours means both edges are simple
    link = [val == 2 and len(a) == 2 for val, a in zip(G.valences, adj)]
    link[base] = False
    seen = [False] * G.vertex_count
    chains = []
    for u in range(G.vertex_count):
        if link[u]:
            continue
        for x in sorted(adj[u]):
            if not link[x] or seen[x]:
                continue
            path, prev, cur = [], u, x
            while link[cur]:
                seen[cur] = True
                path.append(cur)
                a, b = adj[cur]
                prev, cur = cur, (b if a == prev else a)
            chains.append(_Chain(u, cur, tuple(path)))
    return chains


class _ReducedSystem:
    """The reduced Laplacian with every chain collapsed to a slope unknown.

    Unknowns are f(v) for vertices off chains (base excluded) and one slope
    s_c = f(x_1) - f(start) per chain. Along a chain with interior values
    d_1..d_k of the right-hand side, f(x_i) = f(start) + i·s_c - P_i where
    P_i = sum_{j<i} (i - j)·d_j. Substituting gives a square integer system
    A·z = T(D), and T induces an isomorphism of cokernels.
    """

    def __init__(self, G: Multigraph, base: int):
        n = G.vertex_count
        self.n = n
        self.base = base
        self.chains = _find_chains(G, base)
        where: dict[int, tuple[int, int]] = {}
        for c, ch in enumerate(self.chains):
            for i, v in enumerate(ch.interior, 1):
                where[v] = (c, i)
        self.where = where
        adj = G.adjacency
        rows: dict[int, dict[int, int]] = {}
        for v in range(n):
            if v == base or v in where:
                continue
            r = {v: G.valences[v]}
            for w, m in adj[v].items():
                if w != base and w not in where:
                    r[w] = r.get(w, 0) - m
            rows[v] = r

        def bump(row: int, col: int, val: int) -> None:
            if row == base or col == base:
                return
            r = rows[row]
            nv = r.get(col, 0) + val
            if nv:
                r[col] = nv
            else:
                r.pop(col, None)

        for c, ch in enumerate(self.chains):
            key = n + c
            k = len(ch.interior)
            u, w = ch.start, ch.end
            # at u: -f(x_1) = -f(u) - s_c
            bump(u, u, -1)
            if u != base:
                rows[u][key] = rows[u].get(key, 0) - 1
            # at w: -f(x_k) = -f(u) - k·s_c + P_k
            bump(w, u, -1)
            if w != base:
                rows[w][key] = rows[w].get(key, 0) - k
            # closure: f(w) - f(u) - (k+1)·s_c = -P_{k+1}
            r = {key: -(k + 1)}
            rows[key] = r
            bump(key, w, 1)
            bump(key, u, -1)
        self.elim = _Elimination(rows)

    def transform(self, D: Sequence[int]) -> dict[int, int]:
        """T(D): the right-hand side of the collapsed system."""
        b: dict[int, int] = {}
        per_chain: dict[int, list[tuple[int, int]]] = {}
        where = self.where
        for v, a in enumerate(D):
            if not a or v == self.base:
                continue
            hit = where.get(v)
            if hit is None:
                b[v] = b.get(v, 0) + a
            else:
                per_chain.setdefault(hit[0], []).append((hit[1], a))
        for c, items in per_chain.items():
            ch = self.chains[c]
            k = len(ch.interior)
            key = self.n + c
            b[key] = b.get(key, 0) - sum((k + 1 - i) * a for i, a in items)
            if ch.end != self.base:
                b[ch.end] = b.get(ch.end, 0) - sum((k - i) * a for i, a in items)
        return b

    def section(self, key: int) -> dict[int, int]:
        """A divisor (as a sparse dict) whose image under T is the unit vector at key."""
        if key < self.n:
            return {key: 1}
        return {self.chains[key - self.n].interior[-1]: -1}

    def expand(self, z: dict[int, int], D: Sequence[int]) -> list[int]:
        """Full potential from the collapsed solution z and the right-hand side D."""
        f = [0] * self.n
        for v, val in z.items():
            if v < self.n:
                f[v] = val
        for c, ch in enumerate(self.chains):
            s = z[self.n + c]
            cur = f[ch.start]
            step = s
            for v in ch.interior:
                cur += step
                f[v] = cur
                step -= D[v]
        return f


class JacobianPresentation:
    """Jac(G) = Z/d_1 ⊕ ... ⊕ Z/d_k with d_1 | d_2 | ... | d_k, all d_i > 1.

    ``generators[t]`` is a degree-0 divisor of order ``invariant_factors[t]``;
    ``potentials[t]`` is an integer function f with div(f) = d_t·generators[t]
    and f(base) = 0.
    """

    def __init__(self, G: Multigraph, base: int = 0):
        require_connected(G)
        check_vertex(G, base, "base vertex")
        self.graph = G
        self.base = base
        n = G.vertex_count
        self.invariant_factors: tuple[int, ...] = ()
        self.generators: tuple[Divisor, ...] = ()
        self._positions: list[int] = []
        self._snf = None
        if n == 1:
            self._system = None
            return
        system = _ReducedSystem(G, base)
        self._system = system
        elim = system.elim
        if not elim.rows:
            return
        snf, Ui, _ = smith_decomposition(elim.matrix)
        self._snf = snf
        diag = [snf.S[t][t] for t in range(len(elim.rows))]
        if any(d == 0 for d in diag):
            raise AssertionError("reduced Laplacian of a connected graph is singular")
        self._positions = [t for t, d in enumerate(diag) if d > 1]
        self.invariant_factors = tuple(diag[t] for t in self._positions)
        gens = []
        for t in self._positions:
            D = [0] * n
            for idx, r in enumerate(elim.rows):
                if Ui[idx][t]:
                    for v, a in system.section(r).items():
                        D[v] += Ui[idx][t] * a
            D[base] -= sum(D)
            if n <= READABLE_LIMIT:
                D = dhar_reduce(G, self.shrink(D), base)
            gens.append(tuple(D))
        self.generators = tuple(gens)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        """Maximum order of an element (the largest invariant factor)."""
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def _check(self, D: Sequence[int]) -> None:
        if len(D) != self.graph.vertex_count:
            raise DivisorError("divisor length does not match the graph")
        if sum(D) != 0:
            raise DivisorError(f"expected a degree-0 divisor, degree is {sum(D)}")

    def to_coords(self, D: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of the class of D, each reduced mod its factor."""
        self._check(D)
        if not self.invariant_factors:
            return ()
        elim = self._system.elim
        b = elim.forward(self._system.transform(D))
        vec = [b.get(r, 0) for r in elim.rows]
        y = matvec(self._snf.U, vec)
        return tuple(y[t] % d for t, d in zip(self._positions, self.invariant_factors))

    def from_coords(self, coords: Sequence[int]) -> Divisor:
        if len(coords) != len(self.generators):
            raise DivisorError("coordinate vector has the wrong length")
        out = [0] * self.graph.vertex_count
        for c, g in zip(coords, self.generators):
            if c:
                for v, a in enumerate(g):
                    if a:
                        out[v] += c * a
        return tuple(out)

    def order_of(self, D: Sequence[int]) -> int:
        coords = self.to_coords(D)
        out = 1
        for c, d in zip(coords, self.invariant_factors):
            o = d // math.gcd(c, d)
            out = out * o // math.gcd(out, o)
        return out

    def is_principal(self, D: Sequence[int]) -> bool:
        return not any(self.to_coords(D))

    def _potential(self, D: Sequence[int], rational: bool) -> list:
        system = self._system
        elim = system.elim
        b = elim.forward(system.transform(D))
        x: dict = {}
        if elim.rows:
            U, S, V = self._snf
            c = matvec(U, [b.get(r, 0) for r in elim.rows])
            y = []
            for t, ct in enumerate(c):
                if rational:
                    y.append(Fraction(ct, S[t][t]))
                    continue
                q, rem = divmod(ct, S[t][t])
                if rem:
                    raise DivisorError("divisor is not principal")
                y.append(q)
            for col, val in zip(elim.cols, matvec(V, y)):
                x[col] = val
        elim.back_substitute(b, x)
        return system.expand(x, D)

    def solve(self, D: Sequence[int]) -> tuple[int, ...]:
        """Integer f with div(f) = D and f(base) = 0, for principal D."""
        self._check(D)
        if self._system is None:
            return (0,)
        return tuple(self._potential(D, rational=False))

    def rational_potential(self, D: Sequence[int]) -> list[Fraction]:
        """Rational f with f(base) = 0 and div(f) = D away from the base (any degree)."""
        if len(D) != self.graph.vertex_count:
            raise DivisorError("divisor length does not match the graph")
        if self._system is None:
            return [Fraction(0)]
        return [Fraction(v) for v in self._potential(D, rational=True)]

    def shrink(self, D: Sequence[int]) -> Divisor:
        """An equivalent divisor with entries bounded by the valences off the base.

        Subtracting div(floor(f)) for the rational potential f of D leaves
        div(f - floor(f)), whose entries are below the valences in size.
        """
        if self._system is None:
            return tuple(D)
        f = [x.numerator // x.denominator for x in self.rational_potential(D)]
        principal = div_of(self.graph, f)
        return tuple(a - b for a, b in zip(D, principal))

    @cached_property
    def potentials(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            self.solve(tuple(d * a for a in g))
            for d, g in zip(self.invariant_factors, self.generators)
        )

    def pairing(self, D1: Sequence[int], D2: Sequence[int]) -> Fraction:
        """Monodromy pairing of two degree-0 divisors, in [0, 1)."""
        self._check(D1)
        self._check(D2)
        total = Fraction(0)
        for c, d, f in zip(self.to_coords(D1), self.invariant_factors, self.potentials):
            if c:
                total += Fraction(c * sum(a * fv for a, fv in zip(D2, f) if a), d)
        return total % 1

    @cached_property
    def gram(self):
        """The group-with-pairing on the generators."""
        from .forms import GroupWithPairing

        k = len(self.generators)
        gram = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            f, d = self.potentials[i], self.invariant_factors[i]
            for j in range(i, k):
                g = self.generators[j]
                val = Fraction(sum(a * f[v] for v, a in enumerate(g) if a), d) % 1
                gram[i][j] = gram[j][i] = val
        return GroupWithPairing(self.invariant_factors, gram)


@lru_cache(maxsize=8)
def _cached(G: Multigraph, base: int) -> JacobianPresentation:
    return JacobianPresentation(G, base)


def jacobian(G: Multigraph, base: int = 0) -> JacobianPresentation:
    return _cached(G, base)


def monodromy_pairing(
    G: Multigraph, D1: Sequence[int], D2: Sequence[int], base: int = 0
) -> Fraction:
    """Solve div(f) = m·D1 with m the order of D1; return (1/m)·Σ D2(v) f(v) mod 1."""
    J = jacobian(G, base)
    J._check(D1)
    J._check(D2)
    m = J.order_of(D1)
    f = J.solve(tuple(m * a for a in D1))
    return Fraction(sum(a * fv for a, fv in zip(D2, f)), m) % 1


def gram_matrix(J: JacobianPresentation):
    """The group-with-pairing carried by a Jacobian presentation."""
    return J.gram
