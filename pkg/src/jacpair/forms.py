"""Finite abelian groups with a Q/Z-valued symmetric pairing.

A :class:`GroupWithPairing` is given on a basis g_1, ..., g_k of a direct
sum Z/o_1 ⊕ ... ⊕ Z/o_k together with the Gram matrix of pairings. The
classifier splits it orthogonally into the standard blocks:

* odd cyclic ``p^r:res`` / ``p^r:nonres`` (pairing a·xy/p^r, class = (a/p));
* cyclic 2-blocks ``2^r:A|B|C|D`` with numerators 1, -1, 5, -5 mod 8;
* rank-two 2-blocks ``E:2^r`` (hyperbolic) and ``F:2^r``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import PairingError, SpecError
from .linalg import smith_normal_form
from .numtheory import factorize, is_prime, jacobi

Gram = tuple[tuple[Fraction, ...], ...]

ISOMETRY_BOUND = 2**10


def _frac(x) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True, init=False)
class GroupWithPairing:
    """Basis orders and Gram matrix, entries reduced to [0, 1)."""

    orders: tuple[int, ...]
    gram: Gram

    def __init__(self, orders: Sequence[int], gram: Sequence[Sequence]):
        orders = tuple(int(o) for o in orders)
        k = len(orders)
        if any(o < 1 for o in orders):
            raise PairingError("basis orders must be positive")
        if len(gram) != k or any(len(row) != k for row in gram):
            raise PairingError(f"gram must be {k}x{k}")
        G = tuple(tuple(_frac(x) for x in row) for row in gram)
        for i in range(k):
            for j in range(k):
                if G[i][j] != G[j][i]:
                    raise PairingError(f"gram is not symmetric at ({i}, {j})")
                if (orders[i] * G[i][j]).denominator != 1:
                    raise PairingError(
                        f"order {orders[i]} times gram[{i}][{j}] = {G[i][j]} is not integral"
                    )
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "gram", G)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        if not self.orders:
            return ()
        n = len(self.orders)
        S = smith_normal_form([[self.orders[i] if i == j else 0 for j in range(n)] for i in range(n)]).S
        return tuple(S[i][i] for i in range(n) if S[i][i] > 1)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.gram[i]
                for j, yj in enumerate(y):
                    if yj:
                        total += xi * yj * row[j]
        return total % 1

    def element_order(self, x: Sequence[int]) -> int:
        out = 1
        for c, o in zip(x, self.orders):
            d = o // math.gcd(c, o)
            out = out * d // math.gcd(out, d)
        return out

    def elements(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(o) for o in self.orders))

    def dual_image_order(self) -> int:
        """Order of the image of x -> <x, .> in the dual group."""
        k = self.rank
        if k == 0:
            return 1
        N = 1
        for row in self.gram:
            for x in row:
                N = N * x.denominator // math.gcd(N, x.denominator)
        # the image is (Z^k + G Z^k) / Z^k; scaled by N it is spanned by [N·I | N·G]
        M = [[N if i == j else 0 for j in range(k)] + [int(N * x) for x in self.gram[i]] for i in range(k)]
        S = smith_normal_form(M).S
        index = math.prod(S[i][i] for i in range(k))
        return N**k // index

    def is_nondegenerate(self) -> bool:
        return self.dual_image_order() == self.order

    def restrict(self, vectors: Sequence[Sequence[int]], orders: Sequence[int]) -> GroupWithPairing:
        """Pairing on the subgroup spanned by the given independent vectors."""
        k = len(vectors)
        gram = [[self.pair(vectors[i], vectors[j]) for j in range(k)] for i in range(k)]
        return GroupWithPairing(orders, gram)

    def p_part(self, p: int) -> GroupWithPairing:
        """The p-primary component with the restricted pairing."""
        vecs, ords = [], []
        for i, o in enumerate(self.orders):
            q = 1
            while o % p == 0:
                o //= p
                q *= p
            if q > 1:
                v = [0] * self.rank
                v[i] = o
                vecs.append(v)
                ords.append(q)
        return self.restrict(vecs, ords)

    def primes(self) -> list[int]:
        ps: set[int] = set()
        for o in self.orders:
            ps.update(factorize(o))
        return sorted(ps)


def direct_sum(parts: Iterable[GroupWithPairing]) -> GroupWithPairing:
    orders: list[int] = []
    blocks: list[Gram] = []
    for g in parts:
        orders.extend(g.orders)
        blocks.append(g.gram)
    k = len(orders)
    gram = [[Fraction(0)] * k for _ in range(k)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                gram[off + i][off + j] = x
        off += len(b)
    return GroupWithPairing(orders, gram)


# -- blocks ----------------------------------------------------------------


@dataclass(frozen=True)
class OddCyclic:
    p: int
    r: int
    residue: bool

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise SpecError(f"odd block needs an odd prime, got {self.p}")
        if self.r < 1:
            raise SpecError(f"exponent must be >= 1, got {self.r}")

    @property
    def sort_key(self):
        return (self.p, self.r, "res" if self.residue else "nonres")

    def text(self) -> str:
        return f"{self.p}^{self.r}:{'res' if self.residue else 'nonres'}"

    def pairing(self) -> GroupWithPairing:
        q = self.p**self.r
        a = 1 if self.residue else smallest_nonresidue(self.p)
        return GroupWithPairing((q,), ((Fraction(a, q),),))


TWO_NUMERATORS = {"A": 1, "B": -1, "C": 5, "D": -5}
_MIN_R = {"A": 1, "B": 2, "C": 3, "D": 3}


@dataclass(frozen=True)
class TwoCyclic:
    r: int
    letter: str

    def __post_init__(self):
        if self.letter not in TWO_NUMERATORS:
            raise SpecError(f"unknown 2-block letter {self.letter!r}")
        need = _MIN_R[self.letter]
        if self.r < need:
            raise SpecError(f"{self.letter} requires r >= {need}, got r = {self.r}")

    @property
    def sort_key(self):
        return (2, self.r, self.letter)

    def text(self) -> str:
        return f"2^{self.r}:{self.letter}"

    def pairing(self) -> GroupWithPairing:
        q = 2**self.r
        return GroupWithPairing((q,), ((Fraction(TWO_NUMERATORS[self.letter], q),),))


@dataclass(frozen=True)
class Exceptional:
    """E (hyperbolic plane) or F on (Z/2^r)^2."""

    kind: str
    r: int

    def __post_init__(self):
        if self.kind not in ("E", "F"):
            raise SpecError(f"unknown exceptional block {self.kind!r}")
        if self.r < 1 or (self.kind == "F" and self.r < 2):
            raise SpecError(f"{self.kind} requires r >= {2 if self.kind == 'F' else 1}, got r = {self.r}")

    @property
    def sort_key(self):
        return (2, self.r, self.kind)

    def text(self) -> str:
        return f"{self.kind}:2^{self.r}"

    def pairing(self) -> GroupWithPairing:
        q = 2**self.r
        off = Fraction(1, q)
        diag = Fraction(0) if self.kind == "E" else Fraction(2, q)
        return GroupWithPairing((q, q), ((diag, off), (off, diag)))


Block = Union[OddCyclic, TwoCyclic, Exceptional]

TRIVIAL_TEXT = "0"


@dataclass(frozen=True)
class PairingDecomposition:
    blocks: tuple[Block, ...]

    def __init__(self, blocks: Iterable[Block]):
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=lambda b: b.sort_key)))

    def text(self) -> str:
        return " + ".join(b.text() for b in self.blocks) if self.blocks else TRIVIAL_TEXT

    __str__ = text

    def pairing(self) -> GroupWithPairing:
        return direct_sum(b.pairing() for b in self.blocks)

    @property
    def order(self) -> int:
        return math.prod(b.pairing().order for b in self.blocks)

    def canonical(self) -> PairingDecomposition:
        """Normalize the odd part: per (p, r) at most one nonresidue block.

        Two nonresidue blocks of equal (p, r) are isometric to two residue
        ones, so only the parity of the nonresidue count is invariant.
        2-blocks are left as they are.
        """
        out: list[Block] = []
        groups: dict[tuple[int, int], list[OddCyclic]] = {}
        for b in self.blocks:
            if isinstance(b, OddCyclic):
                groups.setdefault((b.p, b.r), []).append(b)
            else:
                out.append(b)
        for (p, r), bs in groups.items():
            odd = sum(not b.residue for b in bs) % 2
            out.extend(OddCyclic(p, r, True) for _ in range(len(bs) - odd))
            if odd:
                out.append(OddCyclic(p, r, False))
        return PairingDecomposition(out)

    def two_part(self) -> PairingDecomposition:
        return PairingDecomposition(b for b in self.blocks if not isinstance(b, OddCyclic))

    def odd_part(self) -> PairingDecomposition:
        return PairingDecomposition(b for b in self.blocks if isinstance(b, OddCyclic))


def smallest_nonresidue(p: int) -> int:
    a = 2
    while jacobi(a, p) != -1:
        a += 1
    return a


# -- text form ---------------------------------------------------------------


def _parse_prime_power(text: str, pos: int) -> tuple[int, int]:
    base, sep, exp = text.partition("^")
    try:
        p = int(base)
        r = int(exp) if sep else 1
    except ValueError:
        raise SpecError(f"expected p^r, got {text!r}", pos) from None
    if p < 2 or not is_prime(p):
        raise SpecError(f"{p} is not prime", pos)
    if r < 1:
        raise SpecError(f"exponent must be >= 1, got {r}", pos)
    return p, r


def parse_decomposition(text: str) -> PairingDecomposition:
    """Parse ``"2^3:C + 5^1:nonres"``; ``"0"`` is the trivial group."""
    stripped = text.strip()
    if not stripped:
        raise SpecError("empty decomposition", 0)
    if stripped == TRIVIAL_TEXT:
        return PairingDecomposition(())
    blocks: list[Block] = []
    pos = 0
    for raw in text.split("+"):
        start = pos + len(raw) - len(raw.lstrip())
        item = raw.strip()
        pos += len(raw) + 1
        if not item:
            raise SpecError("empty block", start)
        head, sep, tail = item.partition(":")
        if not sep:
            raise SpecError(f"block {item!r} lacks ':'", start)
        try:
            if head in ("E", "F"):
                p, r = _parse_prime_power(tail, start + 2)
                if p != 2:
                    raise SpecError(f"{head} blocks live on 2-groups, got base {p}", start)
                blocks.append(Exceptional(head, r))
                continue
            p, r = _parse_prime_power(head, start)
            if p == 2:
                if tail not in TWO_NUMERATORS:
                    raise SpecError(f"2-block class must be A, B, C or D, got {tail!r}", start)
                blocks.append(TwoCyclic(r, tail))
            else:
                if tail not in ("res", "nonres"):
                    raise SpecError(f"odd block class must be res or nonres, got {tail!r}", start)
                blocks.append(OddCyclic(p, r, tail == "res"))
        except SpecError as exc:
            if exc.position is None:
                raise SpecError(str(exc), start) from None
            raise
    return PairingDecomposition(blocks)


# -- classification ----------------------------------------------------------


def _inverse(a: int, m: int) -> int:
    return pow(a, -1, m)


class _PrimeSplitter:
    """Orthogonal splitting of a p-group with pairing given on a basis."""

    def __init__(self, part: GroupWithPairing, p: int):
        self.G = part
        self.p = p
        k = part.rank
        self.basis: list[tuple[list[int], int]] = []
        for i, o in enumerate(part.orders):
            v = [0] * k
            v[i] = 1
            self.basis.append((v, o.bit_length() - 1 if p == 2 else _exponent(o, p)))

    def num(self, x, y, e: int) -> int:
        """p^e·<x, y>, which must be an integer."""
        val = self.G.pair(x, y) * self.p**e
        if val.denominator != 1:
            raise PairingError("internal inconsistency: pairing denominator exceeds block order")
        return val.numerator

    def _reduce(self, v: list[int]) -> list[int]:
        return [c % o for c, o in zip(v, self.G.orders)]

    def _project(self, pivots: list[list[int]], inv_matrix, e: int) -> None:
        """Make every remaining basis vector orthogonal to the pivots."""
        m = self.p**e
        t = len(pivots)
        for idx, (y, ey) in enumerate(self.basis):
            cs = [self.num(y, x, e) for x in pivots]
            coeffs = [sum(inv_matrix[a][b] * cs[b] for b in range(t)) % m for a in range(t)]
            new = list(y)
            for c, x in zip(coeffs, pivots):
                if c:
                    for i, xi in enumerate(x):
                        new[i] -= c * xi
            self.basis[idx] = (self._reduce(new), ey)

    def _take(self, *indices: int):
        out = [self.basis[i][0] for i in indices]
        for i in sorted(indices, reverse=True):
            del self.basis[i]
        return out

    def split(self) -> list[Block]:
        blocks: list[Block] = []
        while self.basis:
            e = max(ey for _, ey in self.basis)
            if self.p == 2:
                blocks.append(self._split_two(e))
            else:
                blocks.append(self._split_odd(e))
        return blocks

    def _split_odd(self, e: int) -> Block:
        p, m = self.p, self.p**e
        top = [i for i, (_, ey) in enumerate(self.basis) if ey == e]
        x_idx, x = None, None
        for i in top:
            if self.num(self.basis[i][0], self.basis[i][0], e) % p:
                x_idx, x = i, self.basis[i][0]
                break
        if x is None:
            for i in top:
                for j in range(len(self.basis)):
                    if j == i:
                        continue
                    cand = self._reduce([a + b for a, b in zip(self.basis[i][0], self.basis[j][0])])
                    if self.num(cand, cand, e) % p:
                        x_idx, x = i, cand
                        break
                if x is not None:
                    break
        if x is None:
            raise PairingError(f"degenerate pairing on the {p}-part")
        a = self.num(x, x, e) % m
        self._take(x_idx)
        self._project([x], [[_inverse(a, m)]], e)
        return OddCyclic(p, e, jacobi(a, p) == 1)

    def _split_two(self, e: int) -> Block:
        m = 2**e
        top = [i for i, (_, ey) in enumerate(self.basis) if ey == e]
        for i in top:
            x = self.basis[i][0]
            a = self.num(x, x, e) % m
            if a % 2:
                self._take(i)
                self._project([x], [[_inverse(a, m)]], e)
                return TwoCyclic(e, _two_letter(e, a))
        for i, j in itertools.combinations(top, 2):
            x, y = self.basis[i][0], self.basis[j][0]
            b = self.num(x, y, e)
            if b % 2 == 0:
                continue
            al, ga = self.num(x, x, e), self.num(y, y, e)
            det = al * ga - b * b
            inv_det = _inverse(det % m, m)
            inv = [[ga * inv_det % m, -b * inv_det % m], [-b * inv_det % m, al * inv_det % m]]
            self._take(i, j)
            self._project([x, y], inv, e)
            if e == 1 or det % 8 == 7:
                return Exceptional("E", e)
            return Exceptional("F", e)
        raise PairingError("degenerate pairing on the 2-part")


def _exponent(o: int, p: int) -> int:
    e = 0
    while o % p == 0:
        o //= p
        e += 1
    return e


def _two_letter(e: int, a: int) -> str:
    if e == 1:
        return "A"
    if e == 2:
        return "A" if a % 4 == 1 else "B"
    return {1: "A", 7: "B", 5: "C", 3: "D"}[a % 8]


def classify(gamma: GroupWithPairing) -> PairingDecomposition:
    """Orthogonal decomposition into standard blocks; rejects degenerate input."""
    if not gamma.is_nondegenerate():
        raise PairingError("pairing is degenerate")
    blocks: list[Block] = []
    for p in gamma.primes():
        blocks.extend(_PrimeSplitter(gamma.p_part(p), p).split())
    return PairingDecomposition(blocks).canonical()


# -- isometry test -----------------------------------------------------------


def isometric(g1: GroupWithPairing, g2: GroupWithPairing, bound: int = ISOMETRY_BOUND) -> bool:
    """Exhaustive search for a pairing-preserving group isomorphism.

    Generators of g1 are sent, one at a time, to elements of g2 of the same
    order whose pairings with the earlier images match. For a nondegenerate
    g1 any such map is injective, hence bijective when orders agree.
    """
    if g1.order > bound or g2.order > bound:
        raise PairingError(f"group order exceeds the isometry search bound {bound}")
    if g1.invariant_factors != g2.invariant_factors:
        return False
    if not g1.is_nondegenerate():
        raise PairingError("isometry search needs a nondegenerate pairing")
    if not g2.is_nondegenerate():
        return False
    for p in g1.primes():
        if not _isometric_pgroup(g1.p_part(p), g2.p_part(p)):
            return False
    return True


def _isometric_pgroup(a: GroupWithPairing, b: GroupWithPairing) -> bool:
    elems = list(b.elements())
    by_order: dict[int, list[tuple[int, ...]]] = {}
    for x in elems:
        by_order.setdefault(b.element_order(x), []).append(x)
    # largest orders first: fewest candidates, strongest pruning
    order_idx = sorted(range(a.rank), key=lambda i: -a.orders[i])
    images: list[tuple[int, ...]] = []

    def search(t: int) -> bool:
        if t == len(order_idx):
            return True
        i = order_idx[t]
        target_self = a.gram[i][i]
        for h in by_order.get(a.orders[i], ()):
            if b.pair(h, h) != target_self:
                continue
            if all(b.pair(h, images[s]) == a.gram[i][order_idx[s]] for s in range(t)):
                images.append(h)
                if search(t + 1):
                    return True
                images.pop()
        return False

    return search(0)
