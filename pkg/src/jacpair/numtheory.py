"""Quadratic residues, primality, and the nonresidue-prime searches.

The s-tuples built here feed the subdivided banana construction: a tuple
with sum_i prod_{j != i} s_j = p^r, every s_i prime to p, and prod s_i a
quadratic nonresidue mod p gives the nonresidue pairing on Z/p^r.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Iterator

from .errors import NoWitness, PreconditionError


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


legendre = jacobi

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# the first twelve prime bases are a deterministic witness set below this bound
_DETERMINISTIC_LIMIT = 318665857834031151167461


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin; exact below 3.1e23, error below 2^-128 above that."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_mr_round(n, d, s, a) for a in _SMALL_PRIMES):
        return False
    if n < _DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(n)
    return all(_mr_round(n, d, s, rng.randrange(2, n - 1)) for _ in range(64))


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; inputs here are group orders, so small."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    """(p, r) with n = p^r, or None."""
    if n < 2:
        return None
    f = factorize(n)
    if len(f) != 1:
        return None
    return next(iter(f.items()))


def sqrt_mod_prime(a: int, q: int) -> int:
    """A square root of a modulo the odd prime q (Tonelli-Shanks)."""
    a %= q
    if a == 0:
        return 0
    if jacobi(a, q) != 1:
        raise PreconditionError(f"{a} is not a square modulo {q}")
    if q % 4 == 3:
        return pow(a, (q + 1) // 4, q)
    Q, S = q - 1, 0
    while Q % 2 == 0:
        Q //= 2
        S += 1
    z = 2
    while jacobi(z, q) != -1:
        z += 1
    M, c, t, R = S, pow(z, Q, q), pow(a, Q, q), pow(a, (Q + 1) // 2, q)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % q
            i += 1
        b = pow(c, 1 << (M - i - 1), q)
        M, c, t, R = i, b * b % q, t * b * b % q, R * b % q
    return R


def _below_bound(q: int, p: int, r: int, multiplier: Fraction) -> bool:
    # q < multiplier * 2 * p^(r/2), compared exactly by squaring
    return q * q < 4 * multiplier * multiplier * p**r


def find_nonresidue_prime(
    p: int, r: int = 1, multiplier: Fraction | int = 1, residue_mod4: int = 3
) -> int | None:
    """Smallest prime q ≡ residue_mod4 (mod 4), (q/p) = -1, q < 2·p^(r/2)·multiplier."""
    if p < 3 or not is_prime(p):
        raise PreconditionError(f"p must be an odd prime, got {p}")
    if r < 1:
        raise PreconditionError(f"r must be >= 1, got {r}")
    multiplier = Fraction(multiplier)
    q = residue_mod4
    while _below_bound(q, p, r, multiplier):
        if is_prime(q) and jacobi(q, p) == -1:
            return q
        q += 4
    return None


def split_prime(q: int, k: int) -> int:
    """Smallest 0 < a < q with a(q - a) ≡ k (mod q).

    Needs (k/q) = (-1/q); the solutions are the square roots of -k.
    """
    if q < 3 or not is_prime(q):
        raise PreconditionError(f"q must be an odd prime, got {q}")
    if k % q == 0:
        raise PreconditionError(f"k = {k} is divisible by q = {q}")
    if jacobi(k, q) != jacobi(-1, q):
        raise PreconditionError(
            f"Legendre condition fails: ({k}/{q}) = {jacobi(k, q)} "
            f"but (-1/{q}) = {jacobi(-1, q)}"
        )
    a = sqrt_mod_prime(-k, q)
    return min(a, q - a)


@dataclass(frozen=True)
class NonresidueCertificate:
    p: int
    r: int
    q: int
    a: int

    def problems(self) -> list[str]:
        out = []
        if self.q % 4 != 3:
            out.append("q is not 3 mod 4")
        if jacobi(self.q, self.p) != -1:
            out.append("q is a residue mod p")
        if not _below_bound(self.q, self.p, self.r, Fraction(1)):
            out.append("q exceeds 2 p^(r/2)")
        if not 0 < self.a < self.q or (self.a * (self.q - self.a) - self.p**self.r) % self.q:
            out.append("a(q - a) is not p^r mod q")
        return out

    @property
    def valid(self) -> bool:
        return not self.problems()


def tree_sum(s: tuple[int, ...]) -> int:
    """sum_i prod_{j != i} s_j: the spanning-tree count of the subdivided banana."""
    total = math.prod(s)
    return sum(total // x for x in s)


def _finish(s) -> tuple[int, ...]:
    return tuple(sorted(int(x) for x in s))


def nonresidue_tuple(
    p: int, r: int = 1, multiplier: Fraction | int = 1
) -> tuple[int, ...]:
    """An s-tuple whose subdivided banana carries the nonresidue pairing on Z/p^r."""
    if p < 3 or not is_prime(p):
        raise PreconditionError(f"p must be an odd prime, got {p}")
    if r < 1:
        raise PreconditionError(f"r must be >= 1, got {r}")
    n = p**r
    if p % 4 == 3:
        return _finish((1, n - 1))
    if p % 8 == 5:
        return _finish((1, 1, (n - 1) // 2))
    if p % 3 == 2:
        # p ≡ 17 (mod 24): 2 is a square but 3 is not
        if r % 2:
            return _finish((1, 2, (n - 2) // 3))
        return _finish((1, 1, 1, (n - 1) // 3))
    return q_search_tuple(p, r, multiplier)


def q_search_tuple(p: int, r: int, multiplier: Fraction | int = 1) -> tuple[int, ...]:
    """(a, q - a, (p^r - a(q - a))/q) from a nonresidue prime q below the bound.

    Odd r needs q ≡ 3 (mod 4); for even r, p^r is a square mod q so the
    split needs (-1/q) = 1, i.e. q ≡ 1 (mod 4).
    """
    n = p**r
    multiplier = Fraction(multiplier)
    cls = 3 if r % 2 else 1
    q = cls
    while _below_bound(q, p, r, multiplier):
        if is_prime(q) and jacobi(q, p) == -1:
            a = split_prime(q, n % q)
            rest = n - a * (q - a)
            if rest > 0 and a % p and (q - a) % p:
                return _finish((a, q - a, rest // q))
        q += 4
    bound = "2*p^(r/2)" if multiplier == 1 else f"{multiplier}*2*p^(r/2)"
    raise NoWitness(p, r, bound)


def two_group_tuple(r: int) -> tuple[int, ...]:
    """(1, 2, (2^r - 2)/3) for odd r, (1, 1, 1, (2^r - 1)/3) for even r."""
    if r < 3:
        raise PreconditionError(f"the C/D tuples need r >= 3, got {r}")
    if r % 2:
        return (1, 2, (2**r - 2) // 3)
    return (1, 1, 1, (2**r - 1) // 3)


# -- bulk verification -------------------------------------------------------


def segmented_primes(lo: int, hi: int, segment: int = 1 << 16) -> Iterator[int]:
    """Primes p with lo <= p <= hi, in increasing order."""
    if hi < 2:
        return
    root = math.isqrt(hi)
    small = bytearray([1]) * (root + 1)
    small[:2] = b"\x00\x00"
    for i in range(2, math.isqrt(root) + 1):
        if small[i]:
            small[i * i :: i] = bytearray(len(small[i * i :: i]))
    base = [i for i in range(2, root + 1) if small[i]]
    start = max(lo, 2)
    while start <= hi:
        stop = min(start + segment, hi + 1)
        seg = bytearray([1]) * (stop - start)
        for p in base:
            first = max(p * p, (start + p - 1) // p * p)
            if first >= stop:
                continue
            seg[first - start :: p] = bytearray(len(seg[first - start :: p]))
        for i, flag in enumerate(seg):
            if flag:
                yield start + i
        start = stop


@dataclass
class QRangeReport:
    checked: int = 0
    failures: list[int] = field(default_factory=list)
    max_q: int = 0
    max_ratio: Fraction = Fraction(0)
    rows: list[tuple[int, int, int | None]] = field(default_factory=list)

    def summary(self) -> str:
        return (
            f"checked={self.checked} failures={len(self.failures)} "
            f"max_q={self.max_q} max_ratio={format_ratio(self.max_ratio)}"
        )


def _sqrt_decimal(x: Fraction, places: int = 40) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = places
        return (Decimal(x.numerator) / Decimal(x.denominator)).sqrt()


def format_ratio(ratio_squared: Fraction) -> str:
    """Format sqrt(ratio_squared) with six decimals."""
    with localcontext() as ctx:
        ctx.prec = 40
        value = _sqrt_decimal(ratio_squared)
        return str(value.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def _scan(lo: int, hi: int, filter_1mod24: bool, certificates: bool) -> QRangeReport:
    rep = QRangeReport()
    for p in segmented_primes(max(lo, 3), hi):
        if filter_1mod24 and p % 24 != 1:
            continue
        rep.checked += 1
        q = find_nonresidue_prime(p, 1)
        if q is None:
            rep.failures.append(p)
            continue
        # q^2 / p tracks (q / sqrt p)^2 exactly
        ratio = Fraction(q * q, p)
        rep.max_q = max(rep.max_q, q)
        rep.max_ratio = max(rep.max_ratio, ratio)
        if certificates:
            k = p % q
            a = split_prime(q, k) if jacobi(k, q) == jacobi(-1, q) else None
            rep.rows.append((p, q, a))
    return rep


def verify_q_range(
    bound: int,
    filter_1mod24: bool = False,
    certificates: bool = False,
    jobs: int = 1,
) -> QRangeReport:
    """Check that every odd prime p <= bound has a nonresidue prime q ≡ 3 (mod 4), q < 2√p."""
    if jobs <= 1 or bound < 10_000:
        return _scan(3, bound, filter_1mod24, certificates)
    step = -(-bound // jobs)
    ranges = [(lo, min(lo + step - 1, bound)) for lo in range(1, bound + 1, step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(
            pool.map(
                _scan,
                [a for a, _ in ranges],
                [b for _, b in ranges],
                [filter_1mod24] * len(ranges),
                [certificates] * len(ranges),
            )
        )
    merged = QRangeReport()
    for part in parts:
        merged.checked += part.checked
        merged.failures += part.failures
        merged.max_q = max(merged.max_q, part.max_q)
        merged.max_ratio = max(merged.max_ratio, part.max_ratio)
        merged.rows += part.rows
    return merged


def certificate_rows(report: QRangeReport) -> list[str]:
    lines = ["p q a ratio"]
    for p, q, a in report.rows:
        lines.append(f"{p} {q} {'-' if a is None else a} {format_ratio(Fraction(q * q, p))}")
    return lines
