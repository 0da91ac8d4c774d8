from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacpair.errors import NoWitness, PreconditionError
from jacpair.numtheory import (
    NonresidueCertificate,
    certificate_rows,
    factorize,
    find_nonresidue_prime,
    format_ratio,
    is_prime,
    jacobi,
    q_search_tuple,
    nonresidue_tuple,
    segmented_primes,
    split_prime,
    sqrt_mod_prime,
    tree_sum,
    two_group_tuple,
    verify_q_range,
)


def sieve(n: int) -> list[bool]:
    flags = [False, False] + [True] * (n - 1)
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = [False] * len(flags[i * i :: i])
    return flags


PRIME_FLAGS = sieve(20000)
ODD_PRIMES = [p for p in range(3, 20000) if PRIME_FLAGS[p]]


def legendre_oracle(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if a in {x * x % p for x in range(1, p)} else -1


def brute_q(p: int, r: int = 1) -> int | None:
    q = 3
    while q * q < 4 * p**r:
        if PRIME_FLAGS[q] and legendre_oracle(q, p) == -1:
            return q
        q += 4
    return None


def test_jacobi_examples():
    assert jacobi(1, 15) == 1
    assert jacobi(2, 7) == 1
    assert jacobi(7, 13) == -1
    with pytest.raises(ValueError):
        jacobi(3, 8)


def test_jacobi_matches_squares():
    for p in ODD_PRIMES:
        if p >= 200:
            break
        for a in range(-p, 2 * p):
            assert jacobi(a, p) == legendre_oracle(a, p)


def test_jacobi_composite_is_product():
    for n in range(3, 300, 2):
        f = factorize(n)
        for a in range(0, n):
            want = math.prod(legendre_oracle(a, p) ** e for p, e in f.items())
            assert jacobi(a, n) == want


def test_is_prime_matches_sieve():
    for n in range(1, 20000):
        assert is_prime(n) == PRIME_FLAGS[n], n


def test_is_prime_large():
    assert is_prime(10**9 + 7)
    for carmichael in (561, 1105, 1729, 2465, 2821, 6601, 8911, 3215031751):
        assert not is_prime(carmichael)
    assert is_prime(2**61 - 1)
    assert is_prime(2**89 - 1)
    assert not is_prime(2**67 - 1)
    assert not is_prime((2**61 - 1) * (2**31 - 1))
    # strong pseudoprime to bases 2..37
    assert not is_prime(3825123056546413051)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10**12))
def test_factorize_round_trip(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)


def test_sqrt_mod_prime():
    for q in ODD_PRIMES[:80]:
        for a in range(1, q):
            if legendre_oracle(a, q) == 1:
                x = sqrt_mod_prime(a, q)
                assert x * x % q == a
            else:
                with pytest.raises(PreconditionError):
                    sqrt_mod_prime(a, q)


def test_find_nonresidue_prime_examples():
    assert find_nonresidue_prime(13, 1) == 7
    assert find_nonresidue_prime(73, 1) == 7
    assert find_nonresidue_prime(5, 1) == 3
    with pytest.raises(PreconditionError):
        find_nonresidue_prime(9, 1)


def test_find_nonresidue_prime_brute_force():
    for p in ODD_PRIMES[:400]:
        for r in (1, 2):
            assert find_nonresidue_prime(p, r) == brute_q(p, r), (p, r)


def test_find_nonresidue_prime_absent():
    # for p = 3 the only candidate below 2*sqrt(3) is q = 3 itself
    assert find_nonresidue_prime(3, 1) is None
    assert find_nonresidue_prime(3, 1, multiplier=4) == 11


def test_split_prime_examples():
    assert split_prime(7, 6) == 1
    assert split_prime(3, 2) == 1
    for k in range(1, 11):
        if jacobi(k, 11) != jacobi(-1, 11):
            with pytest.raises(PreconditionError, match="Legendre"):
                split_prime(11, k)
    with pytest.raises(PreconditionError):
        split_prime(11, 22)


def test_split_prime_identity():
    for q in ODD_PRIMES[:60]:
        for k in range(1, q):
            if jacobi(k, q) != jacobi(-1, q):
                continue
            a = split_prime(q, k)
            assert 0 < a < q
            assert (-a * a - k) % q == 0
            assert a * (q - a) % q == k
            # smallest valid a
            assert all((b * (q - b) - k) % q for b in range(1, a))


def test_nonresidue_tuple_examples():
    assert nonresidue_tuple(7, 1) == (1, 6)
    assert nonresidue_tuple(5, 1) == (1, 1, 2)
    assert nonresidue_tuple(13, 1) == (1, 1, 6)


def test_nonresidue_tuple_17_mod_24():
    # 2 is a square modulo such primes, so (1, 1, (p-1)/2) would be wrong
    for p in (17, 41, 89, 113):
        for r in (1, 2, 3):
            s = nonresidue_tuple(p, r)
            assert tree_sum(s) == p**r
            assert jacobi(math.prod(s), p) == -1
        assert jacobi(math.prod((1, 1, (p - 1) // 2)), p) == 1


def test_nonresidue_tuple_postconditions():
    for p in ODD_PRIMES:
        if p >= 2000:
            break
        for r in (1, 2, 3):
            try:
                s = nonresidue_tuple(p, r)
            except NoWitness:
                continue
            assert tree_sum(s) == p**r, (p, r, s)
            assert all(x > 0 and x % p for x in s), (p, r, s)
            assert legendre_oracle(math.prod(s), p) == -1, (p, r, s)
            assert list(s) == sorted(s)


def test_q_search_tuple_covers_1_mod_24():
    for p in [p for p in ODD_PRIMES if p % 24 == 1 and p < 2000]:
        for r in (1, 2):
            s = q_search_tuple(p, r)
            assert tree_sum(s) == p**r
            assert legendre_oracle(math.prod(s), p) == -1


def test_q_search_tuple_no_witness():
    with pytest.raises(NoWitness) as exc:
        q_search_tuple(73, 1, multiplier=Fraction(1, 10))
    assert exc.value.p == 73 and exc.value.r == 1


def test_two_group_tuple():
    assert two_group_tuple(3) == (1, 2, 2)
    assert two_group_tuple(4) == (1, 1, 1, 5)
    with pytest.raises(PreconditionError):
        two_group_tuple(2)
    for r in range(3, 12):
        assert tree_sum(two_group_tuple(r)) == 2**r


def test_certificates():
    rep = verify_q_range(5000, certificates=True)
    assert rep.rows
    for p, q, a in rep.rows:
        if a is None:
            # no split exists when p mod q has the wrong Legendre symbol
            assert jacobi(p % q, q) != jacobi(-1, q)
            continue
        cert = NonresidueCertificate(p, 1, q, a)
        assert cert.valid, (p, q, a, cert.problems())
    bad = NonresidueCertificate(13, 1, 3, 1)
    assert "q is a residue mod p" in bad.problems()
    assert not NonresidueCertificate(5, 1, 7, 1).valid


def test_verify_q_range_small():
    rep = verify_q_range(1000, filter_1mod24=True, certificates=True)
    assert [row[0] for row in rep.rows] == [73, 97, 193, 241, 313, 337, 409, 433, 457, 577, 601, 673, 769, 937]
    assert rep.checked == 14 and rep.failures == []
    brute = [brute_q(p) for p, _, _ in rep.rows]
    assert [row[1] for row in rep.rows] == brute
    assert rep.max_q == max(brute)
    assert rep.max_ratio == max(Fraction(q * q, p) for p, q, _ in rep.rows)
    lines = certificate_rows(rep)
    assert lines[0] == "p q a ratio"
    assert len(lines) == 15


def test_verify_q_range_vacuous():
    rep = verify_q_range(2)
    assert rep.checked == 0 and rep.failures == []
    assert rep.summary() == "checked=0 failures=0 max_q=0 max_ratio=0.000000"


def test_verify_q_range_unfiltered_failures():
    # small primes can run out of room below 2*sqrt(p)
    rep = verify_q_range(2000)
    want = [p for p in ODD_PRIMES if p <= 2000 and brute_q(p) is None]
    assert rep.failures == want
    assert 3 in want


def test_verify_q_range_sharded_matches_sequential():
    a = verify_q_range(60000, filter_1mod24=True, certificates=True, jobs=1)
    b = verify_q_range(60000, filter_1mod24=True, certificates=True, jobs=3)
    assert a.summary() == b.summary()
    assert a.rows == b.rows


def test_format_ratio():
    assert format_ratio(Fraction(4)) == "2.000000"
    assert format_ratio(Fraction(49, 73)) == f"{7 / math.sqrt(73):.6f}"


def test_segmented_primes():
    got = list(segmented_primes(10, 5000, segment=97))
    assert got == [p for p in range(10, 5001) if PRIME_FLAGS[p]]
    assert list(segmented_primes(0, 1)) == []


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 10**6))
def test_random_prime_tuple(n):
    rng = random.Random(n)
    p = n
    while not is_prime(p) or p == 2:
        p += 1
    r = rng.choice([1, 2])
    try:
        s = nonresidue_tuple(p, r)
    except NoWitness:
        return
    assert tree_sum(s) == p**r
    assert jacobi(math.prod(s), p) == -1
