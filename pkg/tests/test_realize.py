from __future__ import annotations

import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from jacpair import graphs
from jacpair.canon import canonical_form
from jacpair.errors import PreconditionError, SpecError, Unrealizable
from jacpair.forms import Exceptional, OddCyclic, PairingDecomposition, TwoCyclic, classify
from jacpair.jacobian import gram_matrix, jacobian
from jacpair.realize import (
    block_construction,
    compare_realization,
    parse_spec,
    realize,
    realize_with_log,
    two_block_constructions,
    verify_realization,
)


def same_graph(G, H) -> bool:
    return canonical_form(G) == canonical_form(H)


def census_of(gamma) -> Counter:
    return Counter((gamma.element_order(x), gamma.pair(x, x)) for x in gamma.elements())


def test_parse_spec():
    assert len(parse_spec("5^1:nonres").decomposition.blocks) == 1
    assert len(parse_spec("2^3:C + 5^1:nonres").decomposition.blocks) == 2
    with pytest.raises(SpecError, match="r >= 3"):
        parse_spec("2^2:C")
    with pytest.raises(PreconditionError):
        parse_spec("3^1:res", 0)
    assert parse_spec("5^1:nonres + 2^3:C").text() == "2^3:C + 5^1:nonres"


def test_realize_examples():
    assert same_graph(realize(parse_spec("3^1:res")), graphs.banana(3))
    assert same_graph(
        realize(parse_spec("2^3:A + 2^3:B")), graphs.wedge(graphs.banana(8), graphs.cycle(8))
    )
    assert same_graph(realize(parse_spec("2^3:C")), graphs.subdivided_banana((1, 2, 2)))
    with pytest.raises(Unrealizable):
        realize(parse_spec("E:2"))
    with pytest.raises(Unrealizable):
        realize(parse_spec("F:2^3"))


def test_realize_log():
    G, log = realize_with_log(parse_spec("2^3:C + 5^1:nonres"))
    assert log == ["2^3:C <- subdivided_banana(1,2,2)", "5^1:nonres <- subdivided_banana(1,1,2)"]
    assert classify(gram_matrix(jacobian(G))).text() == "2^3:C + 5^1:nonres"


def test_verify_examples():
    assert verify_realization(graphs.banana(9), parse_spec("3^2:res"))
    assert not verify_realization(graphs.cycle(7), parse_spec("7^1:res"))
    assert verify_realization(graphs.cycle(7), parse_spec("7^1:nonres"))
    assert not verify_realization(graphs.banana(3), parse_spec("3^1:nonres"))
    ok, got = compare_realization(graphs.banana(3), parse_spec("3^1:nonres"))
    assert not ok and got == "3^1:res"
    # same group, different pairing
    assert not verify_realization(graphs.banana(8), parse_spec("2^3:B"))
    assert verify_realization(graphs.complete(4), parse_spec("F:2^2"))


def test_verify_accepts_isometric_two_parts():
    # A+B and C+D at 2^3 are isometric, so either text describes wedge(banana(8), cycle(8))
    G = graphs.wedge(graphs.banana(8), graphs.cycle(8))
    assert verify_realization(G, parse_spec("2^3:C + 2^3:D"))


def test_two_group_parity_table():
    # a cyclic 2-group pairing k/2^r falls in class A, B, C, D as k is 1, 7, 5, 3 mod 8
    expected = {1: "A", 7: "B", 5: "C", 3: "D"}
    for r in range(3, 8):
        table = two_block_constructions(r)
        assert set(table) == {"C", "D"}
        for letter, (family, s) in table.items():
            gamma = gram_matrix(jacobian(graphs.construct(family, s)))
            assert gamma.orders == (2**r,)
            k = gamma.gram[0][0] * 2**r
            assert expected[int(k) % 8] == letter


@pytest.mark.parametrize("r", range(1, 7))
def test_two_group_round_trip(r):
    for letter in "ABCD":
        if r < {"A": 1, "B": 2, "C": 3, "D": 3}[letter]:
            continue
        spec = parse_spec(f"2^{r}:{letter}")
        G = realize(spec)
        gamma = gram_matrix(jacobian(G))
        assert census_of(gamma) == census_of(TwoCyclic(r, letter).pairing())


def test_odd_constructions():
    assert block_construction(OddCyclic(7, 1, True)) == ("banana", (7,))
    assert block_construction(OddCyclic(7, 1, False)) == ("subdivided_banana", ((1, 6),))
    assert block_construction(OddCyclic(13, 1, False)) == ("subdivided_banana", ((1, 1, 6),))
    with pytest.raises(Unrealizable):
        block_construction(Exceptional("E", 2))


def test_odd_round_trip_small():
    for p in (3, 5, 7, 11, 13, 17, 73, 97):
        for r in (1, 2):
            for cls in ("res", "nonres"):
                spec = parse_spec(f"{p}^{r}:{cls}")
                assert verify_realization(realize(spec), spec)


def test_odd_census_matches_for_tiny_blocks():
    for p in (3, 5, 7):
        for residue in (True, False):
            block = OddCyclic(p, 1, residue)
            G = realize(parse_spec(block.text()))
            assert census_of(gram_matrix(jacobian(G))) == census_of(block.pairing())


def random_block(rng: random.Random):
    kind = rng.random()
    if kind < 0.55:
        p = rng.choice([3, 5, 7, 11, 13, 17, 19, 23, 29, 37, 41, 73, 89, 97, 113])
        return OddCyclic(p, rng.choice([1, 1, 2]), rng.random() < 0.5)
    if kind < 0.95:
        letter = rng.choice("ABCD")
        lo = {"A": 1, "B": 2, "C": 3, "D": 3}[letter]
        return TwoCyclic(rng.randint(lo, 6), letter)
    return Exceptional("F", 2)


def test_random_mixed_round_trip():
    rng = random.Random(2024)
    done = 0
    while done < 100:
        blocks = [random_block(rng) for _ in range(rng.randint(1, 4))]
        d = PairingDecomposition(blocks)
        if d.pairing().order > 10**6:
            continue
        spec = parse_spec(d.text())
        G = realize(spec)
        J = jacobian(G)
        assert J.order == d.pairing().order
        assert verify_realization(G, spec)
        done += 1


def test_wedge_order_is_block_order():
    spec = parse_spec("3^1:res + 5^1:nonres + 2^2:B")
    G = realize(spec)
    assert jacobian(G).invariant_factors == (60,)
    assert classify(gram_matrix(jacobian(G))).text() == "2^2:B + 3^1:res + 5^1:nonres"


def test_multiplier_propagates():
    spec = parse_spec("73^1:nonres", Fraction(1, 10))
    from jacpair.errors import NoWitness

    with pytest.raises(NoWitness):
        realize(spec)
