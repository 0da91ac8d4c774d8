"""Build a graph whose Jacobian carries a prescribed pairing, then check it.

Each block gets its own small graph and the pieces are wedged together at
vertex 0, which makes the Jacobians add orthogonally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import graphs
from .errors import PreconditionError, Unrealizable, VerificationError
from .forms import (
    Block,
    Exceptional,
    OddCyclic,
    PairingDecomposition,
    TwoCyclic,
    classify,
    isometric,
    parse_decomposition,
)
from .graphs import Multigraph
from .jacobian import gram_matrix, jacobian
from .numtheory import nonresidue_tuple, two_group_tuple

# 2-parts this small are compared by exhaustive isometry search when the
# classifier picks a different (but possibly isometric) block list
TWO_PART_SEARCH_BOUND = 2**14


@dataclass(frozen=True)
class RealizationSpec:
    decomposition: PairingDecomposition
    q_bound_multiplier: Fraction = Fraction(1)

    def text(self) -> str:
        return self.decomposition.text()


def parse_spec(text: str, q_bound_multiplier: Fraction | int = 1) -> RealizationSpec:
    mult = Fraction(q_bound_multiplier)
    if mult <= 0:
        raise PreconditionError("q-bound multiplier must be positive")
    return RealizationSpec(parse_decomposition(text), mult)


@lru_cache(maxsize=None)
def two_block_constructions(r: int) -> dict[str, tuple[str, tuple[int, ...]]]:
    """Which of B_s, C_s (s = two_group_tuple(r)) realizes C and which D.

    The letter of each candidate depends on r in a way that is easiest to
    settle by computing, so both are classified once per r.
    """
    s = two_group_tuple(r)
    out: dict[str, tuple[str, tuple[int, ...]]] = {}
    for family in ("subdivided_banana", "multicycle"):
        G = graphs.construct(family, s)
        blocks = classify(gram_matrix(jacobian(G))).blocks
        if len(blocks) == 1 and isinstance(blocks[0], TwoCyclic) and blocks[0].r == r:
            out.setdefault(blocks[0].letter, (family, s))
    missing = {"C", "D"} - set(out)
    if missing:
        raise Unrealizable(f"no construction found for 2^{r}:{'/'.join(sorted(missing))}")
    return out


def block_construction(block: Block, q_bound_multiplier: Fraction = Fraction(1)) -> tuple[str, tuple]:
    """(family, arguments) of the graph used for one block."""
    if isinstance(block, OddCyclic):
        q = block.p**block.r
        if block.residue:
            return "banana", (q,)
        return "subdivided_banana", (nonresidue_tuple(block.p, block.r, q_bound_multiplier),)
    if isinstance(block, TwoCyclic):
        q = 2**block.r
        if block.letter == "A":
            return "banana", (q,)
        if block.letter == "B":
            return "cycle", (q,)
        family, s = two_block_constructions(block.r)[block.letter]
        return family, (s,)
    if block.kind == "F" and block.r == 2:
        return "complete", (4,)
    raise Unrealizable(
        f"{block.text()}: no graph construction is known for {block.kind} blocks"
        + (" (none exists for powers of E:2^1)" if block.kind == "E" and block.r == 1 else "")
    )


def _describe(family: str, args: tuple) -> str:
    inner = ",".join(str(a) for a in args[0]) if isinstance(args[0], tuple) else str(args[0])
    return f"{family}({inner})"


def realize_with_log(spec: RealizationSpec) -> tuple[Multigraph, list[str]]:
    """Realize the target; also return one description line per block."""
    plan = [block_construction(b, spec.q_bound_multiplier) for b in spec.decomposition.blocks]
    G = graphs.cycle(1)
    log = []
    for block, (family, args) in zip(spec.decomposition.blocks, plan):
        G = graphs.wedge(G, graphs.construct(family, *args))
        log.append(f"{block.text()} <- {_describe(family, args)}")
    ok, got = compare_realization(G, spec)
    if not ok:
        raise VerificationError(
            f"constructed graph classifies as {got!r}, expected {spec.text()!r}"
        )
    return G, log


def realize(spec: RealizationSpec) -> Multigraph:
    """Wedge of per-block graphs, verified before it is returned."""
    return realize_with_log(spec)[0]


def compare_realization(G: Multigraph, spec: RealizationSpec) -> tuple[bool, str]:
    """(matches, classification text of G)."""
    if not G.is_connected():
        return False, "<disconnected>"
    gamma = gram_matrix(jacobian(G))
    got = classify(gamma)
    want = spec.decomposition.canonical()
    if got.text() == want.text():
        return True, got.text()
    if got.odd_part().text() != want.odd_part().text():
        return False, got.text()
    g2, w2 = got.two_part(), want.two_part()
    a, b = g2.pairing(), w2.pairing()
    if a.invariant_factors != b.invariant_factors or a.order > TWO_PART_SEARCH_BOUND:
        return False, got.text()
    return isometric(a, b, bound=TWO_PART_SEARCH_BOUND), got.text()


def verify_realization(G: Multigraph, spec: RealizationSpec) -> bool:
    return compare_realization(G, spec)[0]
