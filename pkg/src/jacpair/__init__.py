"""Graph Jacobians with their monodromy pairing."""

from .forms import GroupWithPairing, PairingDecomposition, classify, isometric, parse_decomposition
from .graphs import Multigraph
from .jacobian import gram_matrix, jacobian, monodromy_pairing

__all__ = [
    "GroupWithPairing",
    "Multigraph",
    "PairingDecomposition",
    "classify",
    "gram_matrix",
    "isometric",
    "jacobian",
    "monodromy_pairing",
    "parse_decomposition",
]
