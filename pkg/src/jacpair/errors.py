"""Exception hierarchy shared by every module."""


class JacpairError(Exception):
    """Base class for all domain errors raised by this package."""


class GraphError(JacpairError, ValueError):
    """Invalid graph parameters or malformed graph input."""


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(GraphError):
    pass


class DivisorError(JacpairError, ValueError):
    pass


class PairingError(JacpairError, ValueError):
    """Degenerate or otherwise invalid group-with-pairing."""


class SpecError(JacpairError, ValueError):
    """Syntax or constraint error in a decomposition string."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"at position {position}: {message}"
        super().__init__(message)


class PreconditionError(JacpairError, ValueError):
    pass


class NoWitness(JacpairError):
    """No nonresidue prime was found below the search bound."""

    def __init__(self, p: int, r: int, bound: str):
        self.p, self.r, self.bound = p, r, bound
        super().__init__(
            f"no prime witness q for p={p}, r={r} below bound {bound}"
        )


class Unrealizable(JacpairError):
    """The target contains a block with no known graph construction."""


class VerificationError(JacpairError):
    """A constructed graph failed its own end-to-end check."""
