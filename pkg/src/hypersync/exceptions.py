"""Exception hierarchy.

Every error raised by the library derives from :class:`HypersyncError`, and
the value-like ones also derive from :class:`ValueError` so that callers
using plain ``except ValueError`` keep working.
"""


class HypersyncError(Exception):
    """Base class for all library errors."""


class HypergraphError(HypersyncError, ValueError):
    """Structurally invalid hypergraph input."""


class EmptyTail(HypergraphError):
    pass


class EmptyHead(HypergraphError):
    pass


class UnknownNode(HypergraphError):
    pass


class UnknownEdge(HypergraphError):
    pass


class DuplicateEdgeId(HypergraphError):
    pass


class NonPositiveMultiplicity(HypergraphError):
    pass


class InvalidPartition(HypersyncError, ValueError):
    pass


class TailMismatch(HypergraphError):
    pass


class HeadOverlap(HypergraphError):
    pass


class WeightMismatch(HypergraphError):
    pass


class NotBalanced(HypersyncError, ValueError):
    """Raised when an operation needs a balanced partition.

    ``witness`` carries the first violation found (see
    :class:`hypersync.synchrony.BalanceWitness`).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TooLarge(HypersyncError, ValueError):
    pass


class DimensionMismatch(HypersyncError, ValueError):
    pass


class MissingCoupling(HypersyncError, ValueError):
    pass


class NonFiniteState(HypersyncError, ArithmeticError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NoConvergence(HypersyncError, ArithmeticError):
    pass


class NotEquilibrium(HypersyncError, ValueError):
    pass


class ZeroComponent(HypersyncError, ValueError):
    pass


class DocumentError(HypersyncError, ValueError):
    """Problem in a hypergraph document; ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None, path=None):
        loc = []
        if path:
            loc.append(path)
        if line is not None:
            loc.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        super().__init__(f"{message} ({'; '.join(loc)})" if loc else message)
        self.line = line
        self.column = column
        self.path = path


class DocumentSyntaxError(DocumentError):
    pass


class DocumentSemanticError(DocumentError):
    pass


class UsageError(HypersyncError, ValueError):
    pass
