"""Exception hierarchy.

Every exception carries the CLI exit code it maps to: 2 for bad input or a
broken call contract, 3 for an expected mathematical negative (the tool
diagnosed something about the set), 4 for an internal invariant breach.
"""


class AddrepError(Exception):
    exit_code = 2


class HorizonExceeded(AddrepError):
    pass


class EmptyRange(AddrepError):
    pass


class SpecError(AddrepError):
    """Malformed generator spec or set/graph file."""


class DomainError(AddrepError, ValueError):
    pass


class MalformedWalk(AddrepError):
    pass


class InconsistentInput(AddrepError):
    pass


class PairMissing(AddrepError):
    pass


class BudgetExceeded(AddrepError):
    pass


class MathematicalFailure(AddrepError):
    exit_code = 3


class DoublingFailure(MathematicalFailure):
    pass


class NoGapFound(MathematicalFailure):
    pass


class RegimeViolation(MathematicalFailure):
    pass


class EmptySet(MathematicalFailure):
    pass


class PatchFailure(MathematicalFailure):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InvariantBreach(AddrepError):
    exit_code = 4
