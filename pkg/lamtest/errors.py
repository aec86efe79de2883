"""
Exception hierarchy shared by every lamtest module.
"""


class LamtestError(RuntimeError):
    """Root of every failure raised on purpose by lamtest."""


class ModelMismatchError(LamtestError):
    """An element names an atom the active model does not have."""


class ModelSpecError(LamtestError):
    """A model-spec document (or builtin request) is malformed or invalid."""


class ParseError(LamtestError):
    """Concrete syntax could not be read."""


class ResourceLimitError(LamtestError):
    """A configured cap (states, elements, reducts) was exceeded."""


class WindowExceededError(ResourceLimitError):
    """A frontier atom of a materialized window had to be unfolded."""


class InvalidRedexError(LamtestError):
    """step() was asked to fire a rule at a position where it does not apply."""


class NoWitnessError(LamtestError):
    """The counterexample run needs a chain witness and the probe found none."""


class NonConvergingError(LamtestError):
    """Böhm separation requires its left input to head-converge."""


class ShapeMismatchError(LamtestError):
    """A replayed reduction did not reach the expected right-hand side."""


class CrossCheckError(LamtestError):
    """Two independent verdicts on the same question disagree."""


class UsageError(LamtestError):
    """Bad command-line usage."""
