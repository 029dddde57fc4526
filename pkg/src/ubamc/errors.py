"""Exception hierarchy. Each family maps to one CLI exit code."""


class UbamcError(Exception):
    exit_code = 4


class ParseError(UbamcError):
    """Malformed input document; carries a 1-based line/column."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class ModelError(UbamcError, ValueError):
    """A structurally valid document that violates a model invariant."""

    exit_code = 2


class StochasticityError(ModelError):
    pass


class UnknownSymbolError(ModelError):
    pass


class PreconditionError(UbamcError, ValueError):
    """An operation was called outside its domain (e.g. an ambiguous automaton)."""

    exit_code = 3

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class AlphabetMismatch(PreconditionError):
    pass


class AmbiguousAutomaton(PreconditionError):
    pass


class ContractionError(PreconditionError):
    """Some unknown of a linear system cannot reach the accepting set."""

    def __init__(self, message, vertex=None):
        self.vertex = vertex
        super().__init__(message)


class InvariantError(UbamcError):
    exit_code = 4


class SingularSystemError(InvariantError):
    pass


class SizeAbort(UbamcError):
    exit_code = 5


class PrefixAmbiguity(AmbiguousAutomaton):
    """Two distinct runs each reach an accepting state along one trajectory prefix."""

