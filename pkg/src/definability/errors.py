"""Exception types shared across the package."""


class DefinabilityError(Exception):
    """Base class for all package-specific errors."""


class UnknownSymbol(DefinabilityError):
    """A word or transition uses a symbol outside the declared alphabet."""


class CapExceeded(DefinabilityError):
    """A search or construction exceeded its configured resource cap."""

    def __init__(self, message: str, cap: int | None = None):
        super().__init__(message)
        self.cap = cap


class AlphabetMismatch(DefinabilityError):
    """Two automata that must share an alphabet do not."""


class NotUnary(DefinabilityError):
    """Operation requires a single-letter alphabet."""


class BadPrime(DefinabilityError):
    """Fixture parameter is not an admissible prime."""


class WindowUnstable(DefinabilityError):
    """Canonical-model window failed to reach a repeating frontier."""


class InconsistencyWithBot(DefinabilityError):
    """Chase derived falsum; the data is inconsistent with the ontology."""


class NotHorn(DefinabilityError):
    """Ontology is outside the Horn fragment required here."""


class NotKrom(DefinabilityError):
    """Ontology is outside the Krom (binary-clause) fragment required here."""


class NotCore(DefinabilityError):
    """Ontology is outside the core (single-atom-per-side) fragment required here."""


class NotLinear(DefinabilityError):
    """Ontology recursion is not linear in the sense required here."""


class NotNormalized(DefinabilityError):
    """Operation expects an ontology already in normal form."""


class PreconditionViolated(DefinabilityError):
    """A documented operation precondition does not hold for the input."""


class PositionOutOfRange(DefinabilityError):
    """A timestamp lies outside the admissible range."""


class AlphabetViolation(DefinabilityError):
    """Alphabet extension arguments do not nest as required."""


class NotPowersetAlphabet(DefinabilityError):
    """Automaton alphabet is not the powerset alphabet of a signature."""


class UnboundPredicate(DefinabilityError):
    """A formula uses a predicate not interpreted by the structure."""


class UnknownOperator(DefinabilityError):
    """Unsupported operator in a parsed expression."""


class SyntaxError_(DefinabilityError):
    """Parse failure with source position information."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", col {col}" if col is not None else "")
        super().__init__(message + loc)
        self.line = line
        self.col = col
