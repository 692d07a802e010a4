"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class ModelVizError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ModelVizError):
    """A problem caused by user-supplied input (program text, structures, clicks)."""


# --- vocabulary / structure level ---------------------------------------

class SignatureClash(InputError):
    """Two declarations share a name but have different signatures."""


class DuplicateName(InputError):
    """The same name is declared twice within one scope."""


class ConflictingInterpretation(InputError):
    """Two structures enumerate the same symbol with different contents."""


class MissingSymbol(InputError):
    """A projection target declares a symbol the source structure lacks."""


class NotTwoValued(InputError):
    """An operation requires a fully interpreted structure."""


class SortViolation(InputError):
    """A tuple element or function value falls outside its sort's domain."""


# --- lexer / parser / type checking --------------------------------------

class SourceError(InputError):
    """An error anchored to a position in the input text."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class UnknownSymbol(SourceError):
    pass


class SortMismatch(SourceError):
    pass


# --- solver ---------------------------------------------------------------

class UnstratifiedDefinition(InputError):
    """A definition recurses through negation and cannot be evaluated."""


class EmptySortDomain(InputError):
    """Model expansion needs a value from a sort with an empty domain."""


class FunctionConflict(InputError):
    """Two rules assign different values to the same function point."""


class PartialityViolation(InputError):
    """A non-partial defined function is left undefined at some point."""


class ArithmeticOverflow(InputError):
    """An arithmetic result exceeded the 64-bit signed integer range."""


class SearchBudgetExceeded(ModelVizError):
    """The solver ran out of branch nodes.  Carries the models found so far."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


# --- linear-time theories -------------------------------------------------

class MultipleTimeArguments(InputError):
    """A symbol mentions the time sort in more than one argument position."""


class NonLtcRule(InputError):
    """A rule head's time term is neither the start constant nor one successor step."""


class NonLtcSentence(InputError):
    """A sentence mentions the time sort and cannot be evaluated per step."""


class NoInitialState(InputError):
    """The initial rules of a simulation admit no model."""


class AmbiguousAction(InputError):
    """The input theory leaves an action symbol undetermined."""


class StaleClick(InputError):
    """A click event refers to a frame other than the current one."""


# --- drawing encode / decode ---------------------------------------------

class DanglingLink(InputError):
    """A link references a key that has no element in the same frame."""


class UnknownShapeAttribute(InputError):
    """An attribute is defined for an element whose shape does not carry it."""


class MalformedInput(InputError):
    """Click-event JSON does not have the expected shape."""


class UnknownEventType(InputError):
    """An input event has a type other than 'click'."""


class NoVisualisationModel(InputError):
    """The visualisation theory admits no model over the merged structure."""
