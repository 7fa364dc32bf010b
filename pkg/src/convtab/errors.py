"""Exception hierarchy shared by all convtab modules."""


class ConvTabError(Exception):
    """Base class for every error raised by this package."""


class EmptyInputError(ConvTabError):
    """Table source contained no header row."""


class InvalidHeaderError(ConvTabError):
    """Header row exists but has zero columns."""


class IllegalSequenceError(ConvTabError):
    """Action tag sequence is not a legal path through the transition graph."""


class MissingPreviousError(ConvTabError):
    """A copy action was used without a previous-turn logical form."""


class MalformedConditionError(ConvTabError):
    """Condition construction violated operator arity rules."""


class LogicalFormSyntaxError(ConvTabError):
    """Logical-form text failed to parse. Carries the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownColumnError(ConvTabError):
    """Logical form referenced a column name absent from the table."""


class EmptyTableError(ConvTabError):
    """Operation requires a table with at least one column."""


class EmptyColumnError(ConvTabError):
    """Operation requires a column with at least one cell."""


class NoCoveredLabelsError(ConvTabError):
    """Training requires at least one covered label result."""


class NoParseError(ConvTabError):
    """Every inference candidate failed to execute."""


class MissingTableFileError(ConvTabError):
    """Dataset row referenced a table file that does not exist."""


class MalformedRowError(ConvTabError):
    """Dataset row could not be interpreted. Carries the 1-based line number."""

    def __init__(self, message, line):
        super().__init__(f"{message} (line {line})")
        self.line = line
