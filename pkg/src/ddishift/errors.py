"""Exception hierarchy.

Data problems derive from :class:`DataError`, split failures from
:class:`SplitError`; the CLI maps those two families to exit codes 2 and 3.
"""

from __future__ import annotations


class DdiShiftError(Exception):
    """Base class for every error raised by this package."""

    #: Optional ``(strategy, seed)`` tag attached when a benchmark run fails.
    run_tag: tuple[str, int] | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.run_tag is not None:
            msg = f"[{self.run_tag[0]} seed={self.run_tag[1]}] {msg}"
        return msg


class DataError(DdiShiftError):
    pass


class ParseError(DataError):
    """A malformed input line. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class WidthMismatch(ParseError):
    pass


class MalformedHex(ParseError):
    pass


class DuplicateDrug(ParseError):
    pass


class ColumnCount(ParseError):
    pass


class BadLabel(ParseError):
    pass


class BadRelation(ParseError):
    pass


class BadYear(ParseError):
    pass


class SelfLoopError(ParseError):
    pass


class ValidationError(DataError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        head = "; ".join(self.errors[:5])
        more = f" (+{len(self.errors) - 5} more)" if len(self.errors) > 5 else ""
        super().__init__(f"dataset failed validation: {head}{more}")


class UnknownDrug(DataError, KeyError):
    def __str__(self) -> str:
        return DdiShiftError.__str__(self)


class NoApprovalData(DataError):
    pass


class EmptyTrain(DataError):
    pass


class SamplingExhausted(DataError):
    def __init__(self, relation: int, message: str | None = None):
        self.relation = relation
        super().__init__(message or f"could not sample a negative for type {relation}")


class MissingPrediction(DataError):
    def __init__(self, pair: tuple[str, str]):
        self.pair = pair
        super().__init__(f"no prediction for pair {pair[0]}\t{pair[1]}")


class DuplicatePrediction(DataError):
    def __init__(self, pair: tuple[str, str]):
        self.pair = pair
        super().__init__(f"more than one prediction for pair {pair[0]}\t{pair[1]}")


class LengthMismatch(DdiShiftError, ValueError):
    pass


class SingleClass(DdiShiftError, ValueError):
    pass


class NoPositives(DdiShiftError, ValueError):
    pass


class SplitError(DdiShiftError):
    pass


class DegenerateSplit(SplitError):
    pass


class UnsatisfiableFraction(SplitError):
    pass
