#!/usr/bin/env python3
"""
Error hierarchy for the ordersat pipeline
Library code raises these; only the application controller maps them to exit codes
"""

from typing import Optional


class CSPError(Exception):
    """Base class for every failure raised by ordersat"""

    exit_code = 5


class InputError(CSPError):
    """Unreadable or unwritable file"""

    exit_code = 3


class ParseError(CSPError):
    """Malformed input text, optionally located by line and column"""

    exit_code = 4

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            location = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{location}: {message}"
        super().__init__(message)


class UndeclaredVariableError(ParseError):
    pass


class DuplicateNameError(ParseError):
    pass


class ArityMismatchError(ParseError):
    pass


class EmptyDomainError(ParseError):
    pass


class FactFormatError(ParseError):
    """Unknown predicate, unknown functor or malformed term in a fact document"""


class DanglingRelationError(ParseError):
    """A table literal or tuple fact names a relation that was never declared"""


class DimacsParseError(ParseError):
    pass


class EmptySumError(CSPError):
    """All terms of a linear sum cancelled; the caller decides the comparison's truth"""


class KindMismatchError(CSPError):
    pass


class ValueOverflowError(CSPError):
    """Bound arithmetic left the signed 64-bit range"""


class NotNormalizedError(CSPError):
    pass


class UnsupportedError(CSPError):
    pass


class DecodeError(CSPError):
    """A SAT model does not correspond to any value of some variable"""


class SolverError(CSPError):
    """A solver result failed verification against the clauses or the instance"""


class SearchSpaceError(CSPError):
    pass


class MissingValueError(CSPError):
    """An assignment does not cover a variable that is needed"""
