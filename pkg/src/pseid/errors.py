"""Exception types shared across the package."""

from __future__ import annotations


class PseidError(Exception):
    """Base class for all analysis errors raised by pseid."""

    code = "Error"


class GraphValidationError(PseidError):
    code = "InvalidGraph"

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{v.code}: {v.message}" for v in self.violations)
        super().__init__(msg or "invalid graph")


class UnknownNodeError(PseidError):
    code = "UnknownNode"


class ValueOutOfDomainError(PseidError):
    code = "ValueOutOfDomain"


class NotAConfounderError(PseidError):
    code = "NotAConfounder"


class AssumptionViolatedError(PseidError):
    code = "AssumptionViolated"

    def __init__(self, message, entries=()):
        self.entries = list(entries)
        super().__init__(message)


class UnsupportedCombinationError(PseidError):
    code = "UnsupportedCombination"


class IllTypedQueryError(PseidError):
    code = "IllTypedQuery"


class MissingLabelError(PseidError):
    code = "MissingLabel"


class VariableMismatchError(PseidError):
    code = "VariableMismatch"


class EmptyDatasetError(PseidError):
    code = "EmptyDataset"


class EnumerationLimitError(PseidError):
    code = "EnumerationLimit"


class PositivityError(PseidError):
    code = "Positivity"


class SpecError(PseidError):
    """Problem in a spec document, with a 1-based source position."""

    code = "SpecError"

    def __init__(self, message, line=0, col=0, kind=None):
        self.line = line
        self.col = col
        self.kind = kind
        super().__init__(message)

    def __str__(self):
        kind = f" [{self.kind}]" if self.kind else ""
        return f"{self.line}:{self.col}: {self.code}{kind}: {self.args[0]}"


class SpecSyntaxError(SpecError):
    code = "SyntaxError"


class SpecSemanticError(SpecError):
    code = "SemanticError"
