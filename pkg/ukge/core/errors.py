"""
Exception hierarchy.

Everything the toolkit raises on purpose derives from UKGEError; the CLI maps
DataError subclasses to exit code 2 and anything unexpected to 3.
"""

from typing import Optional, Sequence


class UKGEError(Exception):
    """Base class for toolkit errors."""


class DataError(UKGEError):
    """Input data, configuration or artifacts failed validation."""


class TripleParseError(DataError):
    def __init__(self, message: str, line_number: int, source: Optional[str] = None):
        self.line_number = line_number
        self.source = source
        where = f"{source}:{line_number}" if source else f"line {line_number}"
        super().__init__(f"{where}: {message}")


class ScoreValidationError(DataError):
    pass


class SplitError(DataError):
    pass


class RuleSyntaxError(DataError):
    def __init__(self, message: str, line_number: int, column: int):
        self.line_number = line_number
        self.column = column
        super().__init__(f"line {line_number}, column {column}: {message}")


class RuleShapeError(DataError):
    pass


class UnknownRelationError(DataError):
    def __init__(self, relation: str):
        self.relation = relation
        super().__init__(f"Unknown relation in rule: '{relation}'")


class UnknownNameError(DataError):
    def __init__(self, kind: str, name: str, suggestions: Sequence[str] = ()):
        self.kind = kind
        self.name = name
        self.suggestions = list(suggestions)
        hint = f" Did you mean: {', '.join(self.suggestions)}?" if self.suggestions else ""
        super().__init__(f"Unknown {kind} '{name}'.{hint}")


class VocabularyMismatchError(DataError):
    pass


class ManifestError(DataError):
    pass


class ConfigError(DataError):
    pass


class DomainError(UKGEError, ValueError):
    """A soft truth value fell outside [0, 1]."""


class EvaluationError(UKGEError):
    pass


class TrainingError(UKGEError):
    pass
