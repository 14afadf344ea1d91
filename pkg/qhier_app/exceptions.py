from dataclasses import dataclass
from typing import Optional


class QhierError(Exception):
    """
    Base error of the workbench.

    Attributes:
        detail: Human readable description, printed by the CLI.
        exit_code: Process exit code the CLI uses for this error.
    """
    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ArgumentError(QhierError):
    exit_code = 2


class ValidationFailed(QhierError):
    exit_code = 2


class UnsupportedFormError(QhierError):
    exit_code = 2


class StepSizeError(QhierError):
    exit_code = 2


class NumericError(QhierError):
    exit_code = 1


class ResourceError(QhierError):
    exit_code = 3

    def __init__(self, what: str, dim: int, cap: int):
        super().__init__(f'{what}: dimension {dim} exceeds the cap {cap}')
        self.dim = dim
        self.cap = cap


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    term: Optional[int] = None

    def __str__(self):
        where = f'{self.line}:{self.column}'
        if self.term is not None:
            return f'{where}: term {self.term}: {self.message}'
        return f'{where}: {self.message}'


class SpecParseError(QhierError):
    exit_code = 2

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__('; '.join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics
