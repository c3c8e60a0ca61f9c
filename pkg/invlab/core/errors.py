# invlab/core/errors.py
"""
Exception hierarchy. Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Optional, Sequence


class InvlabError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidInputError(InvlabError):
    exit_code = 2


class ConfigError(InvlabError):
    exit_code = 2


class DomainError(InvlabError):
    exit_code = 2


class GridTooSmallError(InvlabError):
    exit_code = 2

    def __init__(self, detail: str, needed_lower: Sequence[float], needed_upper: Sequence[float]):
        super().__init__(detail)
        self.needed_lower = tuple(float(v) for v in needed_lower)
        self.needed_upper = tuple(float(v) for v in needed_upper)


class EvaluatorError(InvlabError):
    def __init__(self, detail: str, point: Optional[Sequence[complex]] = None):
        super().__init__(detail)
        self.point = None if point is None else tuple(point)


class AccuracyError(InvlabError):
    def __init__(self, detail: str, achieved: float, requested: float):
        super().__init__(detail)
        self.achieved = achieved
        self.requested = requested


class GroupError(InvlabError):
    exit_code = 2


class NonOrthogonalGeneratorError(GroupError):
    pass


class GroupOrderExceededError(GroupError):
    pass


class GenericPointError(GroupError):
    exit_code = 1


class DegenerateDenominatorError(InvlabError):
    pass


class PreconditionRefusedError(InvlabError):
    def __init__(self, detail: str, verdict: Optional[str] = None):
        super().__init__(detail)
        self.verdict = verdict
