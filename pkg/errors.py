"""
errors.py - exception hierarchy shared by every module

All failures raised on purpose by this package derive from MotzkinError so the
CLI can tell a computational refusal apart from a genuine crash.
"""


class MotzkinError(Exception):
    """Base class for every error raised deliberately by this package."""


class NotPrimeError(MotzkinError, ValueError):
    pass


class MalformedWordError(MotzkinError, ValueError):
    pass


class NonInvertibleError(MotzkinError, ZeroDivisionError):
    pass


class UnsupportedWidthError(MotzkinError, ValueError):
    """A shift-combination reaches p or more indices ahead (needs h < p)."""


class HypothesisError(MotzkinError):
    """A closed-form evaluator was called outside the hypotheses it relies on."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        self.detail = detail
        msg = f"hypothesis violated: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class OutOfScopeError(MotzkinError):
    def __init__(self, message: str, suggestion: str | None = None):
        self.suggestion = suggestion
        if suggestion:
            message = f"{message}; try: {suggestion}"
        super().__init__(message)


class BudgetExceededError(MotzkinError):
    def __init__(self, required: int, budget: int, what: str = "evaluations"):
        self.required = required
        self.budget = budget
        super().__init__(
            f"refusing to run {required:,} {what}: budget is {budget:,} "
            f"(raise it with --budget {required})"
        )


class DegenerateInputError(MotzkinError):
    pass


class TheoremViolationError(MotzkinError):
    """A proved congruence failed to hold: always an implementation bug."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class UsageError(MotzkinError):
    """Flags that parse but do not make sense together."""
