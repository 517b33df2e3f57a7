"""Exception hierarchy shared by all girthlab modules.

Exit-code mapping used by the CLI: ValidationError -> 2,
BudgetError / StarvationError -> 3, InternalError -> 4.
"""


class GirthlabError(Exception):
    """Base class; carries the module/stage that raised it."""

    def __init__(self, message: str, *, module: str = "", stage: str = ""):
        super().__init__(message)
        self.module = module
        self.stage = stage

    def as_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "module": self.module,
            "stage": self.stage,
            "message": str(self),
        }


class ValidationError(GirthlabError):
    """Bad input: malformed graph, out-of-range vertex, odd stride, ..."""


class BudgetError(GirthlabError):
    """A configured cap was exceeded (cycle count, dense-matrix size, ...)."""


class StarvationError(GirthlabError):
    """The switching repair ran out of eligible edges or restarts."""

    def __init__(self, message: str, *, residual_inventory=None, **kw):
        super().__init__(message, **kw)
        self.residual_inventory = residual_inventory or []


class InternalError(GirthlabError):
    """An internal invariant failed; indicates a bug, not a user error."""
