"""Exception types shared by all modules."""


class CloneMinorsError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CloneMinorsError, ValueError):
    """An element, domain size or parameter lies outside its allowed range."""


class StructuralError(CloneMinorsError, ValueError):
    """Arities or domain sizes of the inputs do not fit together."""


class ContractViolation(CloneMinorsError, ValueError):
    """An input does not satisfy a precondition such as preserving a relation."""


class BudgetExceeded(CloneMinorsError, RuntimeError):
    """A search exceeded its configured resource budget.

    Raised instead of returning a partial or guessed answer.
    """


class UndecidedError(CloneMinorsError, RuntimeError):
    """The question cannot be decided within the configured bound."""
