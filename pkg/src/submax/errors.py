"""Exception hierarchy shared by every solver module."""


class SubmaxError(Exception):
    """Base class for library errors."""


class InvalidElementError(SubmaxError, ValueError):
    """An element id lies outside the ground set."""


class InvalidSpecError(SubmaxError, ValueError):
    """An instance, constraint or function description is malformed."""


class ResourceLimitError(SubmaxError):
    """An exhaustive routine was asked to enumerate too many subsets."""


class InfeasibleError(SubmaxError):
    """No feasible object (e.g. a base inside the allowed set) exists."""


class InvariantViolation(SubmaxError, RuntimeError):
    """An internal guarantee failed; indicates a broken oracle or a bug."""
