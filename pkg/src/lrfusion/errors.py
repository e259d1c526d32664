"""Exception classes shared across the package.

The CLI maps these onto distinct exit codes: validation and shape problems,
file-format problems, and numerical failures each get their own class.
"""


class ValidationError(ValueError):
    """Invalid value: bad config field, non-finite entry, malformed argument."""


class DimensionError(ValidationError):
    """Shape or length disagreement between operands."""


class FormatError(Exception):
    """Unreadable or malformed matrix/config file."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge."""
