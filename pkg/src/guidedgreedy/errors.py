"""Error types shared across the package.

InputError maps to CLI exit code 2, ResourceError to exit code 3.
"""


class InputError(ValueError):
    """Invalid user input: bad ids, malformed files, infeasible arguments."""


class ResourceError(RuntimeError):
    """A configured enumeration or memory budget was exceeded."""
