"""Exception types shared by the solvers and the CLI."""


class InputError(ValueError):
    """Malformed instance: bad file, degree mismatch, grammar not in CNF."""


class CapExceeded(RuntimeError):
    """A configured size cap (degree, group order, state count) was hit."""


class InvariantBreach(AssertionError):
    """Two independent methods disagreed, or a proven bound was violated."""
