"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class BJOrthoError(Exception):
    code = "E_BJORTHO"


class SpecError(BJOrthoError, ValueError):
    code = "E_SPEC"


class DimensionMismatch(BJOrthoError, ValueError):
    code = "E_DIM"


class DegenerateInput(BJOrthoError, ValueError):
    code = "E_DEGENERATE"


class Unsupported(BJOrthoError):
    code = "E_UNSUPPORTED"


class NonSmoothPoint(BJOrthoError):
    """The norm has a corner at ``point``; ``direction`` exhibits the derivative gap."""

    code = "E_NONSMOOTH"

    def __init__(self, point, direction, gap):
        self.point = point
        self.direction = direction
        self.gap = gap
        super().__init__(f"norm is not differentiable at {point!r} (one-sided gap {gap:.3g})")


class SearchFailed(BJOrthoError):
    code = "E_SEARCH"

    def __init__(self, message, bracket=None):
        self.bracket = bracket
        super().__init__(message)


class ConvergenceFailure(BJOrthoError):
    code = "E_CONVERGENCE"

    def __init__(self, message, system=None):
        self.system = system
        super().__init__(message)


class Overflow(BJOrthoError, OverflowError):
    code = "E_OVERFLOW"


class DuplicateLines(BJOrthoError, ValueError):
    code = "E_DUPLICATE"

    def __init__(self, i, j):
        self.indices = (i, j)
        super().__init__(f"lines {i} and {j} coincide")
