"""Exception types shared across the package."""


class LogconvexError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LogconvexError):
    """An evaluation point (or a finite-difference stencil) left a function's domain."""


class NonFiniteError(LogconvexError):
    """A function evaluation produced NaN or infinity.

    Carries the offending point in ``x`` and the produced value in ``value``.
    """

    def __init__(self, message: str, x: float | None = None, value: float | None = None):
        super().__init__(message)
        self.x = x
        self.value = value


class DegenerateArguments(LogconvexError):
    """Difference-quotient arguments coincide (up to scaled tolerance)."""


class ZeroValueError(LogconvexError):
    """A function value required to be nonzero is (numerically) zero."""


class NonPositiveError(LogconvexError):
    """A function value required to be positive is zero or negative."""


class PoleError(LogconvexError):
    """A representer value in a product denominator (numerically) vanishes.

    ``point`` is the argument at which the representer vanished, ``k`` the
    product index when applicable.
    """

    def __init__(self, message: str, point: float | None = None, k: int | None = None):
        super().__init__(message)
        self.point = point
        self.k = k


class ZeroDerivative(LogconvexError):
    """A derivative in a denominator is (numerically) zero."""


class DivergenceError(LogconvexError):
    """The product representation diverges: g(x+n)/g(n) does not approach 1."""


class SeriesDivergence(LogconvexError):
    """Series terms failed to decrease in magnitude over 64 consecutive indices."""


class ToleranceNotMet(LogconvexError):
    """A refinement budget was exhausted before reaching the requested tolerance."""


class ParseError(LogconvexError):
    """Expression source failed to parse.

    ``offset`` is the byte offset of the offending input, ``expected`` the set
    of token descriptions that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: set[str] | frozenset[str] = frozenset()):
        super().__init__(message)
        self.offset = offset
        self.expected = frozenset(expected)


class UnboundParameter(LogconvexError):
    """An expression references parameters that were not supplied.

    ``names`` lists the missing parameter names, sorted.
    """

    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__("unbound parameters: " + ", ".join(self.names))
