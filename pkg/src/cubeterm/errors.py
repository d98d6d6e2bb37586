"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CubeTermError(Exception):
    """Base class for every error raised by this package."""


class AlgebraError(CubeTermError):
    pass


class NotIdempotent(AlgebraError):
    def __init__(self, symbol: str, witness: tuple[int, ...], value: int):
        self.symbol = symbol
        self.witness = witness
        self.value = value
        super().__init__(
            f"operation {symbol!r} is not idempotent: {symbol}{witness} = {value}"
        )


class TableOutOfRange(AlgebraError):
    def __init__(self, symbol: str, index: int, value: int | None = None):
        self.symbol = symbol
        self.index = index
        self.value = value
        super().__init__(
            f"operation {symbol!r}: table entry {index} ({value}) outside the universe"
        )


class SignatureMismatch(AlgebraError):
    pass


class SearchCapExceeded(CubeTermError):
    def __init__(self, size: int, cap: int, what: str = "universe size"):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} {size} exceeds the exhaustive-search cap {cap}")


class CapExceeded(CubeTermError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"closure exceeded the cap of {cap} elements")


class WorkCapExceeded(CapExceeded):
    """The next closure layer would cost more table lookups than allowed."""

    def __init__(self, work: int, max_work: int):
        self.work = work
        self.max_work = max_work
        CubeTermError.__init__(
            self, f"closure needs {work} table lookups, beyond the work budget {max_work}")
        self.cap = max_work


class LengthMismatch(CubeTermError):
    pass


class ArityMismatch(CubeTermError):
    pass


class BudgetExceeded(CubeTermError):
    pass


class ImproperBase(CubeTermError):
    pass


class PreconditionArity(CubeTermError):
    pass


class NoSuchIndex(CubeTermError):
    pass


class NotFullyAbsorbing(CubeTermError):
    def __init__(self, symbol: str, variable: int):
        self.symbol = symbol
        self.variable = variable
        super().__init__(f"operation {symbol!r} is not absorbing in variable {variable}")


class HasCubeTerm(CubeTermError):
    """Raised when a construction needs the absence of a cube term."""


class DegenerateSignature(CubeTermError):
    pass


class LeadingArityTooSmall(CubeTermError):
    pass


class InvalidBlocker(CubeTermError):
    pass
