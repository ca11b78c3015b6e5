"""Exception hierarchy shared by all leveltree modules."""


class LevelTreeError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(LevelTreeError):
    """Malformed tree data: unknown vertices/edges, cycles, bad parent maps."""


class DomainError(LevelTreeError):
    """Arguments outside an operation's domain (bad level, bad index subset...)."""


class InfeasibleError(DomainError):
    """No object with the requested combinatorial data exists."""


class MonomialError(LevelTreeError):
    """Ill-defined monomial arithmetic, e.g. a negative power of a symbol
    constrained to zero on the stratum under consideration."""


class VerificationError(LevelTreeError):
    """An identity that is expected to hold failed, with a witness attached."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
