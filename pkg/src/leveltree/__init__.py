"""Exact combinatorics of weighted level trees: contractions, twisted
coordinate charts, and sequential-blowup bookkeeping, all verified
symbolically over integer exponent vectors."""

from .errors import (DomainError, InfeasibleError, LevelTreeError,
                     MonomialError, StructureError, VerificationError)
from .levels import WeightedLevelTree, make_level_tree
from .tree import RootedTree, WeightedTree

__all__ = [
    "DomainError", "InfeasibleError", "LevelTreeError", "MonomialError",
    "StructureError", "VerificationError",
    "RootedTree", "WeightedTree", "WeightedLevelTree", "make_level_tree",
]

__version__ = "0.1.0"
