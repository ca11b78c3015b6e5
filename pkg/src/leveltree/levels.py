"""Weighted level trees and their derived index data.

A level map assigns a nonpositive rational to each vertex, strictly
decreasing away from the root, with the root alone at level 0.  From the
levels and weights we derive

* ``m`` -- the highest level carrying positive weight,
* the *hat* edges (upper endpoint strictly above ``m``) and their edge level,
* the cross-sections ``E_i`` of edges spanning the gap above level ``i``,
* the index set ``I = I_plus | I_m | I_minus`` (levels in ``[m, 0)``,
  hat edges dropping below ``m``, and non-hat edges),
* ascent sequences through a chosen family of special vertices.

Levels are exact ``Fraction`` values throughout; only their order matters,
and the equivalence relation below quotients out relabelings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DomainError, StructureError
from .tree import Edge, RootedTree, Vertex, WeightedTree

Level = Fraction
# An index subset mixes levels (Fraction) and edges (str).
IndexLabel = object
IndexSubset = frozenset


def as_level(x) -> Level:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class WeightedLevelTree:
    base: WeightedTree
    level: Mapping[Vertex, Level]

    def __post_init__(self):
        object.__setattr__(self, "_memo", {})
        tree = self.base.tree
        if set(self.level) != tree.vertices:
            raise StructureError("level map must cover exactly the vertex set")
        lv = {v: as_level(x) for v, x in self.level.items()}
        object.__setattr__(self, "level", lv)
        for v, x in lv.items():
            if x > 0:
                raise StructureError(f"level of {v!r} must be nonpositive")
            if x == 0 and v != tree.root:
                raise StructureError(f"only the root may sit at level 0, not {v!r}")
        if lv[tree.root] != 0:
            raise StructureError("root must sit at level 0")
        for child, par in tree.parent.items():
            if not lv[par] > lv[child]:
                raise StructureError(
                    f"levels must strictly decrease along edges ({par!r} -> {child!r})"
                )

    # -- conveniences ---------------------------------------------------

    @property
    def tree(self) -> RootedTree:
        return self.base.tree

    @property
    def weight(self) -> Mapping[Vertex, int]:
        return self.base.weight

    @property
    def root(self) -> Vertex:
        return self.base.root

    def edges(self) -> frozenset[Edge]:
        return self.base.tree.edges

    def occupied_levels(self) -> tuple[Level, ...]:
        """All occupied levels, descending from 0."""
        memo = self._memo
        if "occ" not in memo:
            memo["occ"] = tuple(sorted(set(self.level.values()), reverse=True))
        return memo["occ"]

    def levels_in(self, lo: Level, hi: Level, include_lo: bool) -> frozenset[Level]:
        """Occupied levels in ``[lo, hi)`` or ``(lo, hi)``."""
        vals = self.occupied_levels()
        if include_lo:
            return frozenset(x for x in vals if lo <= x < hi)
        return frozenset(x for x in vals if lo < x < hi)

    def to_json_dict(self) -> dict:
        d = self.base.to_json_dict()
        d["levels"] = {v: str(self.level[v]) for v in sorted(self.level)}
        return d

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeightedLevelTree":
        base = WeightedTree.from_json_dict(data)
        try:
            levels = {v: Fraction(s) for v, s in data["levels"].items()}
        except KeyError as exc:
            raise StructureError(f"missing tree field {exc}") from exc
        except (ValueError, ZeroDivisionError) as exc:
            raise StructureError(f"bad level value: {exc}") from exc
        return cls(base=base, level=levels)


def make_level_tree(root: Vertex, parent: Mapping[Vertex, Vertex],
                    weight: Mapping[Vertex, int], level: Mapping[Vertex, object]) -> WeightedLevelTree:
    """Convenience constructor used heavily in tests and fixtures."""
    base = WeightedTree(tree=RootedTree(root=root, parent=dict(parent)), weight=dict(weight))
    return WeightedLevelTree(base=base, level={v: as_level(x) for v, x in level.items()})


# ---------------------------------------------------------------------------
# Derived level data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelData:
    m: Level
    hat_edges: frozenset[Edge]
    edge_level: Mapping[Edge, Level]
    occupied_levels: tuple[Level, ...]


def level_data(t: WeightedLevelTree) -> LevelData:
    """``m``, hat edges and their levels; errors if every weight is zero."""
    memo = t._memo
    if "level_data" in memo:
        return memo["level_data"]
    positive = t.base.positive_vertices()
    if not positive:
        raise DomainError("no positively weighted vertex: m is undefined")
    m = max(t.level[v] for v in positive)
    tree = t.tree
    hat = frozenset(e for e in tree.edges if t.level[tree.parent[e]] > m)
    edge_level = {e: max(t.level[e], m) for e in hat}
    out = LevelData(m=m, hat_edges=hat, edge_level=edge_level,
                    occupied_levels=t.occupied_levels())
    memo["level_data"] = out
    return out


def level_successor(t: WeightedLevelTree, i) -> Level:
    """The occupied level immediately above ``i``."""
    i = as_level(i)
    occ = set(t.level.values())
    if i == 0 or i not in occ:
        raise DomainError(f"level {i} has no successor (unoccupied or zero)")
    return min(x for x in occ if x > i)


def edge_span(t: WeightedLevelTree, e: Edge) -> frozenset[Level]:
    """Occupied levels in ``[edge_level(e), level(v_e^+))`` for a hat edge:
    the levels whose gap the edge crosses."""
    data = level_data(t)
    if e not in data.hat_edges:
        raise DomainError(f"edge {e!r} has no span: it is not a hat edge")
    return t.levels_in(data.edge_level[e], t.level[t.tree.parent[e]], include_lo=True)


def cross_section(t: WeightedLevelTree, i) -> frozenset[Edge]:
    """Edges spanning the gap above level ``i``: ``edge_level(e) <= i < level(v_e^+)``."""
    i = as_level(i)
    data = level_data(t)
    if not (data.m <= i < 0) or i not in data.occupied_levels:
        raise DomainError(f"level {i} is not an occupied level in [m, 0)")
    tree = t.tree
    out = set()
    for e in data.hat_edges:
        if data.edge_level[e] <= i < t.level[tree.parent[e]]:
            out.add(e)
    return frozenset(out)


@dataclass(frozen=True)
class IndexPartition:
    """The index set attached to a weighted level tree, split into its parts:
    occupied levels in ``[m, 0)``, hat edges dropping below ``m``, and the
    remaining (non-hat) edges."""

    i_plus: frozenset[Level]
    i_m: frozenset[Edge]
    i_minus: frozenset[Edge]

    def labels(self) -> frozenset:
        return self.i_plus | self.i_m | self.i_minus

    def __len__(self) -> int:
        return len(self.i_plus) + len(self.i_m) + len(self.i_minus)

    def split(self, subset: Iterable) -> tuple[frozenset, frozenset, frozenset]:
        """Partition an index subset into its plus/m/minus parts,
        rejecting labels outside the index set."""
        sub = frozenset(subset)
        bad = sub - self.labels()
        if bad:
            raise DomainError(f"labels outside the index set: {sorted(map(str, bad))}")
        return (sub & self.i_plus, sub & self.i_m, sub & self.i_minus)


def index_partition(t: WeightedLevelTree) -> IndexPartition:
    memo = t._memo
    if "index_partition" in memo:
        return memo["index_partition"]
    data = level_data(t)
    tree = t.tree
    i_plus = frozenset(x for x in data.occupied_levels if data.m <= x < 0)
    i_m = frozenset(e for e in data.hat_edges if t.level[e] < data.m)
    i_minus = tree.edges - data.hat_edges
    out = IndexPartition(i_plus=i_plus, i_m=i_m, i_minus=i_minus)
    memo["index_partition"] = out
    return out


# ---------------------------------------------------------------------------
# Special vertices and ascent sequences
# ---------------------------------------------------------------------------

SpecialMap = Mapping[Level, Edge]  # level in I_plus -> its special edge


def special_choices(t: WeightedLevelTree) -> dict[Level, tuple[Edge, ...]]:
    """For each level of ``I_plus``, the edges whose lower endpoint sits there."""
    part = index_partition(t)
    out: dict[Level, tuple[Edge, ...]] = {}
    for i in part.i_plus:
        out[i] = tuple(sorted(v for v in t.tree.edges if t.level[v] == i))
    return out


def default_special(t: WeightedLevelTree) -> dict[Level, Edge]:
    """Lexicographically smallest vertex at each level of ``I_plus``."""
    return {i: choices[0] for i, choices in special_choices(t).items()}


def validate_special(t: WeightedLevelTree, special: SpecialMap) -> None:
    part = index_partition(t)
    if set(special) != set(part.i_plus):
        raise DomainError("special map must cover exactly the levels of I_plus")
    for i, e in special.items():
        if e not in t.tree.edges or t.level[e] != i:
            raise DomainError(f"special edge {e!r} does not end at level {i}")


def ascent_sequence(t: WeightedLevelTree, special: SpecialMap, i) -> tuple[Level, ...]:
    """The strictly increasing sequence ``i = i[0] < i[1] < ...`` obtained by
    repeatedly jumping to the level of the current special vertex's parent,
    terminating at 0."""
    i = as_level(i)
    validate_special(t, special)
    if i not in special:
        raise DomainError(f"level {i} is not an I_plus level")
    seq = [i]
    while seq[-1] != 0:
        v = special[seq[-1]]
        parent = t.tree.parent[v]
        nxt = t.level[parent]
        if not nxt > seq[-1]:
            raise DomainError("ascent did not increase; invalid special map")
        seq.append(nxt)
    return tuple(seq)


# ---------------------------------------------------------------------------
# Equivalence of weighted level trees
# ---------------------------------------------------------------------------

def is_equivalent(t: WeightedLevelTree, t2: WeightedLevelTree) -> bool:
    """Same weighted tree, and the level order on vertices at or above ``m(t)``
    is preserved: equal levels stay equal, strict drops stay strict."""
    if t.base != t2.base:
        return False
    try:
        m = level_data(t).m
    except DomainError:
        return False
    verts = sorted(t.tree.vertices)
    for v in verts:
        if t.level[v] < m:
            continue
        for w in verts:
            if t.level[v] == t.level[w] and t2.level[v] != t2.level[w]:
                return False
            if t.level[v] > t.level[w] and not t2.level[v] > t2.level[w]:
                return False
    return True


def equiv_key(t: WeightedLevelTree):
    """A canonical key equal for two trees iff they are equivalent: the
    weighted tree together with the ordered partition of the at-or-above-``m``
    vertices by level."""
    m = level_data(t).m
    by_level: dict[Level, list[Vertex]] = {}
    for v in t.tree.vertices:
        if t.level[v] >= m:
            by_level.setdefault(t.level[v], []).append(v)
    ordered = tuple(tuple(sorted(by_level[x])) for x in sorted(by_level, reverse=True))
    base_key = (t.root, tuple(sorted(t.tree.parent.items())),
                tuple(sorted(t.weight.items())))
    return (base_key, ordered)


def canonical_form(t: WeightedLevelTree) -> WeightedLevelTree:
    """The class representative with at-or-above-``m`` levels renumbered to
    ``0, -1, -2, ...`` and every lower vertex placed by its depth below the
    ``m`` frontier (``m-1``, ``m-2``, ... along chains)."""
    m = level_data(t).m
    above = sorted({x for x in t.level.values() if x >= m}, reverse=True)
    rank = {x: Fraction(-k) for k, x in enumerate(above)}
    new_level: dict[Vertex, Level] = {}
    for v in t.tree.preorder():  # parents before children
        if t.level[v] >= m:
            new_level[v] = rank[t.level[v]]
        else:
            par = t.tree.parent[v]
            base = new_level[par] if t.level[par] < m else rank[m]
            new_level[v] = base - 1
    return WeightedLevelTree(base=t.base, level=new_level)


def phi_bijection(t: WeightedLevelTree, t2: WeightedLevelTree, subset: Iterable) -> frozenset:
    """Transport an index subset along an equivalence: levels move through the
    vertex-level correspondence, edge labels stay put."""
    if not is_equivalent(t, t2):
        raise DomainError("phi is only defined between equivalent trees")
    part = index_partition(t)
    plus, mid, minus = part.split(subset)
    moved = set()
    for i in plus:
        for v in t.tree.vertices:
            if t.level[v] == i:
                moved.add(t2.level[v])
                break
    return frozenset(moved) | mid | minus
