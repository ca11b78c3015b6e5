"""Exhaustive, deterministic generators of small instances.

Weighted rooted trees are produced up to root-preserving isomorphism by
building canonical encodings (weight plus the sorted multiset of child
encodings) directly, so no post-hoc deduplication is needed.  Level trees
are produced one canonical representative per equivalence class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .contraction import contract
from .errors import DomainError
from .levels import WeightedLevelTree, canonical_form, index_partition
from .tree import RootedTree, Vertex, WeightedTree


@dataclass(frozen=True)
class EnumSpec:
    max_edges: int = 5
    max_weight: int = 2
    max_levels: int = 5
    require_positive_weight: bool = True

    def __post_init__(self):
        if min(self.max_edges, self.max_weight, self.max_levels) < 0:
            raise DomainError("enumeration bounds must be nonnegative")


# canonical shape: (weight, (child_shape, child_shape, ...)) with children sorted
Shape = tuple

_SHAPE_CACHE: dict[tuple[int, int], list[Shape]] = {}


def _shapes(n_edges: int, max_weight: int) -> list[Shape]:
    """All canonical weighted shapes with exactly ``n_edges`` edges."""
    cached = _SHAPE_CACHE.get((n_edges, max_weight))
    if cached is not None:
        return cached
    if n_edges == 0:
        out = [(w, ()) for w in range(max_weight + 1)]
    else:
        out = []
        for parts in _child_partitions(n_edges, max_weight):
            for w in range(max_weight + 1):
                out.append((w, parts))
    _SHAPE_CACHE[(n_edges, max_weight)] = out
    return out


def _child_partitions(budget: int, max_weight: int) -> list[tuple[Shape, ...]]:
    """Sorted tuples of child shapes using exactly ``budget`` edges (each child
    subtree costs its own edge count plus one for its parent edge)."""
    pool: list[Shape] = []
    for k in range(budget):
        pool.extend(_shapes(k, max_weight))
    pool.sort()
    out: list[tuple[Shape, ...]] = []

    def rec(remaining: int, start: int, acc: list[Shape]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(pool)):
            cost = 1 + _edge_count(pool[idx])
            if cost > remaining:
                continue
            acc.append(pool[idx])
            rec(remaining - cost, idx, acc)
            acc.pop()

    rec(budget, 0, [])
    return out


def _edge_count(shape: Shape) -> int:
    w, children = shape
    return sum(1 + _edge_count(c) for c in children)


def _materialize(shape: Shape) -> WeightedTree:
    parent: dict[Vertex, Vertex] = {}
    weight: dict[Vertex, int] = {}
    counter = itertools.count(1)

    def walk(sh: Shape, name: Vertex):
        w, children = sh
        weight[name] = w
        for child in children:
            cname = f"v{next(counter)}"
            parent[cname] = name
            walk(child, cname)

    walk(shape, "o")
    return WeightedTree(tree=RootedTree(root="o", parent=parent), weight=weight)


def gen_weighted_trees(spec: EnumSpec) -> Iterator[WeightedTree]:
    """All weighted rooted trees with at most ``max_edges`` edges, weights in
    ``[0, max_weight]``, up to root-preserving isomorphism, in a fixed order."""
    for n in range(spec.max_edges + 1):
        for shape in sorted(_shapes(n, spec.max_weight)):
            if spec.require_positive_weight and _total(shape) == 0:
                continue
            yield _materialize(shape)


def _total(shape: Shape) -> int:
    w, children = shape
    return w + sum(_total(c) for c in children)


def gen_level_trees(base: WeightedTree, spec: EnumSpec) -> Iterator[WeightedLevelTree]:
    """One canonical representative per equivalence class of level maps on
    ``base`` with at most ``max_levels`` occupied levels.

    A class is determined by the ordered partition by level of the vertices
    at or above the highest weighted level, so rank assignments are deduped
    by that key before any representative is materialized.
    """
    if not base.positive_vertices():
        raise DomainError("level trees need at least one positive weight")
    tree = base.tree
    order = [v for v in tree.preorder() if v != tree.root]
    weighted = [v for v in tree.vertices if base.weight[v] > 0 and v != tree.root]
    root_weighted = base.weight[tree.root] > 0
    n = len(order)
    seen: set = set()
    results: list[WeightedLevelTree] = []

    def finish(classes: list[list[Vertex]]):
        rank = {v: k + 1 for k, cls in enumerate(classes) for v in cls}
        r_m = 0 if root_weighted else min(rank[v] for v in weighted)
        key = tuple(tuple(sorted(cls)) for cls in classes[:r_m])
        if key in seen:
            return
        seen.add(key)
        # canonical levels directly: the classes at or above the weighted
        # frontier take consecutive levels, everything lower goes by depth
        levels = {tree.root: Fraction(0)}
        bottom = Fraction(-r_m)
        for v in order:
            if rank[v] <= r_m:
                levels[v] = Fraction(-rank[v])
            else:
                par = tree.parent[v]
                levels[v] = min(levels[par], bottom) - 1
        if len(set(levels.values())) <= spec.max_levels:
            results.append(WeightedLevelTree(base=base, level=levels))

    # each order type of levels along the tree is built exactly once: a vertex
    # either joins a class strictly below its parent's or founds a new class
    # at any position strictly below it
    def rec(idx: int, classes: list, class_of: dict):
        if idx == n:
            finish(classes)
            return
        v = order[idx]
        par = tree.parent[v]
        lo = classes.index(class_of[par]) if par != tree.root else -1
        for j in range(lo + 1, len(classes)):
            classes[j].append(v)
            class_of[v] = classes[j]
            rec(idx + 1, classes, class_of)
            classes[j].pop()
        fresh = [v]
        class_of[v] = fresh
        for j in range(lo + 1, len(classes) + 1):
            classes.insert(j, fresh)
            rec(idx + 1, classes, class_of)
            classes.pop(j)
        del class_of[v]

    rec(0, [], {})
    results.sort(key=lambda t: tuple(sorted((v, t.level[v]) for v in t.level)))
    yield from results


def gen_instances(spec: EnumSpec, stable_only: bool = False) -> Iterator[WeightedLevelTree]:
    """Every canonical weighted level tree within the bounds."""
    for base in gen_weighted_trees(spec):
        if not base.positive_vertices():
            continue
        if stable_only and not base.is_stable():
            continue
        yield from gen_level_trees(base, spec)


@dataclass
class StrataPoset:
    """The local stratification poset of one weighted level tree: nodes are
    the equivalence classes of its iterated contractions, arrows point from a
    class to each of its proper contractions."""

    nodes: dict[tuple, WeightedLevelTree]
    arrows: set[tuple]

    def reachable(self, src: tuple, dst: tuple) -> bool:
        if src == dst:
            return True
        frontier = {src}
        seen = set()
        while frontier:
            cur = frontier.pop()
            if cur == dst:
                return True
            seen.add(cur)
            frontier |= {b for a, b in self.arrows if a == cur} - seen
        return False


def class_key(t: WeightedLevelTree) -> tuple:
    c = canonical_form(t)
    return (c.root, tuple(sorted(c.tree.parent.items())),
            tuple(sorted(c.weight.items())),
            tuple(sorted((v, c.level[v]) for v in c.level)))


def strata_poset(t: WeightedLevelTree) -> StrataPoset:
    nodes: dict[tuple, WeightedLevelTree] = {}
    arrows: set[tuple] = set()
    todo = [canonical_form(t)]
    while todo:
        cur = todo.pop()
        key = class_key(cur)
        if key in nodes:
            continue
        nodes[key] = cur
        part = index_partition(cur)
        labels = sorted(part.labels(), key=str)
        for r in range(1, len(labels) + 1):
            for combo in itertools.combinations(labels, r):
                nxt = contract(cur, frozenset(combo)).tree
                nkey = class_key(nxt)
                arrows.add((key, nkey))
                if nkey not in nodes:
                    todo.append(canonical_form(nxt))
    return StrataPoset(nodes=nodes, arrows=arrows)
