"""Rooted trees with tree order, and weighted trees.

Vertices are opaque strings.  Every non-root vertex ``v`` has a unique parent
edge, and we identify that edge with ``v`` itself (the edge name *is* the name
of its lower endpoint).  This makes the vertex/edge bijection lossless and
keeps all edge-indexed maps plain string-keyed dicts.

The tree order is ``v > w`` iff ``v != w`` and ``v`` lies on the path from the
root to ``w``; the root is the unique maximum.  The induced order on edges is
``e > f`` iff the lower endpoint of ``e`` is >= the upper endpoint of ``f``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import StructureError

Vertex = str
Edge = str  # an edge is named by its child (lower) endpoint


class Cmp(enum.Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class RootedTree:
    """A finite rooted tree given by its root and parent map.

    ``parent`` maps every non-root vertex to its parent; the edge set is
    derived (one edge per non-root vertex).  Instances are immutable after
    construction and validated eagerly.
    """

    root: Vertex
    parent: Mapping[Vertex, Vertex]
    _children: dict = field(init=False, repr=False, compare=False)
    _paths: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        if self.root in self.parent:
            raise StructureError(f"root {self.root!r} must not have a parent")
        verts = {self.root} | set(self.parent)
        children: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
        for child, par in self.parent.items():
            if par not in verts:
                raise StructureError(f"parent {par!r} of {child!r} is not a vertex")
            children[par].append(child)
        # every vertex must reach the root (connected, acyclic)
        for v in self.parent:
            seen = {v}
            cur = v
            while cur != self.root:
                cur = self.parent[cur]
                if cur in seen:
                    raise StructureError(f"cycle through {cur!r}")
                seen.add(cur)
        for v in children:
            children[v].sort()
        object.__setattr__(self, "_children", children)
        paths: dict[Vertex, tuple[Vertex, ...]] = {self.root: (self.root,)}
        for v in children:
            pending = []
            cur = v
            while cur not in paths:
                pending.append(cur)
                cur = self.parent[cur]
            for u in reversed(pending):
                paths[u] = (u,) + paths[self.parent[u]]
        object.__setattr__(self, "_paths", paths)

    # -- basic sets ---------------------------------------------------------

    @property
    def vertices(self) -> frozenset[Vertex]:
        return frozenset(self._children)

    @property
    def edges(self) -> frozenset[Edge]:
        return frozenset(self.parent)

    def children(self, v: Vertex) -> tuple[Vertex, ...]:
        self._check_vertex(v)
        return tuple(self._children[v])

    def leaves(self) -> frozenset[Vertex]:
        return frozenset(v for v, cs in self._children.items() if not cs)

    def _check_vertex(self, v: Vertex) -> None:
        if v not in self._children:
            raise StructureError(f"unknown vertex {v!r}")

    def _check_edge(self, e: Edge) -> None:
        if e not in self.parent:
            raise StructureError(f"unknown edge {e!r}")

    # -- tree order ---------------------------------------------------------

    def root_path(self, v: Vertex) -> tuple[Vertex, ...]:
        """Vertices from ``v`` up to and including the root."""
        self._check_vertex(v)
        return self._paths[v]

    def endpoints(self, e: Edge) -> tuple[Vertex, Vertex]:
        """Return ``(v_plus, v_minus)`` with ``v_plus`` the parent endpoint."""
        self._check_edge(e)
        return self.parent[e], e

    def compare_vertices(self, v: Vertex, w: Vertex) -> Cmp:
        self._check_vertex(v)
        self._check_vertex(w)
        if v == w:
            return Cmp.EQUAL
        if v in self.root_path(w):
            return Cmp.GREATER
        if w in self.root_path(v):
            return Cmp.LESS
        return Cmp.INCOMPARABLE

    def vertex_geq(self, v: Vertex, w: Vertex) -> bool:
        return self.compare_vertices(v, w) in (Cmp.GREATER, Cmp.EQUAL)

    def compare_edges(self, e: Edge, f: Edge) -> Cmp:
        """Order on edges: ``e > f`` iff ``v_e^- >= v_f^+``."""
        self._check_edge(e)
        self._check_edge(f)
        if e == f:
            return Cmp.EQUAL
        if self.vertex_geq(e, self.parent[f]):
            return Cmp.GREATER
        if self.vertex_geq(f, self.parent[e]):
            return Cmp.LESS
        return Cmp.INCOMPARABLE

    def edge_geq(self, e: Edge, f: Edge) -> bool:
        return self.compare_edges(e, f) in (Cmp.GREATER, Cmp.EQUAL)

    def descendants_geq(self, e: Edge) -> frozenset[Edge]:
        """All edges ``f >= e``: the edges on the path from ``v_e^-`` to the root."""
        self._check_edge(e)
        return frozenset(v for v in self.root_path(e) if v != self.root)

    def ancestors_gt(self, e: Edge) -> frozenset[Edge]:
        return self.descendants_geq(e) - {e}

    # -- traversal ----------------------------------------------------------

    def preorder(self) -> Iterator[Vertex]:
        stack = [self.root]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(self._children[v]))

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"root": self.root, "parents": dict(sorted(self.parent.items()))}

    @classmethod
    def from_json_dict(cls, data: dict) -> "RootedTree":
        try:
            return cls(root=data["root"], parent=dict(data["parents"]))
        except KeyError as exc:
            raise StructureError(f"missing tree field {exc}") from exc


@dataclass(frozen=True)
class WeightedTree:
    """A rooted tree with a nonnegative integer weight on each vertex."""

    tree: RootedTree
    weight: Mapping[Vertex, int]

    def __post_init__(self):
        object.__setattr__(self, "weight", dict(self.weight))
        verts = self.tree.vertices
        if set(self.weight) != verts:
            raise StructureError("weight map must cover exactly the vertex set")
        for v, w in self.weight.items():
            if not isinstance(w, int) or w < 0:
                raise StructureError(f"weight of {v!r} must be a nonnegative integer")

    @property
    def root(self) -> Vertex:
        return self.tree.root

    def total_weight(self) -> int:
        return sum(self.weight.values())

    def positive_vertices(self) -> frozenset[Vertex]:
        return frozenset(v for v, w in self.weight.items() if w > 0)

    def is_stable(self) -> bool:
        """Every weight-0 non-root vertex carries at least three edges
        (its parent edge plus two children); the root is exempt."""
        for v in self.tree.vertices:
            if v == self.root or self.weight[v] > 0:
                continue
            if 1 + len(self.tree.children(v)) < 3:
                return False
        return True

    def to_json_dict(self) -> dict:
        d = self.tree.to_json_dict()
        d["weights"] = dict(sorted(self.weight.items()))
        return d

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeightedTree":
        tree = RootedTree.from_json_dict(data)
        try:
            weights = {v: int(w) for v, w in data["weights"].items()}
        except KeyError as exc:
            raise StructureError(f"missing tree field {exc}") from exc
        return cls(tree=tree, weight=weights)


def to_dot(wt: WeightedTree, levels: Mapping[Vertex, object] | None = None) -> str:
    """Emit a graphviz digraph; with levels, draw dotted per-level rails."""
    lines = ["digraph leveltree {", "  rankdir=TB;"]
    by_level: dict[object, list[Vertex]] = {}
    if levels is not None:
        for v, lv in levels.items():
            by_level.setdefault(lv, []).append(v)
        for lv in sorted(by_level, reverse=True):
            vs = " ".join(f'"{v}"' for v in sorted(by_level[lv]))
            lines.append(f'  {{ rank=same; "rail_{lv}" [shape=plaintext label="{lv}"]; {vs} }}')
        rails = [f'"rail_{lv}"' for lv in sorted(by_level, reverse=True)]
        if len(rails) > 1:
            lines.append("  " + " -> ".join(rails) + " [style=dotted arrowhead=none];")
    for v in sorted(wt.tree.vertices):
        shape = "circle" if wt.weight[v] == 0 else "doublecircle"
        lines.append(f'  "{v}" [shape={shape} label="{v}:{wt.weight[v]}"];')
    for child in sorted(wt.tree.parent):
        lines.append(f'  "{wt.tree.parent[child]}" -> "{child}" [label="{child}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_json(wt: WeightedTree, levels: Mapping[Vertex, object] | None = None) -> str:
    d = wt.to_json_dict()
    if levels is not None:
        d["levels"] = {v: str(levels[v]) for v in sorted(levels)}
    return json.dumps(d, sort_keys=True, indent=2) + "\n"
