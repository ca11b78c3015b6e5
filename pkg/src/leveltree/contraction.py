"""Contraction of a weighted level tree along an index subset.

Given ``I`` inside the index set of ``t``, the contracted tree is obtained by
collapsing the edges selected below, pushing weights onto the surviving
endpoint, and re-leveling:

* contracted edges: every ``I_minus`` edge, plus each edge of
  ``(hat \\ I_m-part-of-the-index-set) | I_m`` whose occupied level span
  ``[edge_level(e), level(v_e^+))`` lies inside ``I_plus``;
* surviving lower endpoints of hat edges are lifted to the lowest surviving
  ``I_plus`` level dominating everything merged into them; surviving ``I_m``
  edges are lifted exactly to the new bottom level ``min(I_plus \\ I)``;
  everything else keeps the highest level merged into it.

``verify_index_identities`` checks how the index data transforms.  The
literal bookkeeping identity for the minus part admits boundary
counterexamples ("dropout" edges, see ``minus_part_dropouts``), so the strict
and the corrected reading are exposed separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DomainError
from .levels import (Level, WeightedLevelTree, as_level, canonical_form,
                     edge_span, index_partition, is_equivalent, level_data,
                     phi_bijection)
from .tree import Edge, RootedTree, Vertex, WeightedTree


def contracted_edges(t: WeightedLevelTree, subset: Iterable) -> frozenset[Edge]:
    part = index_partition(t)
    i_plus, i_m, i_minus = part.split(subset)
    data = level_data(t)
    out = set(i_minus)
    for e in (data.hat_edges - part.i_m) | i_m:
        if edge_span(t, e) <= i_plus:
            out.add(e)
    return frozenset(out)


@dataclass(frozen=True)
class ContractionResult:
    tree: WeightedLevelTree
    projection: Mapping[Vertex, Vertex]
    contracted: frozenset[Edge]


def contract(t: WeightedLevelTree, subset: Iterable) -> ContractionResult:
    part = index_partition(t)
    i_plus, i_m, i_minus = part.split(subset)
    gone = contracted_edges(t, subset)
    tree = t.tree
    data = level_data(t)

    # projection: walk up while the current vertex's own edge is contracted
    proj: dict[Vertex, Vertex] = {}
    for v in tree.preorder():
        if v == tree.root or v not in gone:
            proj[v] = v
        else:
            proj[v] = proj[tree.parent[v]]

    surviving = [v for v in tree.vertices if v != tree.root and v not in gone]
    new_parent = {v: proj[tree.parent[v]] for v in surviving}
    new_weight: dict[Vertex, int] = {proj[tree.root]: 0}
    for v in surviving:
        new_weight[v] = 0
    for v in tree.vertices:
        new_weight[proj[v]] += t.weight[v]

    plus_left = sorted(part.i_plus - i_plus)
    preimage: dict[Vertex, list[Vertex]] = {}
    for v in tree.vertices:
        preimage.setdefault(proj[v], []).append(v)

    new_level: dict[Vertex, Level] = {tree.root: as_level(0)}
    for e in surviving:
        pre_levels = [t.level[v] for v in preimage[e]]
        if e in data.hat_edges and e not in part.i_m:
            candidates = [x for x in plus_left if all(x >= y for y in pre_levels)]
            if not candidates:
                raise DomainError(f"no surviving level dominates the class of {e!r}")
            new_level[e] = min(candidates)
        elif e in i_m:
            if not plus_left:
                raise DomainError("a surviving lifted edge needs a surviving level")
            new_level[e] = plus_left[0]
        else:  # (I_m \ i_m) edges and minus edges keep their top merged level
            new_level[e] = max(pre_levels)

    new_tree = WeightedLevelTree(
        base=WeightedTree(tree=RootedTree(root=tree.root, parent=new_parent),
                          weight=new_weight),
        level=new_level,
    )
    return ContractionResult(tree=new_tree, projection=proj, contracted=gone)


# ---------------------------------------------------------------------------
# Index bookkeeping identities
# ---------------------------------------------------------------------------

def minus_part_dropouts(t: WeightedLevelTree, subset: Iterable) -> frozenset[Edge]:
    """Surviving below-``m`` hat edges whose upper endpoint lands exactly on
    the new bottom level: they leave the hat-edge family of the contraction
    and reappear in its minus part."""
    part = index_partition(t)
    i_plus, i_m, _ = part.split(subset)
    new_m = min(sorted(part.i_plus - i_plus) or [as_level(0)])
    return frozenset(e for e in part.i_m - i_m
                     if not t.level[t.tree.parent[e]] > new_m)


@dataclass(frozen=True)
class IndexIdentityReport:
    m_ok: bool
    plus_ok: bool
    mid_ok: bool
    minus_ok_strict: bool
    minus_ok_corrected: bool
    dropouts: frozenset[Edge]

    def all_strict(self) -> bool:
        return self.m_ok and self.plus_ok and self.mid_ok and self.minus_ok_strict

    def all_corrected(self) -> bool:
        return self.m_ok and self.plus_ok and self.mid_ok and self.minus_ok_corrected


def index_identity_report(t: WeightedLevelTree, subset: Iterable,
                          result: ContractionResult | None = None) -> IndexIdentityReport:
    part = index_partition(t)
    i_plus, i_m, i_minus = part.split(subset)
    res = result if result is not None else contract(t, subset)
    new_part = index_partition(res.tree)
    new_m = level_data(res.tree).m

    expected_m = min(sorted(part.i_plus - i_plus) or [as_level(0)])
    expected_mid = frozenset(e for e in part.i_m - i_m
                             if t.level[t.tree.parent[e]] > expected_m)
    dropouts = minus_part_dropouts(t, subset)
    expected_minus_strict = part.i_minus - i_minus
    return IndexIdentityReport(
        m_ok=(new_m == expected_m),
        plus_ok=(new_part.i_plus == part.i_plus - i_plus),
        mid_ok=(new_part.i_m == expected_mid),
        minus_ok_strict=(new_part.i_minus == expected_minus_strict),
        minus_ok_corrected=(new_part.i_minus == expected_minus_strict | dropouts),
        dropouts=dropouts,
    )


def verify_index_identities(t: WeightedLevelTree, subset: Iterable,
                            strict: bool = True) -> bool:
    """Check the four index bookkeeping identities of the contraction.

    ``strict=True`` asserts the minus part is exactly the uncontracted minus
    labels; ``strict=False`` additionally allows the dropout edges, the only
    reading consistent with recomputing the index partition from scratch.
    """
    report = index_identity_report(t, subset)
    return report.all_strict() if strict else report.all_corrected()


def verify_equivalence_compat(t: WeightedLevelTree, t2: WeightedLevelTree,
                              subset: Iterable) -> bool:
    """Contracting equivalent trees along transported subsets stays equivalent."""
    if not is_equivalent(t, t2):
        raise DomainError("inputs must be equivalent level trees")
    moved = phi_bijection(t, t2, subset)
    return is_equivalent(contract(t, subset).tree, contract(t2, moved).tree)


def nested_contraction_coherent(t: WeightedLevelTree, subset: Iterable,
                                subset2: Iterable) -> bool:
    """Contracting in two stages agrees with contracting the union, up to
    equivalence and canonical relabeling of the intermediate index labels."""
    first = contract(t, subset).tree
    inner = index_partition(first)
    sub2 = frozenset(subset2) & inner.labels()
    if frozenset(subset2) != sub2:
        raise DomainError("second subset must consist of surviving labels")
    staged = contract(first, sub2).tree
    merged = contract(t, frozenset(subset) | _relabel_to_outer(t, subset, sub2)).tree
    return canonical_form(staged).level == canonical_form(merged).level and \
        canonical_form(staged).base == canonical_form(merged).base


def _relabel_to_outer(t: WeightedLevelTree, subset: Iterable, sub2: frozenset) -> frozenset:
    # Edge labels persist through contraction; level labels do too because the
    # contraction keeps surviving I_plus levels at their original values.
    part = index_partition(t)
    out = set()
    for lab in sub2:
        if isinstance(lab, Level) and lab not in part.i_plus:
            raise DomainError(f"level {lab} does not come from the outer index set")
        out.add(lab)
    return frozenset(out)
