"""Traverse sections, center loci, divisor pullbacks, and the reconstruction
of a level structure from divisor data.

A traverse section of a rooted tree is an edge set meeting the path from the
root to each minimal vertex exactly once.  Sections of the weight-contracted
tree index the chart components of the center loci ``Z_k`` (sections of size
``k``) and of their unions ``Y_k``; on a twisted chart the ``Y_k`` pullback
is the principal monomial over the gap coordinates of all levels whose
cross-section has at most ``k`` edges.

The reconstruction direction rebuilds a weighted level tree over a weighted
tree from prescribed level slots, placing every vertex as high as the slots,
the weight cap, and its parent allow.  Formal line-bundle bookkeeping is done
with integer exponent vectors over one basis symbol per edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .charts import (ONE, ChartFrame, TwistedChart, _prod, build_chart,
                     sigma, zeta)
from .errors import DomainError, InfeasibleError, VerificationError
from .levels import (Level, SpecialMap, WeightedLevelTree, as_level,
                     cross_section, default_special, edge_span,
                     index_partition, level_data, validate_special)
from .monomial import Monomial, MonomialMap, Symbol, compose
from .tree import Cmp, Edge, RootedTree, Vertex, WeightedTree

TraverseSection = frozenset


def traverse_sections(tree: RootedTree) -> frozenset[TraverseSection]:
    """The complete set of traverse sections, built recursively: each child
    subtree is covered either by its own parent edge or by a section of the
    subtree below it.  The edgeless tree has none."""
    def below(v: Vertex) -> list[frozenset]:
        options_per_child = []
        for c in tree.children(v):
            child_opts = [frozenset([c])] + below(c)
            options_per_child.append(child_opts)
        if not options_per_child:
            return []
        out = []
        for pick in itertools.product(*options_per_child):
            out.append(frozenset().union(*pick))
        return out

    return frozenset(below(tree.root))


def is_traverse_section(tree: RootedTree, edges: Iterable[Edge]) -> bool:
    edges = frozenset(edges)
    if not edges <= tree.edges:
        return False
    for leaf in tree.leaves():
        path = [v for v in tree.root_path(leaf) if v != tree.root]
        if sum(1 for e in path if e in edges) != 1:
            return False
    return True


def section_compare(tree: RootedTree, s1: Iterable[Edge], s2: Iterable[Edge]) -> Cmp:
    """``s1 > s2`` iff they differ and every edge of ``s1`` dominates some
    edge of ``s2`` in the tree order."""
    s1, s2 = frozenset(s1), frozenset(s2)
    if s1 == s2:
        return Cmp.EQUAL

    def dominates(a: frozenset, b: frozenset) -> bool:
        return all(any(tree.edge_geq(e, f) for f in b) for e in a)

    if dominates(s1, s2):
        return Cmp.GREATER
    if dominates(s2, s1):
        return Cmp.LESS
    return Cmp.INCOMPARABLE


def weight_contracted_tree(wt: WeightedTree) -> RootedTree:
    """Contract every edge having a positively weighted vertex at or above its
    upper endpoint; what remains is the weightless upper shell."""
    tree = wt.tree
    marked: dict[Vertex, bool] = {}
    for v in tree.preorder():
        above = marked[tree.parent[v]] if v != tree.root else False
        marked[v] = above or wt.weight[v] > 0
    surviving = {v: tree.parent[v] for v in tree.parent if not marked[tree.parent[v]]}
    return RootedTree(root=tree.root, parent=surviving)


@dataclass(frozen=True)
class BlowupSchedule:
    """Sections of the weight-contracted tree, scheduled by size."""

    gamma_bar: RootedTree
    stages: Mapping[int, frozenset[TraverseSection]]

    def order_compatible(self) -> bool:
        flat = [(k, s) for k, ss in self.stages.items() for s in ss]
        for (k1, s1), (k2, s2) in itertools.permutations(flat, 2):
            if section_compare(self.gamma_bar, s1, s2) is Cmp.GREATER and not k1 < k2:
                return False
        return True


def blowup_schedule(wt: WeightedTree) -> BlowupSchedule:
    bar = weight_contracted_tree(wt)
    stages: dict[int, set] = {}
    for s in traverse_sections(bar):
        stages.setdefault(len(s), set()).add(s)
    return BlowupSchedule(gamma_bar=bar,
                          stages={k: frozenset(v) for k, v in stages.items()})


def zk_components(t: WeightedLevelTree, k: int) -> frozenset[TraverseSection]:
    """Chart components of the ``k``-th cumulative center: sections of the
    weight-contracted tree of size at most ``k`` that touch the non-dropping
    hat edges."""
    if k < 1:
        raise DomainError("component index must be positive")
    data = level_data(t)
    part = index_partition(t)
    bar = weight_contracted_tree(t.base)
    keep = data.hat_edges - part.i_m
    return frozenset(s for s in traverse_sections(bar)
                     if len(s) <= k and s & keep)


def yk_pullback(chart: TwistedChart, k: int, verify: bool = True) -> Monomial:
    """The divisor monomial of the ``k``-th cumulative center: the product of
    the gap coordinates of every level whose cross-section has at most ``k``
    edges.  With ``verify``, each chart component is checked to pull back
    into that divisor via a witness edge all of whose crossed gaps qualify."""
    if k < 1:
        raise DomainError("divisor index must be positive")
    frame = chart.frame
    t = frame.t
    qualifying = {i for i in frame.part.i_plus if len(cross_section(t, i)) <= k}
    divisor = _prod(Monomial.sym(frame.eps(i)) for i in sorted(qualifying, reverse=True))
    if verify:
        keep = frame.data.hat_edges - frame.part.i_m
        for s in zk_components(t, k):
            witnesses = [e for e in s & keep
                         if all(h in qualifying for h in edge_span(t, e))]
            if not witnesses:
                raise VerificationError(
                    "no witness edge places the component inside the divisor",
                    witness=s)
    return divisor


# ---------------------------------------------------------------------------
# Level reconstruction from divisor slots
# ---------------------------------------------------------------------------

def psi2_level_tree(tau: WeightedTree, divisor_indices: Sequence[int]) -> WeightedLevelTree:
    """Rebuild the weighted level tree over ``tau`` whose level index is
    exactly ``{-i_k, ..., -i_1}``: every vertex goes to the highest slot
    below its parent, weighted vertices no higher than the bottom slot, and
    vertices out of slots continue downward by depth.  Raises when no level
    map realizes the requested index."""
    idx = [int(i) for i in divisor_indices]
    if any(i <= 0 for i in idx) or sorted(set(idx)) != idx:
        raise DomainError("divisor indices must be strictly increasing and positive")
    slots = [as_level(-i) for i in idx]  # descending: -i_1 > ... > -i_k
    if not slots:
        if tau.weight[tau.root] == 0:
            raise InfeasibleError("an empty index needs a positively weighted root")
    bottom = slots[-1] if slots else as_level(0)
    tree = tau.tree
    level: dict[Vertex, Level] = {tau.root: as_level(0)}
    for v in tree.preorder():
        if v == tau.root:
            continue
        par_level = level[tree.parent[v]]
        cap = bottom if tau.weight[v] > 0 else as_level(0)
        candidates = [s for s in slots if s < par_level and s <= cap]
        if candidates:
            level[v] = max(candidates)
        else:
            base = min(par_level, bottom)
            level[v] = base - 1
    out = WeightedLevelTree(base=tau, level=level)
    got = index_partition(out).i_plus
    if got != frozenset(slots):
        raise InfeasibleError(
            f"no level map over this tree has level index {sorted(slots)}")
    return out


# ---------------------------------------------------------------------------
# Formal line bundles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormalBundle:
    """An integer combination of the per-edge basis classes."""

    exponents: Mapping[Edge, int]

    def __post_init__(self):
        object.__setattr__(self, "exponents",
                           {e: n for e, n in self.exponents.items() if n})

    @staticmethod
    def basis(e: Edge) -> "FormalBundle":
        return FormalBundle({e: 1})

    @staticmethod
    def trivial() -> "FormalBundle":
        return FormalBundle({})

    def __mul__(self, other: "FormalBundle") -> "FormalBundle":
        out = dict(self.exponents)
        for e, n in other.exponents.items():
            out[e] = out.get(e, 0) + n
        return FormalBundle(out)

    def dual(self) -> "FormalBundle":
        return FormalBundle({e: -n for e, n in self.exponents.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalBundle) and dict(self.exponents) == dict(other.exponents)

    def __hash__(self):
        return hash(tuple(sorted(self.exponents.items())))


def ancestor_bundle(t: WeightedLevelTree, e: Edge) -> FormalBundle:
    """The product of the basis classes over all edges at or above ``e``."""
    out = FormalBundle.trivial()
    for a in t.tree.descendants_geq(e):
        out = out * FormalBundle.basis(a)
    return out


def twisted_bundles(t: WeightedLevelTree, special: SpecialMap
                    ) -> tuple[dict[Level, FormalBundle], dict[Edge, FormalBundle]]:
    """The per-level and per-hat-edge twisted classes, built downward: each
    one is its basis class divided by the twisted classes of the levels
    strictly inside its ascent gap (resp. its span gap)."""
    validate_special(t, special)
    part = index_partition(t)
    data = level_data(t)
    by_level: dict[Level, FormalBundle] = {}
    for i in sorted(part.i_plus, reverse=True):
        se = special[i]
        i1 = t.level[t.tree.parent[se]]
        out = FormalBundle.basis(se)
        for j in t.levels_in(i, i1, include_lo=False):
            out = out * by_level[j].dual()
        by_level[i] = out
    by_edge: dict[Edge, FormalBundle] = {}
    for e in data.hat_edges:
        out = FormalBundle.basis(e)
        for j in t.levels_in(data.edge_level[e], t.level[t.tree.parent[e]],
                             include_lo=False):
            out = out * by_level[j].dual()
        by_edge[e] = out
    return by_level, by_edge


def bundle_identity(t: WeightedLevelTree, special: SpecialMap | None = None) -> bool:
    """For every hat edge, correcting its twisted class by the ancestor
    twists recovers the plain ancestor product divided by all twisted level
    classes strictly above its level."""
    if special is None:
        special = default_special(t)
    part = index_partition(t)
    if not part.i_plus:
        raise DomainError("the identity needs a nonempty level index")
    by_level, by_edge = twisted_bundles(t, special)
    data = level_data(t)
    for e in data.hat_edges:
        lhs = by_edge[e]
        for a in t.tree.ancestors_gt(e):
            lhs = lhs * by_edge[a] * by_level[data.edge_level[a]].dual()
        rhs = ancestor_bundle(t, e)
        for j in t.levels_in(data.edge_level[e], as_level(0), include_lo=False):
            rhs = rhs * by_level[j].dual()
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# The blowup-side chart and its comparison with the twisted chart
# ---------------------------------------------------------------------------

def _tilde_syms(frame: ChartFrame):
    def teps(i: Level) -> Symbol:
        return Symbol("t:eps", i)

    def rho(e: Edge) -> Monomial:
        if e in frame.special_edges():
            return ONE
        return Monomial.sym(Symbol("rho", e))

    def zcheck(e: Edge) -> Symbol:
        return Symbol("zch", e)

    def ztilde(e: Edge) -> Symbol:
        return Symbol("zt", e)

    def s_tag(j: Hashable) -> Symbol:
        return Symbol("s", j)

    return teps, rho, zcheck, ztilde, s_tag


def blowup_side_maps(t: WeightedLevelTree, special: SpecialMap | None = None,
                     tags: Sequence[Hashable] = ("j1",)
                     ) -> tuple[MonomialMap, MonomialMap, TwistedChart]:
    """The blowup-chart picture of the same stratum: the projection to the
    base writes each modular parameter as a unit ``rho`` (or a vanishing
    ``zch`` for dropping edges) times its crossed gap coordinates, and the
    comparison map rewrites the twisted chart's coordinates in those terms.
    Returns ``(projection, comparison, chart)``."""
    if special is None:
        special = default_special(t)
    chart = build_chart(t, special, tags=tags)
    frame = chart.frame
    teps, rho, zcheck, ztilde, s_tag = _tilde_syms(frame)
    data, part = frame.data, frame.part

    source = {teps(i) for i in part.i_plus}
    source |= {Symbol("rho", e)
               for e in data.hat_edges - part.i_m - frame.special_edges()}
    source |= {zcheck(e) for e in part.i_m}
    source |= {ztilde(e) for e in part.i_minus}
    source |= {s_tag(j) for j in tags}
    source = frozenset(source)

    proj_assign: dict[Symbol, Monomial] = {}
    for e in data.hat_edges:
        gaps = _prod(Monomial.sym(teps(h)) for h in edge_span(t, e))
        head = Monomial.sym(zcheck(e)) if e in part.i_m else rho(e)
        proj_assign[zeta(e)] = head * gaps
    for e in part.i_minus:
        proj_assign[zeta(e)] = Monomial.sym(ztilde(e))
    for j in tags:
        proj_assign[sigma(j)] = Monomial.sym(s_tag(j))
    projection = MonomialMap(source_coords=source,
                             target_coords=frozenset(proj_assign),
                             assignment=proj_assign)

    def rho_anc(e: Edge, strict: bool) -> Monomial:
        edges = t.tree.ancestors_gt(e) if strict else t.tree.descendants_geq(e)
        return _prod(rho(a) for a in edges)

    cmp_assign: dict[Symbol, Monomial] = {}
    for i in part.i_plus:
        cmp_assign[frame.eps(i)] = Monomial.sym(teps(i))
    for e in data.hat_edges - frame.special_edges():
        anchor = rho_anc(special[data.edge_level[e]], strict=False)
        if e in part.i_m:
            cmp_assign[frame.usym(e)] = (Monomial.sym(zcheck(e))
                                         * rho_anc(e, strict=True) / anchor)
        else:
            cmp_assign[frame.usym(e)] = rho_anc(e, strict=False) / anchor
    for e in part.i_minus:
        cmp_assign[frame.zsym(e)] = Monomial.sym(ztilde(e))
    for j in tags:
        cmp_assign[frame.wsym(j)] = Monomial.sym(s_tag(j))
    comparison = MonomialMap(source_coords=source,
                             target_coords=frame.coords(),
                             assignment=cmp_assign)
    return projection, comparison, chart


def psi2_chart_check(t: WeightedLevelTree, special: SpecialMap | None = None,
                     tags: Sequence[Hashable] = ("j1",)) -> bool:
    """The twisted chart absorbs the blowup chart: chart-to-base composed
    with the comparison map equals the projection, exactly."""
    projection, comparison, chart = blowup_side_maps(t, special, tags)
    return compose(chart.theta, comparison).assignment == projection.assignment


def stage_ideals(t: WeightedLevelTree, step: int
                 ) -> tuple[frozenset[Monomial], frozenset[Monomial], Monomial]:
    """Generators of the stage-center ideal and of the cumulative-center
    ideal at the given stage, plus the principal scaling monomial.

    The stage center is cut out by one coordinate per edge of the stage's
    cross-section: a repeated-center coordinate (``zch``) when the edge
    already sat in the previous stage's section, a fresh one otherwise.  The
    cumulative center adds the union with all earlier exceptional divisors,
    whose ideal is the principal product of their gap coordinates.
    """
    if step < 1:
        raise DomainError("step must be positive")
    part = index_partition(t)
    cur = as_level(-step)
    if cur not in part.i_plus:
        raise DomainError(f"this chart sees no center at stage {step}")
    prev = as_level(-(step - 1))
    section = cross_section(t, cur)
    prev_section = cross_section(t, prev) if prev in part.i_plus else frozenset()
    generators = frozenset(
        Monomial.sym(Symbol("zch" if e in prev_section else "zt", e))
        for e in section)
    factor = _prod(Monomial.sym(Symbol("t:eps", as_level(-j)))
                   for j in range(1, step) if as_level(-j) in part.i_plus)
    cumulative = frozenset(g * factor for g in generators)
    return generators, cumulative, factor


def ideal_transform_check(t: WeightedLevelTree, step: int) -> bool:
    """The cumulative-center ideal differs from the stage-center ideal by
    exactly one principal monomial: dividing its generators by the scaling
    monomial recovers the stage generators, and the scaling monomial involves
    only earlier gap coordinates."""
    part = index_partition(t)
    if as_level(-step) not in part.i_plus:
        return True  # this chart sees no center at the given stage
    generators, cumulative, factor = stage_ideals(t, step)
    if frozenset(g / factor for g in cumulative) != generators:
        return False
    return all(s.kind == "t:eps" and -s.key < step for s in factor.symbols())
