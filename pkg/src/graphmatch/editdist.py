"""Graph edit distance: exact tree search, beam search, bipartite bound.

The edit model transforms g1 into g2 through node substitutions, deletions
and insertions plus the edge operations they induce.  Costs:

* node substitution: y_node * d(mu1(u), mu2(v)), where d is the Euclidean
  distance for vector labels, 0/1 equality for symbols, 0 for two empty
  labels;
* node deletion / insertion: x_node;
* edge substitution: y_edge * d(nu1(e), nu2(f));
* edge deletion / insertion: x_edge;
* path contraction (a preprocessing op, see the contraction module):
  z_path * d(mu(u1), mu(un)) between the chain's endpoint labels.

Deletions can be exempted (cost 0) for chosen vertices; ``extended_exemption``
builds the set for the degree-k, non-cut-vertex rule.

The exact search processes g1's vertices in their stored order; each tree
level either maps the next vertex onto an unused g2 vertex or deletes it, and
leftover g2 vertices are inserted when a leaf is reached.  With h = 0 this is
uniform-cost search, which is what ``ged`` runs by default; an admissible
unmatched-node-count heuristic can be switched on.  ``beam_width`` keeps only
w partial paths per level, picked so that widening the beam never drops a
narrower beam's survivors; the result is an upper bound on the exact distance
that is nonincreasing in w.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .geometric import solve_lsap
from .graphs import AttributedGraph, canonical_edge, cut_vertices


def label_distance(a, b) -> float:
    """Unweighted label dissimilarity.

    Euclidean for two vectors, 0/1 for two symbols, 0 for two empty labels.
    A kind mismatch (one side empty or a symbol against a vector) counts as
    maximally different, i.e. 1.
    """
    if a is None and b is None:
        return 0.0
    if isinstance(a, tuple) and isinstance(b, tuple):
        return math.dist(a, b)
    if isinstance(a, str) and isinstance(b, str):
        return 0.0 if a == b else 1.0
    return 1.0


@dataclass(frozen=True)
class EditCostParams:
    """Nonnegative cost constants of the edit model."""

    x_node: float = 1.0
    y_node: float = 1.0
    x_edge: float = 1.0
    y_edge: float = 1.0
    z_path: float = 1.0

    def __post_init__(self):
        for name in ("x_node", "y_node", "x_edge", "y_edge", "z_path"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


DEFAULT_PARAMS = EditCostParams()


@dataclass(frozen=True)
class DeletionExemption:
    """Vertices of g1 whose deletion costs nothing."""

    vertices: frozenset[int]

    def exempt(self, v: int) -> bool:
        return v in self.vertices


def extended_exemption(g: AttributedGraph, k: int) -> DeletionExemption:
    """Free deletion for degree-k vertices that are not cut vertices."""
    cuts = cut_vertices(g)
    return DeletionExemption(
        frozenset(v for v in g.vertices if g.degree(v) == k and v not in cuts)
    )


@dataclass(frozen=True)
class EditOp:
    kind: str  # node_sub, node_del, node_ins, edge_sub, edge_del, edge_ins, path_contract
    source: object = None
    target: object = None
    source_label: object = None
    target_label: object = None
    cost: float = 0.0


def edit_cost(
    op: EditOp,
    params: EditCostParams = DEFAULT_PARAMS,
    exempt: DeletionExemption | None = None,
) -> float:
    """Cost of one edit operation under ``params``."""
    kind = op.kind
    if kind == "node_sub":
        return params.y_node * label_distance(op.source_label, op.target_label)
    if kind == "node_del":
        if exempt is not None and exempt.exempt(op.source):
            return 0.0
        return params.x_node
    if kind == "node_ins":
        return params.x_node
    if kind == "edge_sub":
        return params.y_edge * label_distance(op.source_label, op.target_label)
    if kind in ("edge_del", "edge_ins"):
        return params.x_edge
    if kind == "path_contract":
        return params.z_path * label_distance(op.source_label, op.target_label)
    raise ValueError(f"unknown edit op kind {kind!r}")


@dataclass(frozen=True)
class EditPath:
    """A complete edit path: node/edge operations and their total cost.

    ``preprocessing`` records structure-reducing operations (path
    contractions) that were applied before matching; their costs are kept out
    of ``total_cost``.
    """

    ops: tuple[EditOp, ...]
    total_cost: float
    complete: bool = True
    preprocessing: tuple[EditOp, ...] = ()

    @property
    def mapping(self) -> dict[int, int]:
        """The induced injective node mapping (substitutions only)."""
        return {op.source: op.target for op in self.ops if op.kind == "node_sub"}


# -- building a complete path from a node mapping ---------------------------


def path_from_mapping(
    g1: AttributedGraph,
    g2: AttributedGraph,
    mapping: dict[int, int],
    params: EditCostParams = DEFAULT_PARAMS,
    exempt: DeletionExemption | None = None,
) -> EditPath:
    """The complete edit path induced by an injective partial node mapping.

    Mapped vertices are substituted, the rest of g1 deleted and the rest of
    g2 inserted; every edge operation follows from the node decisions.
    """
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("mapping is not injective")
    ops = []

    def add(kind, source=None, target=None, source_label=None, target_label=None):
        cost = edit_cost(
            EditOp(kind, source, target, source_label, target_label), params, exempt
        )
        ops.append(EditOp(kind, source, target, source_label, target_label, cost))

    for u in g1.vertices:
        if u in mapping:
            v = mapping[u]
            add("node_sub", u, v, g1.node_label(u), g2.node_label(v))
        else:
            add("node_del", u, source_label=g1.node_label(u))
    used = set(mapping.values())
    for v in g2.vertices:
        if v not in used:
            add("node_ins", target=v, target_label=g2.node_label(v))

    image_edges = set()
    for (a, b) in g1.edges:
        if a in mapping and b in mapping:
            f = canonical_edge(mapping[a], mapping[b])
            if g2.has_edge(*f):
                image_edges.add(f)
                add("edge_sub", (a, b), f, g1.edge_label(a, b), g2.edge_label(*f))
            else:
                add("edge_del", (a, b), source_label=g1.edge_label(a, b))
        else:
            add("edge_del", (a, b), source_label=g1.edge_label(a, b))
    for f in g2.edges:
        if f not in image_edges:
            add("edge_ins", target=f, target_label=g2.edge_label(*f))

    total = sum(op.cost for op in ops)
    return EditPath(tuple(ops), total)


# -- exact and beam search ---------------------------------------------------


class _SearchContext:
    """Precomputed tables shared by every node expansion."""

    def __init__(self, g1, g2, params, exempt):
        self.params = params
        self.u_list = g1.vertices
        self.v_list = g2.vertices
        self.n1 = len(self.u_list)
        self.n2 = len(self.v_list)
        self.g1 = g1
        self.g2 = g2
        self.u_labels = [g1.node_label(u) for u in self.u_list]
        self.v_labels = [g2.node_label(v) for v in self.v_list]
        self.exempt_flags = [
            exempt is not None and exempt.exempt(u) for u in self.u_list
        ]
        # Remaining-exempt counts for the admissible heuristic.
        self.exempt_suffix = [0] * (self.n1 + 1)
        for i in range(self.n1 - 1, -1, -1):
            self.exempt_suffix[i] = self.exempt_suffix[i + 1] + (
                1 if self.exempt_flags[i] else 0
            )

    def substitute_delta(self, mapping: tuple, i: int, j: int) -> float:
        """Cost of mapping u_i onto v_j on top of the processed prefix."""
        p = self.params
        u, v = self.u_list[i], self.v_list[j]
        cost = p.y_node * label_distance(self.u_labels[i], self.v_labels[j])
        for q in range(i):
            uq = self.u_list[q]
            e1 = self.g1.has_edge(u, uq)
            jq = mapping[q]
            if jq is None:
                if e1:
                    cost += p.x_edge
                continue
            vq = self.v_list[jq]
            e2 = self.g2.has_edge(v, vq)
            if e1 and e2:
                cost += p.y_edge * label_distance(
                    self.g1.edge_label(u, uq), self.g2.edge_label(v, vq)
                )
            elif e1 or e2:
                cost += p.x_edge
        return cost

    def delete_delta(self, i: int) -> float:
        """Cost of deleting u_i: the node plus its edges into the prefix."""
        p = self.params
        u = self.u_list[i]
        cost = 0.0 if self.exempt_flags[i] else p.x_node
        for q in range(i):
            if self.g1.has_edge(u, self.u_list[q]):
                cost += p.x_edge
        return cost

    def completion_delta(self, used: int) -> float:
        """Insert every unused g2 vertex and each edge touching one."""
        p = self.params
        unused = [j for j in range(self.n2) if not used >> j & 1]
        cost = p.x_node * len(unused)
        unused_ids = {self.v_list[j] for j in unused}
        for (a, b) in self.g2.edges:
            if a in unused_ids or b in unused_ids:
                cost += p.x_edge
        return cost

    def heuristic(self, i: int, used: int) -> float:
        rem1 = self.n1 - i
        rem2 = self.n2 - bin(used).count("1")
        h = self.params.x_node * max(0, rem2 - rem1)
        paid_deletions = max(0, (rem1 - rem2) - self.exempt_suffix[i])
        return h + self.params.x_node * paid_deletions

    def finish(self, mapping: tuple) -> EditPath:
        as_dict = {
            self.u_list[i]: self.v_list[j]
            for i, j in enumerate(mapping)
            if j is not None
        }
        exempt = DeletionExemption(
            frozenset(
                u for u, flag in zip(self.u_list, self.exempt_flags) if flag
            )
        )
        return path_from_mapping(self.g1, self.g2, as_dict, self.params, exempt)


def ged(
    g1: AttributedGraph,
    g2: AttributedGraph,
    params: EditCostParams = DEFAULT_PARAMS,
    *,
    beam_width: int | None = None,
    use_heuristic: bool = False,
    exempt: DeletionExemption | None = None,
) -> EditPath:
    """Graph edit distance between g1 and g2.

    Exact by default (optimal over every complete edit path); with
    ``beam_width`` = w, only w partial paths survive each level and the
    result is an upper bound that never increases as w grows.
    """
    if beam_width is not None and beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    ctx = _SearchContext(g1, g2, params, exempt)
    if beam_width is not None:
        return _beam(ctx, beam_width)
    return _astar(ctx, use_heuristic)


def _astar(ctx: _SearchContext, use_heuristic: bool) -> EditPath:
    counter = itertools.count()
    # Entries: (f, -depth, seq, cost, i, used, mapping, completed)
    h0 = ctx.heuristic(0, 0) if use_heuristic else 0.0
    heap = [(h0, 0, next(counter), 0.0, 0, 0, (), False)]
    while heap:
        f, _, _, cost, i, used, mapping, completed = heapq.heappop(heap)
        if completed:
            path = ctx.finish(mapping)
            # The search cost and the reconstructed path cost must agree.
            assert abs(path.total_cost - cost) < 1e-9
            return path
        if i == ctx.n1:
            total = cost + ctx.completion_delta(used)
            heapq.heappush(
                heap, (total, -(i + 1), next(counter), total, i, used, mapping, True)
            )
            continue
        for j in range(ctx.n2):
            if used >> j & 1:
                continue
            c = cost + ctx.substitute_delta(mapping, i, j)
            nused = used | (1 << j)
            h = ctx.heuristic(i + 1, nused) if use_heuristic else 0.0
            heapq.heappush(
                heap,
                (c + h, -(i + 1), next(counter), c, i + 1, nused, mapping + (j,), False),
            )
        c = cost + ctx.delete_delta(i)
        h = ctx.heuristic(i + 1, used) if use_heuristic else 0.0
        heapq.heappush(
            heap,
            (c + h, -(i + 1), next(counter), c, i + 1, used, mapping + (None,), False),
        )
    raise RuntimeError("search exhausted without a complete path")  # pragma: no cover


def _beam(ctx: _SearchContext, width: int) -> EditPath:
    counter = itertools.count()
    frontier = [(0.0, next(counter), 0, ())]  # (cost, seq, used, mapping)
    for i in range(ctx.n1):
        # Survivors are picked rank by rank: after feeding in the children of
        # the r-th surviving parent, the cheapest candidate so far takes rank
        # r.  For fixed inputs the rank-r survivor does not depend on the
        # width, so a wider beam keeps a superset of a narrower beam's
        # frontier and the returned bound is monotone in the width (plain
        # keep-the-w-cheapest pruning has no such guarantee).
        heap: list = []
        kept = []
        for cost, _, used, mapping in frontier:
            for j in range(ctx.n2):
                if used >> j & 1:
                    continue
                heapq.heappush(
                    heap,
                    (
                        cost + ctx.substitute_delta(mapping, i, j),
                        next(counter),
                        used | (1 << j),
                        mapping + (j,),
                    ),
                )
            heapq.heappush(
                heap, (cost + ctx.delete_delta(i), next(counter), used, mapping + (None,))
            )
            kept.append(heapq.heappop(heap))
        while len(kept) < width and heap:
            kept.append(heapq.heappop(heap))
        frontier = kept
    best = min(
        ((cost + ctx.completion_delta(used), seq, mapping)
         for cost, seq, used, mapping in frontier),
        key=lambda s: (s[0], s[1]),
    )
    path = ctx.finish(best[2])
    assert abs(path.total_cost - best[0]) < 1e-9
    return path


# -- bipartite approximation -------------------------------------------------


def _local_edge_cost(g1, g2, u, v, params) -> float:
    """Optimal assignment between the incident edge sets of u and v."""
    l1 = [g1.edge_label(u, w) for w in g1.neighbors(u)]
    l2 = [g2.edge_label(v, w) for w in g2.neighbors(v)]
    d1, d2 = len(l1), len(l2)
    if d1 == 0 and d2 == 0:
        return 0.0
    size = d1 + d2
    cost = np.full((size, size), np.inf)
    for a in range(d1):
        for b in range(d2):
            cost[a, b] = params.y_edge * label_distance(l1[a], l2[b])
        cost[a, d2 + a] = params.x_edge
    for b in range(d2):
        cost[d1 + b, b] = params.x_edge
    cost[d1:, d2:] = 0.0
    return solve_lsap(cost).total_cost


def ged_bipartite(
    g1: AttributedGraph,
    g2: AttributedGraph,
    params: EditCostParams = DEFAULT_PARAMS,
) -> EditPath:
    """Bipartite approximation of the edit distance.

    Solves one (n1+n2) x (n1+n2) assignment problem whose substitution
    entries combine node label costs with the optimal matching of the local
    edge structures, then prices the complete edit path induced by the node
    assignment.  The result is always attainable, hence an upper bound on
    the exact distance.
    """
    n1, n2 = g1.n, g2.n
    if n1 == 0 and n2 == 0:
        return EditPath((), 0.0)
    size = n1 + n2
    cost = np.full((size, size), np.inf)
    for i, u in enumerate(g1.vertices):
        for j, v in enumerate(g2.vertices):
            cost[i, j] = params.y_node * label_distance(
                g1.node_label(u), g2.node_label(v)
            ) + _local_edge_cost(g1, g2, u, v, params)
        cost[i, n2 + i] = params.x_node + params.x_edge * g1.degree(u)
    for j, v in enumerate(g2.vertices):
        cost[n1 + j, j] = params.x_node + params.x_edge * g2.degree(v)
    cost[n1:, n2:] = 0.0

    assignment = solve_lsap(cost)
    mapping = {
        g1.vertices[i]: g2.vertices[j]
        for i, j in assignment.pairs
        if i < n1 and j < n2
    }
    return path_from_mapping(g1, g2, mapping, params)
