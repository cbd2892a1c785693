"""Metric graphs: edge lengths, dummy vertices and leaf-pair gluing.

A metric leaf pair records each arm as an ordered path of edge indices
leaving the root.  For an unglued l-leaf-pair every arm is a single edge;
after :func:`glue_leaf_pair` each arm is ``(root-w edge, w-leaf edge)`` and
the two arms share the glue vertex ``w``.  The arm exchange swaps the two
leaf ends and the edges at equal arm positions, which covers both cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .graph import GraphError, UnionFind

DEFAULT_GLUE_FRACTION = 0.4142


@dataclass(frozen=True)
class MetricLeafPairSpec:
    root: int
    end_plus: int
    end_minus: int
    arm_plus: tuple[int, ...]
    arm_minus: tuple[int, ...]
    glue_vertex: int | None = None

    @property
    def glued(self) -> bool:
        return self.glue_vertex is not None

    @property
    def leaf_edges(self) -> tuple[int, ...]:
        return self.arm_plus + self.arm_minus

    def to_dict(self) -> dict:
        out = {"root": self.root, "arm_plus": [self.end_plus], "arm_minus": [self.end_minus]}
        if self.glued:
            out["glue_vertex"] = self.glue_vertex
        return out


@dataclass(frozen=True)
class MetricGraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    lengths: tuple[float, ...]
    leaf_pairs: tuple[MetricLeafPairSpec, ...] = field(default=())

    @property
    def V(self) -> int:
        return self.vertex_count

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    def degrees(self) -> list[int]:
        d = [0] * self.V
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def incident(self, v: int) -> list[int]:
        return [e for e, (i, j) in enumerate(self.edges) if v in (i, j)]

    def betti(self) -> int:
        return self.E - self.V + 1

    def is_tree(self) -> bool:
        return self.betti() == 0

    def vertex_swap(self, pair: MetricLeafPairSpec) -> np.ndarray:
        perm = np.arange(self.V)
        perm[pair.end_plus], perm[pair.end_minus] = pair.end_minus, pair.end_plus
        return perm

    def to_dict(self) -> dict:
        return {
            "vertices": self.V,
            "edges": [list(e) for e in self.edges],
            "lengths": list(self.lengths),
            "leaf_pairs": [p.to_dict() for p in self.leaf_pairs],
        }


def _connected(n, edges):
    uf = UnionFind(n)
    for i, j in edges:
        uf.union(i, j)
    return len(uf.groups()) == 1


def build_metric(vertex_count: int, edges, lengths, leaf_pairs=()) -> MetricGraph:
    """Validated metric graph.  Parallel edges are allowed, self-loops are not.

    ``leaf_pairs`` may hold :class:`MetricLeafPairSpec` objects or dicts
    ``{"root": r, "arm_plus": [v_plus], "arm_minus": [v_minus]}``.
    """
    vertex_count = int(vertex_count)
    edges = tuple((int(i), int(j)) for i, j in edges)
    lengths = tuple(float(x) for x in lengths)
    if vertex_count < 1:
        raise GraphError("vertex_count must be at least 1")
    if len(lengths) != len(edges):
        raise GraphError(f"{len(lengths)} lengths given for {len(edges)} edges")
    for e, (i, j) in enumerate(edges):
        if i == j:
            raise GraphError(f"self-loop at edge {e}")
        if not (0 <= i < vertex_count and 0 <= j < vertex_count):
            raise GraphError(f"edge {(i, j)} has endpoint out of range")
        if not (np.isfinite(lengths[e]) and lengths[e] > 0):
            raise GraphError(f"edge {e} has non-positive or non-finite length {lengths[e]}")
    if not _connected(vertex_count, edges):
        raise GraphError("metric graph must be connected")
    G = MetricGraph(vertex_count, edges, lengths)
    specs = tuple(p if isinstance(p, MetricLeafPairSpec) else leaf_pair_from_ends(G, p["root"], p["arm_plus"][-1], p["arm_minus"][-1])
                  for p in leaf_pairs)
    return replace(G, leaf_pairs=specs)


def from_discrete(G, lengths, leaf_pairs=()) -> MetricGraph:
    return build_metric(G.V, G.edges, lengths, leaf_pairs)


def leaf_pair_from_ends(G: MetricGraph, root: int, end_plus: int, end_minus: int,
                        rtol: float = 1e-12) -> MetricLeafPairSpec:
    """Leaf pair made of the single edges root-end_plus and root-end_minus."""
    deg = G.degrees()
    arms = []
    for end in (end_plus, end_minus):
        if deg[end] != 1:
            raise GraphError(f"leaf end {end} has degree {deg[end]}")
        (e,) = G.incident(end)
        if root not in G.edges[e]:
            raise GraphError(f"leaf end {end} is not attached to root {root}")
        arms.append(e)
    lp, lm = G.lengths[arms[0]], G.lengths[arms[1]]
    if abs(lp - lm) > rtol * max(lp, lm):
        raise GraphError(f"leaf lengths differ: {lp} vs {lm}")
    return MetricLeafPairSpec(root, end_plus, end_minus, (arms[0],), (arms[1],))


def add_leaf_pair(G: MetricGraph, root: int, length: float) -> MetricGraph:
    """Hang two new leaves of equal ``length`` on ``root`` and record the pair."""
    V = G.V
    edges = G.edges + ((root, V), (root, V + 1))
    lengths = G.lengths + (length, length)
    H = build_metric(V + 2, edges, lengths, G.leaf_pairs)
    pair = MetricLeafPairSpec(root, V, V + 1, (G.E,), (G.E + 1,))
    return replace(H, leaf_pairs=H.leaf_pairs + (pair,))


def add_dummy_vertex(G: MetricGraph, edge: int, x: float) -> MetricGraph:
    """Split ``edge`` at distance ``x`` from its first endpoint with a degree-2 vertex.

    The first piece keeps the edge index, the second piece is appended.
    Leaf-pair arm paths through the edge are extended accordingly.
    """
    a, b = G.edges[edge]
    length = G.lengths[edge]
    if not 0 < x < length:
        raise GraphError(f"split point {x} outside (0, {length})")
    w = G.V
    edges = list(G.edges)
    lengths = list(G.lengths)
    edges[edge] = (a, w)
    lengths[edge] = x
    edges.append((w, b))
    lengths.append(length - x)
    new_edge = len(edges) - 1
    pairs = []
    for p in G.leaf_pairs:
        arms = []
        for arm in (p.arm_plus, p.arm_minus):
            out = []
            at = p.root
            for e in arm:
                i, j = G.edges[e]
                if e == edge:
                    out.extend([edge, new_edge] if at == a else [new_edge, edge])
                else:
                    out.append(e)
                at = j if at == i else i
            arms.append(tuple(out))
        pairs.append(replace(p, arm_plus=arms[0], arm_minus=arms[1]))
    return MetricGraph(G.V + 1, tuple(edges), tuple(lengths), tuple(pairs))


def glue_leaf_pair(G: MetricGraph, pair_index: int, l1: float) -> MetricGraph:
    """Identify the points at distance ``l1`` from the root on both leaves.

    The two leaf edges become parallel root-w edges of length ``l1`` (same
    indices) and two pendant w-end edges of length ``l - l1`` are appended.
    """
    pair = G.leaf_pairs[pair_index]
    if pair.glued or len(pair.arm_plus) != 1:
        raise GraphError("only an unglued l-leaf-pair can be glued")
    ep, em = pair.arm_plus[0], pair.arm_minus[0]
    length = G.lengths[ep]
    if not 0 < l1 < length:
        raise GraphError(f"glue distance {l1} outside (0, {length})")
    w = G.V
    edges = list(G.edges)
    lengths = list(G.lengths)
    edges[ep] = (pair.root, w)
    edges[em] = (pair.root, w)
    lengths[ep] = lengths[em] = l1
    edges += [(w, pair.end_plus), (w, pair.end_minus)]
    lengths += [length - l1, length - l1]
    glued = MetricLeafPairSpec(pair.root, pair.end_plus, pair.end_minus,
                               (ep, len(edges) - 2), (em, len(edges) - 1), glue_vertex=w)
    pairs = list(G.leaf_pairs)
    pairs[pair_index] = glued
    return MetricGraph(G.V + 1, tuple(edges), tuple(lengths), tuple(pairs))


def two_pair_graph(leaf: float = 1.0, spine: float = 1.3, stub: float = 0.7) -> MetricGraph:
    """Spine A-B with an l-leaf-pair on each end and an extra stub at A.

    The stub breaks the A <-> B mirror symmetry, so gluing at A and gluing
    at B give non-isomorphic metric graphs.
    """
    G = build_metric(3, [(0, 1), (0, 2)], [spine, stub])
    G = add_leaf_pair(G, 0, leaf)
    return add_leaf_pair(G, 1, leaf)


def star_metric(lengths) -> MetricGraph:
    """Star with centre 0 and one edge per length; leaves 1 and 2 form a pair when equal."""
    n = len(lengths)
    G = build_metric(n + 1, [(0, i) for i in range(1, n + 1)], lengths)
    if n >= 2 and abs(lengths[0] - lengths[1]) <= 1e-12 * max(lengths[:2]):
        G = replace(G, leaf_pairs=(leaf_pair_from_ends(G, 0, 1, 2),))
    return G
