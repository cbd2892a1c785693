"""Simple undirected graphs, Laplacians and k-leaf-pairs.

Vertices are dense integers ``0..V-1``.  A k-leaf-pair is stored as two
explicit vertex paths leaving a common root::

    arm_minus[k-1] - ... - arm_minus[0] - root - arm_plus[0] - ... - arm_plus[k-1]

In the signed labelling ``-k..k`` with the root at 0, vertex ``+j`` is
``arm_plus[j-1]`` and vertex ``-j`` is ``arm_minus[j-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

ISOMORPHISM_CAP = 12


class GraphError(ValueError):
    """Raised for malformed graphs or invalid constructions."""


@dataclass(frozen=True)
class LeafPairSpec:
    root: int
    arm_plus: tuple[int, ...]
    arm_minus: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "arm_plus", tuple(int(v) for v in self.arm_plus))
        object.__setattr__(self, "arm_minus", tuple(int(v) for v in self.arm_minus))
        if len(self.arm_plus) != len(self.arm_minus) or not self.arm_plus:
            raise GraphError("leaf-pair arms must be non-empty and of equal length")

    @property
    def k(self) -> int:
        return len(self.arm_plus)

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.root,) + self.arm_plus + self.arm_minus

    def swap(self, n_vertices: int) -> np.ndarray:
        """Vertex permutation exchanging the two arms (an involution)."""
        perm = np.arange(n_vertices)
        for a, b in zip(self.arm_plus, self.arm_minus):
            perm[a], perm[b] = b, a
        return perm

    def to_dict(self) -> dict:
        return {"root": self.root, "arm_plus": list(self.arm_plus), "arm_minus": list(self.arm_minus)}


@dataclass(frozen=True)
class DiscreteGraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj = [set() for _ in range(self.vertex_count)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @property
    def V(self) -> int:
        return self.vertex_count

    @property
    def E(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.V, self.V))
        for i, j in self.edges:
            A[i, j] = A[j, i] = 1.0
        return A

    def to_dict(self) -> dict:
        return {"vertices": self.V, "edges": [list(e) for e in self.edges]}


def _canonical_edges(vertex_count, edges):
    seen = set()
    for e in edges:
        i, j = (int(x) for x in e)
        if i == j:
            raise GraphError(f"self-loop at edge {(i, j)}")
        if not (0 <= i < vertex_count and 0 <= j < vertex_count):
            raise GraphError(f"edge {(i, j)} has endpoint outside [0, {vertex_count})")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"duplicate edge {(i, j)}")
        seen.add(key)
    return tuple(sorted(seen))


def build_graph(vertex_count: int, edges) -> DiscreteGraph:
    """Validate and build a simple graph with edges in sorted (min, max) form."""
    vertex_count = int(vertex_count)
    if vertex_count < 1:
        raise GraphError("vertex_count must be at least 1")
    return DiscreteGraph(vertex_count, _canonical_edges(vertex_count, edges))


def path_graph(n: int) -> DiscreteGraph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> DiscreteGraph:
    """K_{1,leaves} with centre 0."""
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def laplacian(G: DiscreteGraph) -> np.ndarray:
    A = G.adjacency()
    return np.diag(A.sum(axis=1)) - A


class UnionFind:
    """Disjoint sets over ``0..n-1``; the representative is the smallest member."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            self.parent[ry] = rx
        else:
            self.parent[rx] = ry
        return True

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for v in range(len(self.parent)):
            out.setdefault(self.find(v), []).append(v)
        return [out[r] for r in sorted(out)]


def connected_components(G: DiscreteGraph, edge_filter=None) -> list[list[int]]:
    """Vertex partition of ``G`` with the edges in ``edge_filter`` deleted.

    Components are sorted by their smallest vertex, which is also their
    representative.
    """
    removed = set()
    if edge_filter is not None:
        removed = {(min(i, j), max(i, j)) for i, j in edge_filter}
    uf = UnionFind(G.V)
    for e in G.edges:
        if e not in removed:
            uf.union(*e)
    return uf.groups()


def is_connected(G: DiscreteGraph) -> bool:
    return len(connected_components(G)) == 1


def betti(G: DiscreteGraph) -> int:
    """First Betti number ``E - V + 1`` of a connected graph."""
    if not is_connected(G):
        raise GraphError("betti number is defined here for connected graphs only")
    return G.E - G.V + 1


def is_tree(G: DiscreteGraph) -> bool:
    return G.E == G.V - 1 and is_connected(G)


def attach_k_leaf_pair(G: DiscreteGraph, root: int, k: int) -> tuple[DiscreteGraph, LeafPairSpec]:
    """Append two new paths of ``k`` vertices hanging from ``root``.

    The new vertices are ``V..V+k-1`` (plus arm) and ``V+k..V+2k-1``
    (minus arm); existing vertex ids are untouched.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    if not 0 <= root < G.V:
        raise GraphError(f"root {root} not in graph")
    V = G.V
    plus = tuple(range(V, V + k))
    minus = tuple(range(V + k, V + 2 * k))
    new_edges = list(G.edges)
    for arm in (plus, minus):
        prev = root
        for v in arm:
            new_edges.append((prev, v))
            prev = v
    H = build_graph(V + 2 * k, new_edges)
    return H, LeafPairSpec(root, plus, minus)


def check_leaf_pair(G: DiscreteGraph, pair: LeafPairSpec) -> list[str]:
    """Return a list of violated k-leaf-pair conditions (empty when valid)."""
    problems = []
    verts = pair.vertices
    if len(set(verts)) != len(verts):
        problems.append("arms are not disjoint")
    if any(not 0 <= v < G.V for v in verts):
        return problems + ["vertex out of range"]
    for name, arm in (("arm_plus", pair.arm_plus), ("arm_minus", pair.arm_minus)):
        prev = pair.root
        for idx, v in enumerate(arm):
            if not G.has_edge(prev, v):
                problems.append(f"{name}[{idx}] not adjacent to its predecessor")
            want = 1 if idx == len(arm) - 1 else 2
            if G.degree(v) != want:
                problems.append(f"{name}[{idx}] has degree {G.degree(v)}, expected {want}")
            prev = v
    return problems


def find_leaf_pairs(G: DiscreteGraph, k: int = 1) -> list[LeafPairSpec]:
    """All k-leaf-pairs, choosing for each root the two smallest k-leaves."""
    arms_at: dict[int, list[tuple[int, ...]]] = {}
    for leaf in range(G.V):
        if G.degree(leaf) != 1:
            continue
        path = [leaf]
        prev, cur = None, leaf
        ok = True
        for _ in range(k):
            nxt = [u for u in G.neighbors(cur) if u != prev]
            if len(nxt) != 1:
                ok = False
                break
            prev, cur = cur, nxt[0]
            path.append(cur)
        if not ok:
            continue
        root = path[-1]
        arm = tuple(reversed(path[:-1]))
        if all(G.degree(v) == 2 for v in arm[:-1]):
            arms_at.setdefault(root, []).append(arm)
    pairs = []
    for root in sorted(arms_at):
        arms = sorted(arms_at[root])
        if len(arms) >= 2:
            pairs.append(LeafPairSpec(root, arms[0], arms[1]))
    return pairs


def insert_pair_edge(G: DiscreteGraph, pair: LeafPairSpec, j: int) -> DiscreteGraph:
    """Add the edge joining the j-th vertices (1-based from the root) of the two arms."""
    if not 1 <= j <= pair.k:
        raise GraphError(f"j={j} outside 1..{pair.k}")
    a, b = pair.arm_plus[j - 1], pair.arm_minus[j - 1]
    if G.has_edge(a, b):
        raise GraphError(f"edge {(a, b)} already present")
    return build_graph(G.V, list(G.edges) + [(a, b)])


def relabel(G: DiscreteGraph, perm) -> DiscreteGraph:
    """Graph with vertex ``v`` renamed to ``perm[v]``."""
    return build_graph(G.V, [(perm[i], perm[j]) for i, j in G.edges])


def _refine_colors(G: DiscreteGraph) -> list[int]:
    colors = G.degrees()
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in G.neighbors(v)))) for v in range(G.V)]
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _color_signature(G, colors):
    return sorted(
        (colors[v], tuple(sorted(colors[u] for u in G.neighbors(v)))) for v in range(G.V)
    )


def is_isomorphic(G1: DiscreteGraph, G2: DiscreteGraph, cap: int = ISOMORPHISM_CAP) -> bool:
    """Exact isomorphism test by pruned permutation search (V <= cap)."""
    if max(G1.V, G2.V) > cap:
        raise GraphError(f"isomorphism search capped at V={cap}")
    if G1.V != G2.V or G1.E != G2.E:
        return False
    if sorted(G1.degrees()) != sorted(G2.degrees()):
        return False
    # Colour refinement on the disjoint union keeps the palettes comparable.
    union = build_graph(G1.V + G2.V, list(G1.edges) + [(i + G1.V, j + G1.V) for i, j in G2.edges])
    colors = _refine_colors(union)
    c1, c2 = colors[: G1.V], colors[G1.V:]
    if sorted(c1) != sorted(c2):
        return False

    order = sorted(range(G1.V), key=lambda v: (sum(c == c1[v] for c in c1), -G1.degree(v)))
    mapping: dict[int, int] = {}
    used = set()

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        for w in range(G2.V):
            if w in used or c2[w] != c1[v]:
                continue
            if all(G1.has_edge(v, x) == G2.has_edge(w, mapping[x]) for x in mapping):
                mapping[v] = w
                used.add(w)
                if extend(pos + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return extend(0)


def random_connected_graph(rng: np.random.Generator, n: int, extra_edges: int) -> DiscreteGraph:
    """Random spanning tree on ``n`` vertices plus up to ``extra_edges`` chords."""
    edges = set()
    perm = rng.permutation(n)
    for idx in range(1, n):
        parent = perm[rng.integers(idx)]
        child = perm[idx]
        edges.add((min(parent, child), max(parent, child)))
    candidates = [e for e in combinations(range(n), 2) if e not in edges]
    if candidates and extra_edges > 0:
        pick = rng.choice(len(candidates), size=min(extra_edges, len(candidates)), replace=False)
        edges.update(candidates[i] for i in pick)
    return build_graph(n, sorted((int(i), int(j)) for i, j in edges))
