"""Enumeration of non-isomorphic free trees.

Trees of order ``n`` are grown from those of order ``n - 1`` by hanging a
new leaf on every vertex and keeping one representative per canonical
form.  The canonical form is the AHU string of the tree rooted at its
centre (the smaller string of the two rootings for a bicentral tree).
Each tree is returned relabelled by a canonical parent array, so the
output is fully deterministic.
"""

from __future__ import annotations

from functools import lru_cache

from .graph import DiscreteGraph, build_graph


def _adjacency(n, edges):
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    return adj


def _centers(adj):
    n = len(adj)
    if n <= 2:
        return list(range(n))
    degree = [len(a) for a in adj]
    layer = [v for v in range(n) if degree[v] == 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for u in adj[v]:
                degree[u] -= 1
                if degree[u] == 1:
                    nxt.append(u)
        layer = nxt
    return sorted(layer)


def _encode(adj, v, parent):
    kids = sorted(_encode(adj, u, v) for u in adj[v] if u != parent)
    return "(" + "".join(kids) + ")"


def canonical_form(n: int, edges) -> str:
    adj = _adjacency(n, edges)
    return min(_encode(adj, c, -1) for c in _centers(adj))


def _parents_from_code(code: str) -> list[int]:
    """Parent array (pre-order, root 0 with parent -1) of an AHU string."""
    parents = []
    stack = []
    for ch in code:
        if ch == "(":
            parents.append(stack[-1] if stack else -1)
            stack.append(len(parents) - 1)
        else:
            stack.pop()
    return parents


def tree_from_parents(parents) -> DiscreteGraph:
    return build_graph(len(parents), [(p, v) for v, p in enumerate(parents) if p >= 0])


@lru_cache(maxsize=None)
def _codes(order: int) -> tuple[str, ...]:
    if order == 1:
        return ("()",)
    found = set()
    for code in _codes(order - 1):
        parents = _parents_from_code(code)
        edges = [(p, v) for v, p in enumerate(parents) if p >= 0]
        for v in range(order - 1):
            found.add(canonical_form(order, edges + [(v, order - 1)]))
    return tuple(sorted(found))


def canonical_parent_arrays(order: int) -> list[list[int]]:
    if order < 1:
        return []
    return [_parents_from_code(c) for c in _codes(order)]


def nonisomorphic_trees(order: int) -> list[DiscreteGraph]:
    """All pairwise non-isomorphic trees on ``order`` vertices."""
    return [tree_from_parents(p) for p in canonical_parent_arrays(order)]
