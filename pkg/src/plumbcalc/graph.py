"""Weighted-tree plumbing graphs and their exact invariants.

A plumbing is a tree whose vertices carry integer weights (framings).
Everything downstream — moves, datasets, networks, search — works on the
:class:`Plumbing` value defined here.  All operations are pure; a Plumbing
is never mutated after construction.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

__all__ = [
    "Plumbing",
    "validate",
    "weighted_adjacency",
    "determinant",
    "homology_order",
    "complexity",
    "canonical_key",
    "is_isomorphic",
    "lens_chain",
    "graph_to_json",
    "graph_from_json",
    "read_graph",
    "write_graph",
]


class Plumbing:
    """A vertex-weighted graph, normally a tree.

    ``weights[i]`` is the integer framing of vertex ``i``; ``edges`` holds
    unordered index pairs, stored sorted as ``(i, j)`` with ``i < j``.
    Construction does not check tree-ness; use :func:`validate` for that.
    Instances are treated as immutable and hash/compare by value.
    """

    __slots__ = ("weights", "edges", "_adj", "_key")

    def __init__(self, weights: Sequence[int], edges: Iterable[Sequence[int]] = ()):
        self.weights: tuple[int, ...] = tuple(int(w) for w in weights)
        norm = []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            norm.append((i, j) if i <= j else (j, i))
        norm.sort()
        self.edges: tuple[tuple[int, int], ...] = tuple(norm)
        self._adj: tuple[tuple[int, ...], ...] | None = None
        self._key: str | None = None

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbor lists, cached."""
        if self._adj is None:
            lists: list[list[int]] = [[] for _ in range(self.n)]
            for i, j in self.edges:
                lists[i].append(j)
                lists[j].append(i)
            self._adj = tuple(tuple(sorted(l)) for l in lists)
        return self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Plumbing)
            and self.weights == other.weights
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.weights, self.edges))

    def __repr__(self) -> str:
        return f"Plumbing({list(self.weights)}, {[list(e) for e in self.edges]})"


def validate(p: Plumbing) -> str | None:
    """Return the first violated invariant as text, or None if p is a valid
    weighted tree (>= 1 vertex, indices in range, no self-loops or duplicate
    edges, connected and acyclic)."""
    n = p.n
    if n < 1:
        return "vertex count must be >= 1"
    seen = set()
    for i, j in p.edges:
        if not (0 <= i < n and 0 <= j < n):
            return f"edge ({i},{j}) out of range for {n} vertices"
        if i == j:
            return f"self-loop at vertex {i}"
        if (i, j) in seen:
            return f"duplicate edge ({i},{j})"
        seen.add((i, j))
    if len(p.edges) != n - 1:
        return f"edge count {len(p.edges)} != |V|-1 = {n - 1} (not a tree)"
    # With |E| = |V|-1, connectivity is equivalent to acyclicity.
    reached = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in p.adjacency[v]:
            if u not in reached:
                reached.add(u)
                stack.append(u)
    if len(reached) != n:
        return "graph is disconnected"
    return None


def weighted_adjacency(p: Plumbing) -> list[list[int]]:
    """|V| x |V| integer matrix: adjacency off the diagonal, weights on it."""
    n = p.n
    m = [[0] * n for _ in range(n)]
    for v, w in enumerate(p.weights):
        m[v][v] = w
    for i, j in p.edges:
        m[i][j] = 1
        m[j][i] = 1
    return m


def determinant(p: Plumbing) -> int:
    """Exact determinant of the weighted adjacency matrix.

    Fraction-free (Bareiss) elimination over Python integers: every
    intermediate division is exact, so the result is exact at any size.
    """
    m = weighted_adjacency(p)
    n = p.n
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        row_k = m[k]
        pivot = row_k[k]
        for i in range(k + 1, n):
            row_i = m[i]
            factor = row_i[k]
            if factor == 0:
                for j in range(k + 1, n):
                    row_i[j] = (pivot * row_i[j]) // prev
            else:
                for j in range(k + 1, n):
                    row_i[j] = (pivot * row_i[j] - factor * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def homology_order(p: Plumbing) -> int:
    """|det| of the weighted adjacency; 0 signals an infinite group."""
    return abs(determinant(p))


def complexity(p: Plumbing) -> int:
    """Simplicity measure 5*|V| + sum of |weight| (smaller is simpler)."""
    return 5 * p.n + sum(abs(w) for w in p.weights)


def _centroids(p: Plumbing) -> list[int]:
    """The 1 or 2 vertices minimizing the largest component left by their
    removal.  For two centroids they are adjacent."""
    n = p.n
    if n == 1:
        return [0]
    adj = p.adjacency
    size = [1] * n
    order: list[int] = []
    parent = [-1] * n
    stack = [0]
    visited = [False] * n
    visited[0] = True
    while stack:
        v = stack.pop()
        order.append(v)
        for u in adj[v]:
            if not visited[u]:
                visited[u] = True
                parent[u] = v
                stack.append(u)
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    best = n + 1
    out: list[int] = []
    for v in range(n):
        heaviest = n - size[v]
        for u in adj[v]:
            if u != parent[v]:
                heaviest = max(heaviest, size[u])
        if heaviest < best:
            best = heaviest
            out = [v]
        elif heaviest == best:
            out.append(v)
    return out


def _rooted_key(p: Plumbing, root: int) -> str:
    """AHU-style encoding of the tree rooted at `root`: each node renders as
    (weight childkeys...) with child keys sorted, so the string is invariant
    under relabeling.  Iterative post-order; safe for deep chains."""
    adj = p.adjacency
    key: dict[int, str] = {}
    stack: list[tuple[int, int, bool]] = [(root, -1, False)]
    while stack:
        v, par, expanded = stack.pop()
        if expanded:
            childkeys = sorted(key[u] for u in adj[v] if u != par)
            key[v] = f"({p.weights[v]}" + "".join(childkeys) + ")"
        else:
            stack.append((v, par, True))
            for u in adj[v]:
                if u != par:
                    stack.append((u, v, False))
    return key[root]


def canonical_key(p: Plumbing) -> str:
    """Relabeling-invariant encoding: equal keys iff the weighted trees are
    isomorphic.  Rooted at the centroid; with a two-vertex centroid both
    rootings are encoded and the lexicographically smaller key wins."""
    if p._key is None:
        p._key = min(_rooted_key(p, c) for c in _centroids(p))
    return p._key


def is_isomorphic(p1: Plumbing, p2: Plumbing) -> bool:
    return canonical_key(p1) == canonical_key(p2)


def lens_chain(p: int, q: int) -> Plumbing:
    """Linear-chain plumbing of the lens space L(p, q).

    Weights are -a1, ..., -ak from the negative continued fraction
    p/q = a1 - 1/(a2 - 1/(...)) with all ai >= 2, so |det| = p.
    Requires 0 < q < p and gcd(p, q) = 1.
    """
    if not (isinstance(p, int) and isinstance(q, int)):
        raise ValueError("p and q must be integers")
    if not (0 < q < p):
        raise ValueError(f"need 0 < q < p, got p={p}, q={q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")
    coeffs = []
    a, b = p, q
    while b:
        c = -(-a // b)  # ceil(a/b)
        coeffs.append(c)
        a, b = b, c * b - a
    weights = [-c for c in coeffs]
    edges = [(i, i + 1) for i in range(len(weights) - 1)]
    return Plumbing(weights, edges)


# --- JSON interchange -------------------------------------------------------
#
# Graph files are {"weights": [int, ...], "edges": [[i, j], ...]} with
# 0-based indices.  Reading validates; writing is canonical (edges sorted,
# i < j), so equal graphs always serialize to equal bytes.


def graph_to_json(p: Plumbing) -> str:
    return json.dumps(
        {"weights": list(p.weights), "edges": [list(e) for e in p.edges]},
        separators=(",", ":"),
    )


def graph_from_json(text: str) -> Plumbing:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "weights" not in obj:
        raise ValueError("graph JSON must be an object with 'weights' and 'edges'")
    p = Plumbing(obj["weights"], obj.get("edges", ()))
    problem = validate(p)
    if problem is not None:
        raise ValueError(f"invalid plumbing: {problem}")
    return p


def write_graph(p: Plumbing, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(graph_to_json(p) + "\n")


def read_graph(path: str) -> Plumbing:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(fh.read())
