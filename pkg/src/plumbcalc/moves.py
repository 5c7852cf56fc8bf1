"""Neumann moves on plumbing trees.

Three move families, each with a blow-up and a blow-down direction:

  (a)-up on edge {v1,v2}, sign e:  insert a new vertex u with weight e on the
      edge; both endpoint weights change by +e.
  (b)-up at v, sign e:  attach a new leaf with weight e; w(v) += e.
  (c)-up at v, sign e:  attach a two-vertex chain v - u(e) - t(0); no weight
      changes.
  (a)-down at u:  deg(u) = 2 and w(u) = e = +-1; delete u, join its
      neighbors, subtract e from each neighbor weight.
  (b)-down at u:  deg(u) = 1 and w(u) = e = +-1; delete u, subtract e from
      the neighbor weight.
  (c)-down at t:  deg(t) = 1, w(t) = 0, and the neighbor u has degree
      exactly 2; delete t and u, no weight changes.

Every move preserves |det| of the weighted adjacency matrix and keeps the
graph a tree.  Blow-ups append new vertices at the tail; blow-downs compact
indices by shifting, so consumers that care about identity across moves must
compare canonical keys, not raw indices.

The agent-facing action space has six selectors per node: the five blow-ups
plus a single merged blow-down that fires whichever of the three blow-down
conditions the node satisfies.  For statistics, applied moves are classified
into eight categories, serialized 1..8 as
1=a-up, 2=b-up+, 3=b-up-, 4=c-up+, 5=c-up-, 6=a-down, 7=b-down, 8=c-down.
"""

from __future__ import annotations

import random
from enum import IntEnum
from typing import NamedTuple

from .graph import Plumbing

__all__ = [
    "Selector",
    "RlAction",
    "AppliedMove",
    "CATEGORY_NAMES",
    "DEFAULT_A_UP_SIGN",
    "blow_up_a",
    "blow_up_b",
    "blow_up_c",
    "legal_blow_down_kind",
    "blow_down",
    "apply_action",
    "action_category",
    "random_neumann_move",
    "enumerate_legal_actions",
    "replay",
]


class Selector(IntEnum):
    """Per-node action selectors, in deterministic enumeration order."""

    A_UP = 0
    B_UP_PLUS = 1
    B_UP_MINUS = 2
    C_UP_PLUS = 3
    C_UP_MINUS = 4
    DOWN = 5


class RlAction(NamedTuple):
    node: int
    selector: Selector


class AppliedMove(NamedTuple):
    category: int  # 1..8, see CATEGORY_NAMES
    node: int


CATEGORY_NAMES = {
    1: "a-up",
    2: "b-up+",
    3: "b-up-",
    4: "c-up+",
    5: "c-up-",
    6: "a-down",
    7: "b-down",
    8: "c-down",
}

# Type-(a) blow-ups carry no sign draw in the random-move sampler; this is
# the sign they use there and in the fixed action space.  Both signs preserve
# |det|; -1 is the conventional blow-up.
DEFAULT_A_UP_SIGN = -1


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return sign


def blow_up_a(p: Plumbing, edge: tuple[int, int], sign: int) -> Plumbing:
    """Split `edge` with a new sign-weighted vertex; endpoints gain `sign`."""
    _check_sign(sign)
    i, j = (edge[0], edge[1]) if edge[0] <= edge[1] else (edge[1], edge[0])
    if (i, j) not in p.edges:
        raise ValueError(f"edge ({i},{j}) not in graph")
    u = p.n
    weights = list(p.weights)
    weights[i] += sign
    weights[j] += sign
    weights.append(sign)
    edges = [e for e in p.edges if e != (i, j)]
    edges.extend([(i, u), (j, u)])
    return Plumbing(weights, edges)


def blow_up_b(p: Plumbing, v: int, sign: int) -> Plumbing:
    """Attach a sign-weighted leaf to v; w(v) gains `sign`."""
    _check_sign(sign)
    if not (0 <= v < p.n):
        raise ValueError(f"vertex {v} out of range")
    u = p.n
    weights = list(p.weights)
    weights[v] += sign
    weights.append(sign)
    return Plumbing(weights, list(p.edges) + [(v, u)])


def blow_up_c(p: Plumbing, v: int, sign: int) -> Plumbing:
    """Attach the chain v - u(sign) - t(0); no existing weight changes."""
    _check_sign(sign)
    if not (0 <= v < p.n):
        raise ValueError(f"vertex {v} out of range")
    u, t = p.n, p.n + 1
    weights = list(p.weights) + [sign, 0]
    return Plumbing(weights, list(p.edges) + [(v, u), (u, t)])


def legal_blow_down_kind(p: Plumbing, v: int) -> str | None:
    """Which blow-down (if any) applies at v: 'a', 'b', 'c', or None.

    The three conditions are mutually exclusive.  Kind 'c' additionally
    requires the neighbor to have degree exactly 2, otherwise removing the
    pair would disconnect the tree.
    """
    if not (0 <= v < p.n):
        raise ValueError(f"vertex {v} out of range")
    deg = p.degree(v)
    w = p.weights[v]
    if deg == 2 and w in (1, -1):
        return "a"
    if deg == 1 and w in (1, -1):
        return "b"
    if deg == 1 and w == 0:
        u = p.adjacency[v][0]
        if p.degree(u) == 2:
            return "c"
    return None


def _drop_vertices(p: Plumbing, removed: tuple[int, ...], weights: list[int],
                   edges: list[tuple[int, int]]) -> Plumbing:
    """Rebuild with `removed` indices deleted and the rest shifted down."""
    removed_sorted = sorted(removed)
    shift = [0] * p.n
    for r in removed_sorted:
        for i in range(r + 1, p.n):
            shift[i] += 1
    new_weights = [w for i, w in enumerate(weights) if i not in removed]
    new_edges = [(i - shift[i], j - shift[j]) for i, j in edges]
    return Plumbing(new_weights, new_edges)


def blow_down(p: Plumbing, v: int) -> Plumbing | None:
    """Apply the legal blow-down at v, or return None if there is none."""
    kind = legal_blow_down_kind(p, v)
    if kind is None:
        return None
    weights = list(p.weights)
    if kind == "a":
        n1, n2 = p.adjacency[v]
        e = weights[v]
        weights[n1] -= e
        weights[n2] -= e
        edges = [ed for ed in p.edges if v not in ed]
        edges.append((n1, n2) if n1 <= n2 else (n2, n1))
        return _drop_vertices(p, (v,), weights, edges)
    if kind == "b":
        n1 = p.adjacency[v][0]
        weights[n1] -= weights[v]
        edges = [ed for ed in p.edges if v not in ed]
        return _drop_vertices(p, (v,), weights, edges)
    # kind == "c": remove the 0-leaf together with its degree-2 neighbor.
    u = p.adjacency[v][0]
    edges = [ed for ed in p.edges if v not in ed and u not in ed]
    return _drop_vertices(p, (v, u), weights, edges)


def apply_action(p: Plumbing, action: RlAction) -> tuple[bool, Plumbing]:
    """Apply one agent action; illegal actions return (False, p) unchanged.

    A_UP targets the edge from the node to its lowest-indexed neighbor, so
    the action space stays a fixed 6 per node.  A_UP on an isolated vertex
    and DOWN with no legal kind are the two illegal cases.
    """
    v = action.node
    if not (0 <= v < p.n):
        raise ValueError(f"action node {v} out of range")
    sel = action.selector
    if sel == Selector.A_UP:
        nbrs = p.adjacency[v]
        if not nbrs:
            return False, p
        return True, blow_up_a(p, (v, nbrs[0]), DEFAULT_A_UP_SIGN)
    if sel == Selector.B_UP_PLUS:
        return True, blow_up_b(p, v, 1)
    if sel == Selector.B_UP_MINUS:
        return True, blow_up_b(p, v, -1)
    if sel == Selector.C_UP_PLUS:
        return True, blow_up_c(p, v, 1)
    if sel == Selector.C_UP_MINUS:
        return True, blow_up_c(p, v, -1)
    result = blow_down(p, v)
    if result is None:
        return False, p
    return True, result


def action_category(p: Plumbing, action: RlAction) -> int:
    """Category 1..8 an action counts under for move statistics.

    Blow-ups map straight from their selector.  A legal DOWN maps to the
    kind that fires; an illegal DOWN is attributed by the node's shape
    (degree 2 -> a-down, degree-1 zero-weight -> c-down, other degree 1 ->
    b-down, anything else -> a-down).
    """
    sel = action.selector
    if sel != Selector.DOWN:
        return {
            Selector.A_UP: 1,
            Selector.B_UP_PLUS: 2,
            Selector.B_UP_MINUS: 3,
            Selector.C_UP_PLUS: 4,
            Selector.C_UP_MINUS: 5,
        }[sel]
    kind = legal_blow_down_kind(p, action.node)
    if kind is None:
        deg = p.degree(action.node)
        if deg == 2:
            kind = "a"
        elif deg == 1:
            kind = "c" if p.weights[action.node] == 0 else "b"
        else:
            kind = "a"
    return {"a": 6, "b": 7, "c": 8}[kind]


def random_neumann_move(
    p: Plumbing, rng: random.Random, a_up_sign: int = DEFAULT_A_UP_SIGN
) -> tuple[bool, Plumbing, AppliedMove | None]:
    """One uniformly random move attempt.

    Draw order (fixed for reproducibility): node, type in {a,b,c}, updown,
    then for a type-(a) blow-up the incident edge (uniform over the node's
    edges), or for type-(b)/(c) blow-ups the sign.  A type-(a) blow-up on an
    isolated vertex and any illegal blow-down return (False, p, None).
    """
    v = rng.randrange(p.n)
    move_type = rng.choice(("a", "b", "c"))
    updown = rng.choice((1, -1))
    if updown == 1:
        if move_type == "a":
            nbrs = p.adjacency[v]
            if not nbrs:
                return False, p, None
            u = nbrs[rng.randrange(len(nbrs))]
            return True, blow_up_a(p, (v, u), a_up_sign), AppliedMove(1, v)
        sign = rng.choice((1, -1))
        if move_type == "b":
            return True, blow_up_b(p, v, sign), AppliedMove(2 if sign == 1 else 3, v)
        return True, blow_up_c(p, v, sign), AppliedMove(4 if sign == 1 else 5, v)
    kind = legal_blow_down_kind(p, v)
    if kind is None:
        return False, p, None
    result = blow_down(p, v)
    assert result is not None
    return True, result, AppliedMove({"a": 6, "b": 7, "c": 8}[kind], v)


def enumerate_legal_actions(p: Plumbing) -> list[RlAction]:
    """All actions with done=True, in (node, selector) order."""
    out: list[RlAction] = []
    for v in range(p.n):
        has_edge = p.degree(v) > 0
        for sel in Selector:
            if sel == Selector.A_UP:
                if has_edge:
                    out.append(RlAction(v, sel))
            elif sel == Selector.DOWN:
                if legal_blow_down_kind(p, v) is not None:
                    out.append(RlAction(v, sel))
            else:
                out.append(RlAction(v, sel))
    return out


def replay(p: Plumbing, actions: list[RlAction]) -> Plumbing:
    """Apply a recorded action sequence; raises if any step is illegal."""
    g = p
    for a in actions:
        done, g = apply_action(g, a)
        if not done:
            raise ValueError(f"action {a} is illegal during replay")
    return g
