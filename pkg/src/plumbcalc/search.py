"""Non-learned simplification and equivalence decisions.

Search runs over the agent action space (6 selectors per node) with
canonical keys for deduplication, scored by the complexity measure f.

  greedy_simplify     steepest descent: apply the legal action minimizing
                      the successor's f while it strictly decreases.
  beam_simplify       width-limited best-first layers; tolerates temporary
                      f increases, never expands a canonical key twice.
  bidirectional_path  meet-in-the-middle BFS; reports a shortest connection
                      as two forward half-paths whose lengths sum to the
                      connection length.
  decide_equivalence  three-valued verdict: differing |det| proves
                      inequivalence; beams from both sides meeting at a
                      common canonical key prove equivalence with replayable
                      paths; otherwise unresolved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .graph import Plumbing, canonical_key, complexity, homology_order
from .moves import RlAction, Selector, apply_action, enumerate_legal_actions

__all__ = [
    "PathResult",
    "Verdict",
    "greedy_simplify",
    "beam_simplify",
    "bidirectional_path",
    "decide_equivalence",
    "action_to_json",
    "action_from_json",
]

_SELECTOR_NAMES = {
    Selector.A_UP: "AUp",
    Selector.B_UP_PLUS: "BUpPlus",
    Selector.B_UP_MINUS: "BUpMinus",
    Selector.C_UP_PLUS: "CUpPlus",
    Selector.C_UP_MINUS: "CUpMinus",
    Selector.DOWN: "Down",
}
_SELECTOR_FROM_NAME = {v: k for k, v in _SELECTOR_NAMES.items()}


def action_to_json(action: RlAction) -> dict:
    return {"node": int(action.node), "selector": _SELECTOR_NAMES[action.selector]}


def action_from_json(obj: dict) -> RlAction:
    return RlAction(int(obj["node"]), _SELECTOR_FROM_NAME[obj["selector"]])


def _successors(g: Plumbing) -> Iterator[tuple[RlAction, Plumbing]]:
    for action in enumerate_legal_actions(g):
        done, nxt = apply_action(g, action)
        if done:
            yield action, nxt


def greedy_simplify(p: Plumbing, budget: int | None = None) -> tuple[Plumbing, list[RlAction]]:
    """Repeatedly take the legal action whose successor has the smallest f
    (ties: lowest node, then selector order), while that strictly reduces f.
    Stops at a local minimum or when the budget runs out."""
    g = p
    path: list[RlAction] = []
    steps = 0
    while budget is None or steps < budget:
        best: tuple[int, RlAction, Plumbing] | None = None
        for action, nxt in _successors(g):
            f_next = complexity(nxt)
            if best is None or f_next < best[0]:
                best = (f_next, action, nxt)
        if best is None or best[0] >= complexity(g):
            break
        g = best[2]
        path.append(best[1])
        steps += 1
    return g, path


def _beam_visits(
    p: Plumbing,
    width: int,
    expansion_cap: int,
    depth_budget: int | None,
) -> Iterator[tuple[str, Plumbing, tuple[RlAction, ...]]]:
    """Beam layers from p, yielding every first visit (key, graph, path).

    Fully deterministic: layer candidates are ordered by (f, canonical key)
    and only the best `width` are expanded; no key is expanded twice."""
    start_key = canonical_key(p)
    seen: set[str] = {start_key}
    yield start_key, p, ()
    frontier: list[tuple[int, str, Plumbing, tuple[RlAction, ...]]] = [
        (complexity(p), start_key, p, ())
    ]
    expansions = 0
    depth = 0
    while frontier and expansions < expansion_cap and (depth_budget is None or depth < depth_budget):
        candidates: list[tuple[int, str, Plumbing, tuple[RlAction, ...]]] = []
        for _f, _key, g, path in frontier:
            if expansions >= expansion_cap:
                break
            expansions += 1
            for action, nxt in _successors(g):
                key = canonical_key(nxt)
                if key in seen:
                    continue
                seen.add(key)
                entry = (complexity(nxt), key, nxt, path + (action,))
                candidates.append(entry)
                yield key, nxt, entry[3]
        candidates.sort(key=lambda e: (e[0], e[1]))
        frontier = candidates[:width]
        depth += 1


def beam_simplify(
    p: Plumbing,
    width: int = 16,
    depth_budget: int | None = None,
    expansion_cap: int | None = None,
) -> tuple[Plumbing, list[RlAction]]:
    """f-guided beam search; returns the least complex graph visited and a
    replayable action path to it.  The default expansion cap is 5 f(p)."""
    if width < 1:
        raise ValueError("width must be >= 1")
    if expansion_cap is None:
        expansion_cap = 5 * complexity(p)
    best_graph, best_path = p, ()
    best_f = complexity(p)
    for _key, g, path in _beam_visits(p, width, expansion_cap, depth_budget):
        f = complexity(g)
        if f < best_f:
            best_f, best_graph, best_path = f, g, path
    return best_graph, list(best_path)


@dataclass
class PathResult:
    """A connection found by meet-in-the-middle search: forward moves from
    each endpoint to a common graph.  `length` is the total move count of
    the connection."""

    from_g1: list[RlAction]
    from_g2: list[RlAction]
    meet_key: str

    @property
    def length(self) -> int:
        return len(self.from_g1) + len(self.from_g2)


def bidirectional_path(g1: Plumbing, g2: Plumbing, max_depth: int = 6) -> PathResult | None:
    """Shortest connection of at most max_depth moves, or None.

    BFS levels grow from both sides over canonical keys; every new key is
    checked against everything seen from the other side, so all splits of
    every total length <= max_depth are covered once the two expanded depths
    sum to max_depth."""
    if max_depth > 8:
        raise ValueError("max_depth > 8 is combinatorially unreasonable here")
    key1, key2 = canonical_key(g1), canonical_key(g2)
    seen_a: dict[str, tuple[int, tuple[RlAction, ...]]] = {key1: (0, ())}
    seen_b: dict[str, tuple[int, tuple[RlAction, ...]]] = {key2: (0, ())}
    if key1 == key2:
        return PathResult([], [], key1)
    frontier_a: dict[str, Plumbing] = {key1: g1}
    frontier_b: dict[str, Plumbing] = {key2: g2}
    paths_a: dict[str, tuple[RlAction, ...]] = {key1: ()}
    paths_b: dict[str, tuple[RlAction, ...]] = {key2: ()}
    depth_a = depth_b = 0
    best: PathResult | None = None
    while depth_a + depth_b < max_depth:
        if not frontier_a and not frontier_b:
            break
        expand_a = bool(frontier_a) and (not frontier_b or len(frontier_a) <= len(frontier_b))
        frontier, paths, seen, other_seen, depth = (
            (frontier_a, paths_a, seen_a, seen_b, depth_a)
            if expand_a
            else (frontier_b, paths_b, seen_b, seen_a, depth_b)
        )
        new_frontier: dict[str, Plumbing] = {}
        new_paths: dict[str, tuple[RlAction, ...]] = {}
        for key, g in frontier.items():
            base = paths[key]
            for action, nxt in _successors(g):
                nkey = canonical_key(nxt)
                if nkey in seen:
                    continue
                seen[nkey] = (depth + 1, base + (action,))
                new_frontier[nkey] = nxt
                new_paths[nkey] = base + (action,)
                if nkey in other_seen:
                    other_depth, other_path = other_seen[nkey]
                    total = depth + 1 + other_depth
                    if total <= max_depth and (best is None or total < best.length):
                        if expand_a:
                            best = PathResult(list(base + (action,)), list(other_path), nkey)
                        else:
                            best = PathResult(list(other_path), list(base + (action,)), nkey)
        if expand_a:
            frontier_a, paths_a, depth_a = new_frontier, new_paths, depth + 1
        else:
            frontier_b, paths_b, depth_b = new_frontier, new_paths, depth + 1
        if best is not None and best.length <= min(depth_a, depth_b) + 1:
            break
    return best


@dataclass
class Verdict:
    status: str  # "equivalent" | "inequivalent" | "unresolved"
    witness: dict | None = None
    path1: list[RlAction] | None = None
    path2: list[RlAction] | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.status,
                "witness": self.witness,
                "path1": None if self.path1 is None else [action_to_json(a) for a in self.path1],
                "path2": None if self.path2 is None else [action_to_json(a) for a in self.path2],
            },
            separators=(",", ":"),
        )


def decide_equivalence(
    g1: Plumbing,
    g2: Plumbing,
    width: int = 16,
    expansions_per_side: int | None = None,
) -> Verdict:
    """Three-valued equivalence decision.

    1. Different homology orders prove inequivalence outright.
    2. Otherwise two f-guided beams run side by side; the first canonical
       key visited from both sides proves equivalence, with the move paths
       from each input to the common graph as the certificate.
    3. If both beams exhaust their budgets, the answer is unresolved.

    Never returns "equivalent" for graphs with different |det|: moves
    preserve |det|, and a common key is a common graph.
    """
    h1, h2 = homology_order(g1), homology_order(g2)
    if h1 != h2:
        return Verdict(
            "inequivalent", witness={"invariant": "homology_order", "values": [h1, h2]}
        )
    if expansions_per_side is None:
        expansions_per_side = 5 * max(complexity(g1), complexity(g2))
    # Cheap first stage: if the two greedy descents touch a common graph
    # (usually both reach the seed's minimal form), that already certifies
    # equivalence without any beam work.
    trail1: dict[str, tuple[RlAction, ...]] = {canonical_key(g1): ()}
    _, gpath1 = greedy_simplify(g1)
    g = g1
    for k, action in enumerate(gpath1):
        _, g = apply_action(g, action)
        trail1.setdefault(canonical_key(g), tuple(gpath1[: k + 1]))
    g = g2
    if canonical_key(g2) in trail1:
        return Verdict("equivalent", path1=list(trail1[canonical_key(g2)]), path2=[])
    _, gpath2 = greedy_simplify(g2)
    for k, action in enumerate(gpath2):
        _, g = apply_action(g, action)
        key = canonical_key(g)
        if key in trail1:
            return Verdict(
                "equivalent", path1=list(trail1[key]), path2=list(gpath2[: k + 1])
            )
    visited1: dict[str, tuple[RlAction, ...]] = {}
    visited2: dict[str, tuple[RlAction, ...]] = {}
    gen1 = _beam_visits(g1, width, expansions_per_side, None)
    gen2 = _beam_visits(g2, width, expansions_per_side, None)
    live1 = live2 = True
    while live1 or live2:
        if live1:
            try:
                key, _g, path = next(gen1)
                visited1[key] = path
                if key in visited2:
                    return Verdict("equivalent", path1=list(path), path2=list(visited2[key]))
            except StopIteration:
                live1 = False
        if live2:
            try:
                key, _g, path = next(gen2)
                visited2[key] = path
                if key in visited1:
                    return Verdict("equivalent", path1=list(visited1[key]), path2=list(path))
            except StopIteration:
                live2 = False
    return Verdict("unresolved")
