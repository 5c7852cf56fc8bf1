"""Deterministic simplification and equivalence certificates.

Greedy descent undoes most random scrambles; beam search tolerates
temporary complexity increases (some graphs, like the E8 tree, admit no
immediate blow-down and must grow before they can shrink).  The decision
procedure combines the exact homology-order invariant with two beams
meeting at a common canonical key.
"""

import random

from plumbcalc import Plumbing
from plumbcalc.generate import equiv_pair_fixed_n
from plumbcalc.graph import complexity, determinant, is_isomorphic
from plumbcalc.moves import replay
from plumbcalc.search import (
    beam_simplify,
    bidirectional_path,
    decide_equivalence,
    greedy_simplify,
)

# Greedy: a (4)-(1) path blow-downs to the single vertex (3).
g, path = greedy_simplify(Plumbing([4, 1], [(0, 1)]))
print("greedy:", g, "in", len(path), "move(s)")

# The E8 tree is a greedy dead end (no legal blow-down), but the beam walks
# uphill and finds an f=30 representative of the same manifold.
e8 = Plumbing([-2] * 8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)])
best, path = beam_simplify(e8, width=16)
print(f"beam: f {complexity(e8)} -> {complexity(best)} via {len(path)} moves; "
      f"det stays {determinant(best)}")
print("      reached:", best)
assert is_isomorphic(replay(e8, path), best)

# Shortest connections via meet-in-the-middle search.
r = bidirectional_path(Plumbing([3]), Plumbing([4, 1], [(0, 1)]), max_depth=3)
print("single (3) <-> path (4)-(1): connection length", r.length)

# Equivalence decisions: invariant first, then two beams.
v = decide_equivalence(Plumbing([2]), Plumbing([3]))
print("single (2) vs (3):", v.status, v.witness)

rng = random.Random(11)
pair = equiv_pair_fixed_n(rng, 20)
v = decide_equivalence(pair.g1, pair.g2)
print("scrambled equivalent pair:", v.status,
      f"(paths of {len(v.path1)} and {len(v.path2)} moves to a common graph)")
assert is_isomorphic(replay(pair.g1, v.path1), replay(pair.g2, v.path2))
