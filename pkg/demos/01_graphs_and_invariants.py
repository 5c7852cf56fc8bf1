"""Plumbing graphs and their exact invariants.

A plumbing is a tree with an integer weight on each vertex.  The weighted
adjacency matrix (weights on the diagonal) has an exact integer determinant
whose absolute value is the order of the first homology group of the
3-manifold the tree encodes; the complexity measure f = 5|V| + sum|w|
orders representatives of the same manifold by simplicity.
"""

from plumbcalc import (
    Plumbing,
    canonical_key,
    complexity,
    determinant,
    homology_order,
    is_isomorphic,
    lens_chain,
    validate,
    weighted_adjacency,
)

# A path with weights 2 and 3: det = 2*3 - 1 = 5.
path = Plumbing([2, 3], [(0, 1)])
print("path (2)-(3):", weighted_adjacency(path), "det =", determinant(path))

# The E8 tree: eight vertices of weight -2, determinant 1.
e8 = Plumbing([-2] * 8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)])
print("E8 det =", determinant(e8), " homology order =", homology_order(e8))
print("E8 complexity f =", complexity(e8))

# Canonical keys decide isomorphism in one string comparison, whatever the
# vertex numbering.
relabeled = Plumbing([-2] * 8, [(7, 6), (6, 5), (5, 4), (4, 3), (3, 2), (2, 1), (3, 0)])
print("relabeled E8 isomorphic:", is_isomorphic(e8, relabeled))
print("key:", canonical_key(e8))

# Lens spaces L(p, q) as linear chains from negative continued fractions;
# |det| recovers p exactly.
for p, q in [(3, 1), (5, 2), (7, 2), (25, 7)]:
    chain = lens_chain(p, q)
    print(f"L({p},{q}) -> weights {list(chain.weights)}, |det| = {homology_order(chain)}")

# validate() reports the first violated invariant instead of raising.
bad = Plumbing([1, 1], [])
print("two vertices, no edges ->", validate(bad))
