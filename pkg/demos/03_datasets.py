"""Pair datasets for the equivalence classifier.

Three recipes: equivalent pairs (one seed, both sides scrambled),
inequivalent pairs (two seeds), and tweak pairs (same tree, one weight
nudged, then scrambled) which sharpen the decision boundary.  A fourth,
manual set pairs lens-space chains with equal determinants but provably
different manifolds.
"""

import collections
import random
import tempfile

from plumbcalc.generate import (
    equiv_pair,
    inequiv_pair,
    make_sl_dataset,
    make_test4_pairs,
    read_pair_file,
    tweak_pair,
)
from plumbcalc.graph import homology_order

rng = random.Random(0)
eq = equiv_pair(rng, n_max=40)
print("equivalent pair: labels", eq.label, "- homology orders",
      homology_order(eq.g1), homology_order(eq.g2))

ineq = inequiv_pair(rng, n_max=40)
tw = tweak_pair(rng, n_max=40)
print("inequivalent / tweak labels:", ineq.label, tw.label)

with tempfile.TemporaryDirectory() as tmp:
    # 4:3:1 equivalent : inequivalent : tweak composition, here 80 pairs.
    header = make_sl_dataset(f"{tmp}/mix.jsonl", seed=7, total=80)
    print("mix header:", header)
    samples = read_pair_file(f"{tmp}/mix.jsonl")
    print("label counts:", collections.Counter(s.label for s in samples))

    make_test4_pairs(f"{tmp}/t4.jsonl", count=8, seed=3)
    all_equal = all(
        homology_order(s.g1) == homology_order(s.g2)
        for s in read_pair_file(f"{tmp}/t4.jsonl")
    )
    print("equal-determinant pairs all share |det|:", all_equal)
