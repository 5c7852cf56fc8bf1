"""Plumbing-calculus engine for 3-manifolds given as weighted trees.

Subpackages and modules:

    graph      Plumbing trees, validation, exact invariants (determinant,
               homology order, complexity) and canonical keys.
    moves      The Neumann move calculus: blow-ups, blow-downs, the agent
               action space and random moves.
    generate   Random plumbings, scrambled pair samples, dataset files.
    nn         Dense tensors with reverse-mode gradients, graph layers
               (GEN / GCN / GAT), gated aggregation, Adam.
    classify   Graph-pair equivalence classifiers, training, evaluation.
    rl         The simplification environment plus actor-critic and DQN
               agents, pair evaluation, move statistics.
    search     Non-learned baselines: greedy/beam simplification,
               bidirectional move-path search, equivalence decisions.
    cli        Command-line entry point (`plumbcalc ...`).
"""

from .graph import (
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
from .moves import (
    AppliedMove,
    RlAction,
    Selector,
    apply_action,
    blow_down,
    blow_up_a,
    blow_up_b,
    blow_up_c,
    enumerate_legal_actions,
    legal_blow_down_kind,
    random_neumann_move,
)
from .generate import (
    GeneratorConfig,
    PairSample,
    equiv_pair,
    equiv_pair_fixed_n,
    inequiv_pair,
    make_sl_dataset,
    make_test4_pairs,
    random_plumbing,
    tweak_pair,
)

__version__ = "0.1.0"
