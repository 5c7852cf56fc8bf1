"""The simplification environment and a small actor-critic run.

States are plumbings; episodes start from a scrambled 10-node tree and end
when the agent reaches the pre-scramble complexity or after 15 steps.
Rewards are -f(next) for legal actions and -2 f(state) for illegal ones.

This demo trains for a few hundred episodes only; the real run is 10,000
episodes across 8 worker streams.
"""

import random

import numpy as np

from plumbcalc import rl
from plumbcalc.graph import complexity
from plumbcalc.moves import RlAction, Selector

# Environment mechanics.
cfg = rl.EnvConfig()
state = rl.env_reset(random.Random(0), cfg)
print(f"start: |V| = {state.current.n}, f = {complexity(state.current)}, "
      f"target f = {state.target_f}")
nxt, reward, done = rl.env_step(state, RlAction(0, Selector.B_UP_PLUS), cfg)
print("one blow-up: reward", reward, "=", -complexity(nxt.current))

# A short training run (hundreds of episodes, seconds of work).
net, history = rl.a3c_train(rl.A3CConfig(episodes=400, seed=7))
rets = [h["ret"] for h in history]
print(f"returns: first 100 mean {np.mean(rets[:100]):.0f}, "
      f"last 100 mean {np.mean(rets[-100:]):.0f}")

# Move-category statistics: the untrained reference spreads 1/8 per kind.
uniform = rl.move_stats(None, episodes=200, seed=1)
print("uniform fractions:", np.round(uniform, 3))

# Pair evaluation: run the sampled policy on both sides of equivalent pairs
# until the canonical keys match.
report = rl.evaluate_pairs(rl.sampling_selector(net), n_moves=5, pair_count=20, seed=2)
print("pair evaluation:", report)
