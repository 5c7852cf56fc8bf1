"""The Neumann move calculus.

Three families of local rewrites, each with a blow-up and a blow-down
direction.  Every move preserves |det| exactly while changing the graph, so
scrambled graphs stay in the same equivalence class.
"""

import random

from plumbcalc import Plumbing, determinant
from plumbcalc.generate import random_plumbing
from plumbcalc.moves import (
    RlAction,
    Selector,
    apply_action,
    blow_down,
    blow_up_a,
    blow_up_b,
    blow_up_c,
    enumerate_legal_actions,
    random_neumann_move,
)

path = Plumbing([2, 3], [(0, 1)])
print("start:", path, "det", determinant(path))

up = blow_up_a(path, (0, 1), -1)
print("(a)-up on the edge:", up, "det", determinant(up))

up_b = blow_up_b(path, 0, 1)
print("(b)-up at vertex 0:", up_b, "det", determinant(up_b))

up_c = blow_up_c(path, 1, -1)
print("(c)-up at vertex 1:", up_c, "det", determinant(up_c))

# Blow-downs are the inverses: the (c)-up above is undone at its 0-leaf.
down = blow_down(up_c, 3)
print("(c)-down at the 0-leaf:", down)

# The agent action space: 6 selectors per node, with one merged blow-down.
single = Plumbing([3])
print("legal actions on a single vertex:", enumerate_legal_actions(single))
done, moved = apply_action(single, RlAction(0, Selector.DOWN))
print("illegal blow-down leaves the graph untouched:", done, moved)

# Ten random moves preserve |det| the whole way.
rng = random.Random(1)
g = random_plumbing(rng)
d0 = abs(determinant(g))
legal = 0
for _ in range(10):
    ok, g, applied = random_neumann_move(g, rng)
    legal += ok
    assert abs(determinant(g)) == d0
print(f"10 random draws ({legal} legal): |det| stayed {d0}")
