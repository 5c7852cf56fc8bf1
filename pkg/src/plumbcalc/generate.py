"""Random plumbings, scrambled pairs, and dataset files.

Pair recipes:

  equiv_pair      one random seed tree, both sides independently scrambled
                  by 1..n_max random Neumann moves; label +1.
  inequiv_pair    two independent seed trees, scrambled the same way;
                  label -1 (accidental equivalence is tolerated — it is
                  statistically insignificant at these sizes).
  tweak_pair      second seed = first with a single weight shifted by a
                  nonzero t in [-3, 3], then both scrambled; label -1.
  lens pairs      chains for L(p,q1) vs L(p,q2) with q2 not congruent to
                  +-q1 or +-q1^(-1) mod p: inequivalent but with equal |det|.

Determinism: every sample draws from its own random.Random stream derived
by SHA-256 from (seed, sample index), so files are byte-identical across
runs and platforms and generation can be parallelized by index without
changing the output.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from typing import Iterator

from .graph import Plumbing, lens_chain, validate
from .moves import random_neumann_move

__all__ = [
    "GeneratorConfig",
    "PairSample",
    "DEFAULT_CONFIG",
    "derive_seed",
    "random_plumbing",
    "scramble",
    "equiv_pair",
    "equiv_pair_fixed_n",
    "inequiv_pair",
    "tweak_pair",
    "lens_inequivalent",
    "iter_lens_pair_params",
    "make_sl_dataset",
    "make_pair_dataset",
    "make_test4_pairs",
    "write_pairs",
    "read_pairs",
    "read_pair_file",
]


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges for random seed trees (both ends inclusive)."""

    node_count_range: tuple[int, int] = (1, 25)
    weight_range: tuple[int, int] = (-20, 20)

    def __post_init__(self) -> None:
        lo, hi = self.node_count_range
        if not (1 <= lo <= hi):
            raise ValueError("node_count_range must be a nonempty range with lo >= 1")
        wlo, whi = self.weight_range
        if wlo > whi:
            raise ValueError("weight_range is empty")


DEFAULT_CONFIG = GeneratorConfig()


@dataclass(frozen=True)
class PairSample:
    g1: Plumbing
    g2: Plumbing
    label: int  # +1 equivalent, -1 inequivalent


def derive_seed(seed: int, index) -> int:
    """Stable 64-bit per-sample seed from a master seed and an index."""
    digest = hashlib.sha256(f"{seed}/{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def random_plumbing(rng: random.Random, config: GeneratorConfig = DEFAULT_CONFIG) -> Plumbing:
    """Uniform random tree: node count and weights uniform over the config
    ranges; each vertex i >= 1 attaches to a uniform earlier vertex."""
    n = rng.randint(*config.node_count_range)
    weights = [rng.randint(*config.weight_range) for _ in range(n)]
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    return Plumbing(weights, edges)


def scramble(p: Plumbing, rng: random.Random, iterations: int) -> Plumbing:
    """`iterations` random-move attempts; illegal draws consume an iteration
    without changing the graph."""
    g = p
    for _ in range(iterations):
        _, g, _ = random_neumann_move(g, rng)
    return g


def scramble_exact(p: Plumbing, rng: random.Random, n_moves: int) -> Plumbing:
    """Exactly `n_moves` successful moves; illegal draws are retried."""
    g = p
    done_count = 0
    while done_count < n_moves:
        done, g, _ = random_neumann_move(g, rng)
        if done:
            done_count += 1
    return g


def equiv_pair(
    rng: random.Random, n_max: int, config: GeneratorConfig = DEFAULT_CONFIG
) -> PairSample:
    seed_graph = random_plumbing(rng, config)
    g1 = scramble(seed_graph, rng, rng.randint(1, n_max))
    g2 = scramble(seed_graph, rng, rng.randint(1, n_max))
    return PairSample(g1, g2, 1)


def equiv_pair_fixed_n(
    rng: random.Random, n: int, config: GeneratorConfig = DEFAULT_CONFIG
) -> PairSample:
    """Equivalent pair where each side receives exactly n successful moves."""
    seed_graph = random_plumbing(rng, config)
    g1 = scramble_exact(seed_graph, rng, n)
    g2 = scramble_exact(seed_graph, rng, n)
    return PairSample(g1, g2, 1)


def inequiv_pair(
    rng: random.Random, n_max: int, config: GeneratorConfig = DEFAULT_CONFIG
) -> PairSample:
    s1 = random_plumbing(rng, config)
    s2 = random_plumbing(rng, config)
    g1 = scramble(s1, rng, rng.randint(1, n_max))
    g2 = scramble(s2, rng, rng.randint(1, n_max))
    return PairSample(g1, g2, -1)


def tweak_pair(
    rng: random.Random, n_max: int, config: GeneratorConfig = DEFAULT_CONFIG
) -> PairSample:
    s1 = random_plumbing(rng, config)
    v = rng.randrange(s1.n)
    t = rng.choice((-3, -2, -1, 1, 2, 3))
    weights = list(s1.weights)
    weights[v] += t
    s2 = Plumbing(weights, s1.edges)
    g1 = scramble(s1, rng, rng.randint(1, n_max))
    g2 = scramble(s2, rng, rng.randint(1, n_max))
    return PairSample(g1, g2, -1)


# --- equal-determinant inequivalent pairs -----------------------------------


def lens_inequivalent(p: int, q1: int, q2: int) -> bool:
    """True when L(p,q1) and L(p,q2) are non-homeomorphic, i.e. q2 is not
    congruent to +-q1 or +-q1^(-1) mod p."""
    q1_inv = pow(q1, -1, p)
    return q2 % p not in {q1 % p, (-q1) % p, q1_inv, (-q1_inv) % p}


def iter_lens_pair_params() -> Iterator[tuple[int, int, int]]:
    """Deterministic stream of (p, q1, q2) with equal |det| = p and
    certified inequivalence, ordered by p then (q1, q2)."""
    p = 2
    while True:
        p += 1
        units = [q for q in range(1, p) if math.gcd(q, p) == 1]
        for a in range(len(units)):
            for b in range(a + 1, len(units)):
                if lens_inequivalent(p, units[a], units[b]):
                    yield p, units[a], units[b]


# --- dataset files -----------------------------------------------------------
#
# JSONL: a header line {"kind":"plumbing-pairs","seed":...,"nmax":...,
# "counts":{...}} followed by one line per pair:
# {"x1":[...],"e1":[[i,j],...],"x2":[...],"e2":[...],"label":1|-1}.


def _pair_line(sample: PairSample) -> str:
    return json.dumps(
        {
            "x1": list(sample.g1.weights),
            "e1": [list(e) for e in sample.g1.edges],
            "x2": list(sample.g2.weights),
            "e2": [list(e) for e in sample.g2.edges],
            "label": sample.label,
        },
        separators=(",", ":"),
    )


def write_pairs(path: str, samples: list[PairSample], header: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":"), sort_keys=True) + "\n")
        for s in samples:
            fh.write(_pair_line(s) + "\n")


def read_pairs(path: str) -> Iterator[PairSample]:
    """Stream samples from a pair file, validating every graph."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        header = json.loads(first)
        if header.get("kind") != "plumbing-pairs":
            raise ValueError(f"{path}: not a plumbing-pairs file")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            g1 = Plumbing(obj["x1"], obj["e1"])
            g2 = Plumbing(obj["x2"], obj["e2"])
            label = int(obj["label"])
            for g in (g1, g2):
                problem = validate(g)
                if problem is not None:
                    raise ValueError(f"{path}:{line_no}: invalid graph: {problem}")
            if label not in (1, -1):
                raise ValueError(f"{path}:{line_no}: label must be +-1")
            yield PairSample(g1, g2, label)


def read_pair_file(path: str) -> list[PairSample]:
    return list(read_pairs(path))


_PAIR_MAKERS = {
    "equiv": equiv_pair,
    "inequiv": inequiv_pair,
    "tweak": tweak_pair,
}


def make_pair_dataset(
    path: str,
    kind: str,
    count: int,
    seed: int,
    n_max: int = 40,
    config: GeneratorConfig = DEFAULT_CONFIG,
) -> dict:
    """Write `count` pairs of a single kind; returns the header written."""
    if kind not in _PAIR_MAKERS:
        raise ValueError(f"unknown pair kind {kind!r}")
    maker = _PAIR_MAKERS[kind]
    samples = [
        maker(random.Random(derive_seed(seed, f"{kind}{i}")), n_max, config)
        for i in range(count)
    ]
    header = {
        "kind": "plumbing-pairs",
        "seed": seed,
        "nmax": n_max,
        "counts": {kind: count},
    }
    write_pairs(path, samples, header)
    return header


def make_sl_dataset(
    path: str,
    seed: int,
    scale: float = 1.0,
    n_max: int = 40,
    config: GeneratorConfig = DEFAULT_CONFIG,
    total: int | None = None,
) -> dict:
    """Mixed supervised dataset in the 4:3:1 equiv:inequiv:tweak composition.

    scale=1 gives 40,000 + 30,000 + 10,000 pairs; smaller scales shrink each
    component proportionally.  `total` overrides scale with an explicit pair
    count split 4:3:1.  The file is shuffled deterministically by `seed`.
    """
    if total is not None:
        n_equiv = total * 4 // 8
        n_inequiv = total * 3 // 8
        n_tweak = total - n_equiv - n_inequiv
    else:
        if not (0 < scale <= 1):
            raise ValueError("scale must be in (0, 1]")
        n_equiv = round(40000 * scale)
        n_inequiv = round(30000 * scale)
        n_tweak = round(10000 * scale)
    samples: list[PairSample] = []
    for kind, count in (("equiv", n_equiv), ("inequiv", n_inequiv), ("tweak", n_tweak)):
        maker = _PAIR_MAKERS[kind]
        for i in range(count):
            rng = random.Random(derive_seed(seed, f"{kind}{i}"))
            samples.append(maker(rng, n_max, config))
    random.Random(derive_seed(seed, "shuffle")).shuffle(samples)
    header = {
        "kind": "plumbing-pairs",
        "seed": seed,
        "nmax": n_max,
        "counts": {"equiv": n_equiv, "inequiv": n_inequiv, "tweak": n_tweak},
    }
    write_pairs(path, samples, header)
    return header


def make_test4_pairs(path: str, count: int, seed: int, n_max: int = 40) -> dict:
    """Equal-|det| inequivalent pairs from lens-space chains.

    Each pair takes the next certified-inequivalent (p, q1, q2) and scrambles
    both chains by 1..n_max random moves; labels are all -1 while both sides
    share |det| = p.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    params = iter_lens_pair_params()
    samples: list[PairSample] = []
    for i in range(count):
        p, q1, q2 = next(params)
        rng = random.Random(derive_seed(seed, f"test4-{i}"))
        g1 = scramble(lens_chain(p, q1), rng, rng.randint(1, n_max))
        g2 = scramble(lens_chain(p, q2), rng, rng.randint(1, n_max))
        samples.append(PairSample(g1, g2, -1))
    header = {
        "kind": "plumbing-pairs",
        "seed": seed,
        "nmax": n_max,
        "counts": {"test4": count},
    }
    write_pairs(path, samples, header)
    return header
