"""Simplification environment and agents.

The environment state is a plumbing; an episode starts from a 10-node random
tree scrambled by 15 random moves, and the agent tries to reach a state at
most as complex (f = 5|V| + sum|w|) as the pre-scramble seed within 15
steps.  Rewards are -f(next state) for legal actions and -2 f(state) for
illegal ones, so every reward is negative and simpler states are punished
less.

Agents:

  a3c_train   actor-critic with GCN+GCN trunks; full-episode Monte-Carlo
              returns, entropy bonus, gradient clipping.  Workers are
              independent episode streams applying updates to the shared
              parameters; the default scheduler is synchronous round-robin
              (bit-reproducible), threaded asynchrony is available behind
              `async_workers`.
  dqn_train   Q-network with the same trunk, epsilon-greedy collection,
              uniform replay, periodically synced target copy.

Evaluation runs a trained policy on both sides of equivalent pairs and
counts a success when the two sides become isomorphic within 5N steps.
"""

from __future__ import annotations

import random
import threading
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .generate import GeneratorConfig, derive_seed, equiv_pair_fixed_n, random_plumbing, scramble
from .graph import Plumbing, canonical_key, complexity
from .moves import (
    DEFAULT_A_UP_SIGN,
    RlAction,
    Selector,
    action_category,
    apply_action,
    blow_down,
    blow_up_a,
    blow_up_b,
    blow_up_c,
    legal_blow_down_kind,
)
from .nn import autodiff as ad
from .nn.autodiff import ParamStore, Segments, Tensor, no_grad
from .nn.layers import GraphBatch, affine, gcn_layer

__all__ = [
    "EnvConfig",
    "EnvState",
    "env_reset",
    "env_step",
    "PolicyValueNet",
    "QNet",
    "A3CConfig",
    "DQNConfig",
    "a3c_train",
    "dqn_train",
    "sampling_selector",
    "greedy_q_selector",
    "uniform_selector",
    "evaluate_pairs",
    "move_stats",
    "simplify_with_policy",
]

HIDDEN_WIDTH = 128
N_SELECTORS = 6


@dataclass(frozen=True)
class EnvConfig:
    seed_nodes: int = 10
    scramble_moves: int = 15
    max_steps: int = 15
    gamma: float = 0.99
    # Termination compares f against the pre-scramble seed by default; the
    # post-scramble start state is available as an alternative baseline.
    baseline: str = "pre_scramble"
    weight_range: tuple[int, int] = (-20, 20)

    def __post_init__(self) -> None:
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must be in (0, 1)")
        if self.baseline not in ("pre_scramble", "post_scramble"):
            raise ValueError("baseline must be pre_scramble or post_scramble")


DEFAULT_ENV = EnvConfig()


@dataclass(frozen=True)
class EnvState:
    current: Plumbing
    steps_taken: int
    target_f: int


def env_reset(rng: random.Random, config: EnvConfig = DEFAULT_ENV) -> EnvState:
    gen_cfg = GeneratorConfig(
        node_count_range=(config.seed_nodes, config.seed_nodes),
        weight_range=config.weight_range,
    )
    seed_graph = random_plumbing(rng, gen_cfg)
    current = scramble(seed_graph, rng, config.scramble_moves)
    target = complexity(seed_graph if config.baseline == "pre_scramble" else current)
    return EnvState(current=current, steps_taken=0, target_f=target)


def env_step(
    state: EnvState, action: RlAction, config: EnvConfig = DEFAULT_ENV
) -> tuple[EnvState, int, bool]:
    """Apply one action: legal moves earn -f(next), illegal ones -2 f(state)
    and leave the graph untouched.  Done when the new state is at most as
    complex as the target or the step budget is exhausted."""
    if state.steps_taken >= config.max_steps:
        raise ValueError("episode already ended")
    done_move, nxt = apply_action(state.current, action)
    if done_move:
        reward = -complexity(nxt)
    else:
        nxt = state.current
        reward = -2 * complexity(state.current)
    steps = state.steps_taken + 1
    done = complexity(nxt) <= state.target_f or steps >= config.max_steps
    return EnvState(current=nxt, steps_taken=steps, target_f=state.target_f), reward, done


# --- networks ----------------------------------------------------------------
#
# Both trunks are GCN(1,128) -> ReLU -> GCN(128,128).  The policy head is a
# per-node affine 128 -> 6 whose flattened outputs are softmaxed over all
# 6|V| actions of a graph; the value head averages node embeddings per graph
# and maps 128 -> 1.  The Q-network shares the policy shape without the
# softmax.  Single-graph forward passes use a dense fast path that is tested
# to match the batched layers exactly.


def _trunk(store: ParamStore, prefix: str, batch: GraphBatch) -> Tensor:
    h = gcn_layer(store, f"{prefix}.conv1", batch, batch.x, HIDDEN_WIDTH)
    h = ad.relu(h)
    return gcn_layer(store, f"{prefix}.conv2", batch, h, HIDDEN_WIDTH)


def _flat_segments(batch: GraphBatch) -> Segments:
    return Segments(np.repeat(batch.node_graph, N_SELECTORS), batch.n_graphs)


def _single_graph_norm_adj(g: Plumbing) -> np.ndarray:
    n = g.n
    a_hat = np.eye(n)
    for i, j in g.edges:
        a_hat[i, j] = 1.0
        a_hat[j, i] = 1.0
    d = a_hat.sum(axis=1)
    coef = 1.0 / np.sqrt(d)
    return a_hat * coef[:, None] * coef[None, :]


class PolicyValueNet:
    """Shared store holding the policy trunk/head and the value trunk/head."""

    def __init__(self, seed: int = 0, store: ParamStore | None = None):
        self.store = store if store is not None else ParamStore(seed=seed)
        self._materialize()

    def _materialize(self) -> None:
        batch = GraphBatch([Plumbing([1])])
        self.policy_logits(batch)
        self.values(batch)

    def policy_logits(self, batch: GraphBatch) -> Tensor:
        return affine(self.store, "policy.head", _trunk(self.store, "policy", batch), N_SELECTORS)

    def action_probs_flat(self, batch: GraphBatch) -> tuple[Tensor, Segments]:
        """(6*N, 1) probabilities, softmaxed per graph over all 6|V| actions."""
        logits = self.policy_logits(batch)
        flat = ad.reshape(logits, (logits.shape[0] * N_SELECTORS, 1))
        seg = _flat_segments(batch)
        return ad.segment_softmax(flat, seg), seg

    def values(self, batch: GraphBatch) -> Tensor:
        h = _trunk(self.store, "value", batch)
        pooled = ad.segment_sum(h, batch.graph_seg)
        mean = ad.mul(pooled, Tensor(1.0 / batch.graph_seg.counts[:, None]))
        return affine(self.store, "value.head", mean, 1)

    def probs_single(self, g: Plumbing) -> np.ndarray:
        """Fast dense forward for one graph: flat (6|V|,) action probabilities."""
        p = self.store.params
        a_hat = _single_graph_norm_adj(g)
        x = np.asarray(g.weights, dtype=np.float64)[:, None]
        h = a_hat @ x @ p["policy.conv1.theta"].data
        np.maximum(h, 0.0, out=h)
        h = a_hat @ h @ p["policy.conv2.theta"].data
        logits = (h @ p["policy.head.w"].data + p["policy.head.b"].data).ravel()
        z = np.exp(logits - logits.max())
        return z / z.sum()

    def save(self, path: str, extra: dict | None = None) -> None:
        meta = {"arch": "a3c-gcn+gcn", "dims": {"hidden": HIDDEN_WIDTH}}
        if extra:
            meta.update(extra)
        self.store.save(path, meta)

    @classmethod
    def load(cls, path: str) -> "PolicyValueNet":
        store, _ = ParamStore.load(path)
        return cls(store=store)


class QNet:
    """Per-(node, selector) action values with the policy trunk shape."""

    def __init__(self, seed: int = 0, store: ParamStore | None = None):
        self.store = store if store is not None else ParamStore(seed=seed)
        self.q_values(GraphBatch([Plumbing([1])]))

    def q_values(self, batch: GraphBatch) -> Tensor:
        return affine(self.store, "q.head", _trunk(self.store, "q", batch), N_SELECTORS)

    def q_single(self, g: Plumbing) -> np.ndarray:
        p = self.store.params
        a_hat = _single_graph_norm_adj(g)
        x = np.asarray(g.weights, dtype=np.float64)[:, None]
        h = a_hat @ x @ p["q.conv1.theta"].data
        np.maximum(h, 0.0, out=h)
        h = a_hat @ h @ p["q.conv2.theta"].data
        return (h @ p["q.head.w"].data + p["q.head.b"].data).ravel()

    def save(self, path: str, extra: dict | None = None) -> None:
        meta = {"arch": "dqn-gcn+gcn", "dims": {"hidden": HIDDEN_WIDTH}}
        if extra:
            meta.update(extra)
        self.store.save(path, meta)

    @classmethod
    def load(cls, path: str) -> "QNet":
        store, _ = ParamStore.load(path)
        return cls(store=store)


def _flat_to_action(flat_index: int) -> RlAction:
    return RlAction(flat_index // N_SELECTORS, Selector(flat_index % N_SELECTORS))


def _sample_flat(probs: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(probs)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right").clip(0, len(probs) - 1))


# --- selectors (policy -> action choice) --------------------------------------


def sampling_selector(net: PolicyValueNet):
    """Action sampled from the policy distribution (A3C convention)."""

    def select(g: Plumbing, rng: np.random.Generator) -> RlAction:
        return _flat_to_action(_sample_flat(net.probs_single(g), rng))

    return select


def greedy_q_selector(net: QNet):
    """Argmax over all 6|V| action values (DQN convention, epsilon = 0)."""

    def select(g: Plumbing, rng: np.random.Generator) -> RlAction:
        return _flat_to_action(int(np.argmax(net.q_single(g))))

    return select


def uniform_selector():
    """Uniform over the 6|V| agent actions."""

    def select(g: Plumbing, rng: np.random.Generator) -> RlAction:
        return _flat_to_action(int(rng.integers(0, N_SELECTORS * g.n)))

    return select


# --- A3C ----------------------------------------------------------------------


@dataclass
class A3CConfig:
    episodes: int = 10_000
    workers: int = 8
    lr: float = 5e-4
    entropy_beta: float = 0.01
    grad_clip: float = 5.0
    # Internal scaling of returns used in the losses.  Raw returns are
    # order -10^3 (f is ~150 and every reward is -f-ish), far beyond what an
    # Adam-trained value head can reach at this lr within the episode
    # budget; environment rewards themselves stay exact.
    return_scale: float = 0.01
    # Bootstrap horizon: R_t = r_t + ... + gamma^k V(s_{t+k}).  None means
    # full-episode Monte-Carlo returns, which empirically drown the
    # per-action complexity signal in cross-state return variance (the value
    # net sees the graph but not the remaining-step count).
    n_step: int | None = 5
    seed: int = 0
    env: EnvConfig = field(default_factory=EnvConfig)
    async_workers: bool = False  # threads; not bit-reproducible


def _collect_episode(
    net: PolicyValueNet,
    env_rng: random.Random,
    act_rng: np.random.Generator,
    env_cfg: EnvConfig,
) -> tuple[list[Plumbing], list[int], list[int], Plumbing, bool]:
    """Roll one episode.

    Returns (states, flat actions, rewards, final state, reached_target);
    reached_target distinguishes true termination from the step cap, which
    matters for bootstrapping."""
    state = env_reset(env_rng, env_cfg)
    states: list[Plumbing] = []
    actions: list[int] = []
    rewards: list[int] = []
    done = False
    while not done:
        g = state.current
        with no_grad():
            probs = net.probs_single(g)
        flat = _sample_flat(probs, act_rng)
        states.append(g)
        actions.append(flat)
        state, reward, done = env_step(state, _flat_to_action(flat), env_cfg)
        rewards.append(reward)
    reached_target = complexity(state.current) <= state.target_f
    return states, actions, rewards, state.current, reached_target


def _episode_losses(
    net: PolicyValueNet,
    states: list[Plumbing],
    actions: list[int],
    rewards: list[int],
    final_state: Plumbing,
    reached_target: bool,
    gamma: float,
    entropy_beta: float,
    return_scale: float = 1.0,
    n_step: int | None = 5,
) -> Tensor:
    """Combined actor + critic loss for one episode batch.

    Actor: sum_t -log pi(a_t|s_t) (R_t - V(s_t)) - beta * entropy.
    Critic: sum_t (R_t - V(s_t))^2.  The advantage uses the critic's value
    as a constant, so the two losses touch disjoint parameters.

    Returns R_t are n-step bootstrapped (Monte-Carlo when n_step is None);
    an episode cut by the step cap bootstraps through its final state, a
    true terminal state is worth zero.
    """
    T = len(rewards)
    batch = GraphBatch(states + [final_state])
    values = net.values(batch)  # (T+1, 1)
    v_const = values.data.reshape(-1)
    scaled_r = np.asarray(rewards, dtype=np.float64) * return_scale

    def tail_value(j: int) -> float:
        if j < T:
            return v_const[j]
        return 0.0 if reached_target else v_const[T]

    returns = np.empty(T)
    if n_step is None:
        acc = 0.0 if reached_target else v_const[T]
        for t in range(T - 1, -1, -1):
            acc = scaled_r[t] + gamma * acc
            returns[t] = acc
    else:
        for t in range(T):
            m = min(n_step, T - t)
            acc = tail_value(t + m)
            for i in range(m - 1, -1, -1):
                acc = scaled_r[t + i] + gamma * acc
            returns[t] = acc

    advantages = returns[:, None] - values.data[:T]  # constant for the actor
    probs, _seg = net.action_probs_flat(batch)
    node_offsets = np.cumsum([0] + [g.n for g in states])
    chosen = np.array(
        [off * N_SELECTORS + a for off, a in zip(node_offsets[:T], actions)], dtype=np.int64
    )
    chosen_probs = ad.gather_rows(probs, Segments(chosen, probs.shape[0]))
    eps = Tensor(1e-12)
    log_chosen = ad.log(ad.add(chosen_probs, eps))
    actor = ad.scale(ad.sum_all(ad.mul(log_chosen, Tensor(advantages))), -1.0)
    # entropy over the visited states only (the bootstrap state carries no action)
    visited = Tensor((np.repeat(batch.node_graph, N_SELECTORS) < T).astype(float)[:, None])
    plogp = ad.mul(ad.mul(probs, ad.log(ad.add(probs, eps))), visited)
    entropy = ad.scale(ad.sum_all(plogp), -1.0)
    actor = ad.add(actor, ad.scale(entropy, -entropy_beta))
    value_rows = ad.gather_rows(values, Segments(np.arange(T), T + 1))
    diff = ad.sub(Tensor(returns[:, None]), value_rows)
    critic = ad.sum_all(ad.mul(diff, diff))
    return ad.add(actor, critic)


def a3c_train(config: A3CConfig) -> tuple[PolicyValueNet, list[dict]]:
    net = PolicyValueNet(seed=config.seed)
    streams = [
        (
            random.Random(derive_seed(config.seed, f"env{w}")),
            np.random.default_rng(derive_seed(config.seed, f"act{w}")),
        )
        for w in range(config.workers)
    ]
    history: list[dict] = []
    if not config.async_workers:
        for ep in range(config.episodes):
            env_rng, act_rng = streams[ep % config.workers]
            states, actions, rewards, final_state, reached = _collect_episode(
                net, env_rng, act_rng, config.env
            )
            loss = _episode_losses(
                net,
                states,
                actions,
                rewards,
                final_state,
                reached,
                config.env.gamma,
                config.entropy_beta,
                config.return_scale,
                config.n_step,
            )
            net.store.zero_grads()
            loss.backward()
            net.store.clip_group("policy.", config.grad_clip)
            net.store.clip_group("value.", config.grad_clip)
            net.store.adam_step(config.lr)
            history.append(
                {
                    "episode": ep,
                    "ret": int(sum(rewards)),
                    "steps": len(rewards),
                    "final_f": complexity(final_state),
                }
            )
        return net, history

    lock = threading.Lock()
    counter = {"next": 0}

    def worker(w: int) -> None:
        env_rng, act_rng = streams[w]
        local = PolicyValueNet(seed=config.seed)
        while True:
            with lock:
                ep = counter["next"]
                if ep >= config.episodes:
                    return
                counter["next"] = ep + 1
                local.store.load_state(net.store.state_copy())
            states, actions, rewards, final_state, reached = _collect_episode(
                local, env_rng, act_rng, config.env
            )
            loss = _episode_losses(
                local,
                states,
                actions,
                rewards,
                final_state,
                reached,
                config.env.gamma,
                config.entropy_beta,
                config.return_scale,
                config.n_step,
            )
            local.store.zero_grads()
            loss.backward()
            with lock:
                for name, p in local.store.params.items():
                    net.store.params[name].grad = p.grad
                net.store.clip_group("policy.", config.grad_clip)
                net.store.clip_group("value.", config.grad_clip)
                net.store.adam_step(config.lr)
                history.append(
                    {
                        "episode": ep,
                        "ret": int(sum(rewards)),
                        "steps": len(rewards),
                        "final_f": complexity(final_state),
                    }
                )

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(config.workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    history.sort(key=lambda row: row["episode"])
    return net, history


# --- DQN -----------------------------------------------------------------------


@dataclass
class DQNConfig:
    episodes: int = 10_000
    lr: float = 5e-4
    replay_size: int = 100_000
    batch_size: int = 64
    target_sync_steps: int = 1000
    update_every: int = 4
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_fraction: float = 0.2  # schedule reaches eps_end after this share of episodes
    # Rewards are scaled inside the Bellman targets for the same reach
    # reason as A3C's return_scale; greedy argmax is scale-invariant.
    reward_scale: float = 0.01
    seed: int = 0
    env: EnvConfig = field(default_factory=EnvConfig)


def _segment_max(flat: np.ndarray, seg_ids: np.ndarray, n: int) -> np.ndarray:
    out = np.full(n, -np.inf)
    np.maximum.at(out, seg_ids, flat)
    return out


def dqn_train(config: DQNConfig) -> tuple[QNet, list[dict]]:
    net = QNet(seed=config.seed)
    target = QNet(seed=config.seed)
    target.store.load_state(net.store.state_copy())
    replay: deque = deque(maxlen=config.replay_size)
    env_rng = random.Random(derive_seed(config.seed, "env"))
    act_rng = np.random.default_rng(derive_seed(config.seed, "act"))
    replay_rng = np.random.default_rng(derive_seed(config.seed, "replay"))
    history: list[dict] = []
    gamma = config.env.gamma
    eps_span = max(1, int(config.eps_fraction * config.episodes))
    global_step = 0
    for ep in range(config.episodes):
        eps = config.eps_start + (config.eps_end - config.eps_start) * min(1.0, ep / eps_span)
        state = env_reset(env_rng, config.env)
        total_reward = 0
        done = False
        steps = 0
        while not done:
            g = state.current
            if act_rng.random() < eps:
                flat = int(act_rng.integers(0, N_SELECTORS * g.n))
            else:
                flat = int(np.argmax(net.q_single(g)))
            state, reward, done = env_step(state, _flat_to_action(flat), config.env)
            replay.append((g, flat, reward, state.current, done))
            total_reward += reward
            steps += 1
            global_step += 1
            if global_step % config.update_every == 0 and len(replay) >= config.batch_size:
                _dqn_update(net, target, replay, replay_rng, config, gamma)
            if global_step % config.target_sync_steps == 0:
                target.store.load_state(net.store.state_copy())
        history.append(
            {
                "episode": ep,
                "ret": total_reward,
                "steps": steps,
                "final_f": complexity(state.current),
            }
        )
    return net, history


def _dqn_update(
    net: QNet,
    target: QNet,
    replay: deque,
    rng: np.random.Generator,
    config: DQNConfig,
    gamma: float,
) -> None:
    idx = rng.integers(0, len(replay), size=config.batch_size)
    batch = [replay[int(i)] for i in idx]
    states = [b[0] for b in batch]
    actions = np.array([b[1] for b in batch], dtype=np.int64)
    rewards = np.array([b[2] for b in batch], dtype=np.float64) * config.reward_scale
    next_states = [b[3] for b in batch]
    dones = np.array([b[4] for b in batch], dtype=np.float64)
    with no_grad():
        next_batch = GraphBatch(next_states)
        q_next = target.q_values(next_batch).data.reshape(-1)
        seg_ids = np.repeat(next_batch.node_graph, N_SELECTORS)
        max_next = _segment_max(q_next, seg_ids, len(batch))
    targets = rewards + gamma * (1.0 - dones) * max_next
    state_batch = GraphBatch(states)
    q = net.q_values(state_batch)
    flat = ad.reshape(q, (q.shape[0] * N_SELECTORS, 1))
    node_offsets = np.cumsum([0] + [g.n for g in states[:-1]])
    chosen = np.array(
        [off * N_SELECTORS + a for off, a in zip(node_offsets, actions)], dtype=np.int64
    )
    q_chosen = ad.gather_rows(flat, Segments(chosen, flat.shape[0]))
    diff = ad.sub(q_chosen, Tensor(targets[:, None]))
    loss = ad.scale(ad.sum_all(ad.mul(diff, diff)), 1.0 / len(batch))
    net.store.zero_grads()
    loss.backward()
    net.store.adam_step(config.lr)


# --- evaluation protocol --------------------------------------------------------


def evaluate_pairs(
    select_action,
    n_moves: int,
    pair_count: int,
    budget_multiplier: int = 5,
    seed: int = 0,
    config: GeneratorConfig = GeneratorConfig(),
) -> dict:
    """Run the policy on both sides of fresh equivalent pairs.

    Each time step applies one selected action to each graph (two actions
    per step); after every step the canonical keys are compared.  Success
    means isomorphic within budget_multiplier * n_moves steps; a pair that
    starts isomorphic succeeds with zero actions.  Reports the success rate
    and the mean number of actions over successes.
    """
    successes = 0
    actions_taken: list[int] = []
    for i in range(pair_count):
        pair_rng = random.Random(derive_seed(seed, f"pair{i}"))
        sample = equiv_pair_fixed_n(pair_rng, n_moves, config)
        g1, g2 = sample.g1, sample.g2
        act_rng = np.random.default_rng(derive_seed(seed, f"act{i}"))
        if canonical_key(g1) == canonical_key(g2):
            successes += 1
            actions_taken.append(0)
            continue
        for step in range(1, budget_multiplier * n_moves + 1):
            moved1, h1 = apply_action(g1, select_action(g1, act_rng))
            moved2, h2 = apply_action(g2, select_action(g2, act_rng))
            g1 = h1 if moved1 else g1
            g2 = h2 if moved2 else g2
            if canonical_key(g1) == canonical_key(g2):
                successes += 1
                actions_taken.append(2 * step)
                break
    return {
        "n": n_moves,
        "pairs": pair_count,
        "successes": successes,
        "success_rate": successes / pair_count,
        "mean_actions": float(np.mean(actions_taken)) if actions_taken else None,
    }


# --- move statistics --------------------------------------------------------------

_UNIFORM_CATEGORIES = tuple(range(1, 9))


def _apply_category(g: Plumbing, category: int, v: int) -> tuple[bool, Plumbing]:
    """Apply one of the eight concrete move kinds at node v (used by the
    uniform baseline, where the attempted kind is known a priori)."""
    if category == 1:
        nbrs = g.adjacency[v]
        if not nbrs:
            return False, g
        return True, blow_up_a(g, (v, nbrs[0]), DEFAULT_A_UP_SIGN)
    if category == 2:
        return True, blow_up_b(g, v, 1)
    if category == 3:
        return True, blow_up_b(g, v, -1)
    if category == 4:
        return True, blow_up_c(g, v, 1)
    if category == 5:
        return True, blow_up_c(g, v, -1)
    kind = {6: "a", 7: "b", 8: "c"}[category]
    if legal_blow_down_kind(g, v) != kind:
        return False, g
    result = blow_down(g, v)
    assert result is not None
    return True, result


def move_stats(
    select_action,
    episodes: int,
    seed: int = 0,
    env_config: EnvConfig = DEFAULT_ENV,
) -> np.ndarray:
    """Fractions of performed actions per move category (sums to 1).

    With a policy, each sampled agent action is counted under its category
    (illegal attempts under the attempted category).  With
    `select_action=None`, the untrained reference is used: node and move
    kind drawn uniformly from the 8 concrete kinds, so every category is
    attempted with probability 1/8 regardless of legality.
    """
    counts = np.zeros(8)
    env_rng = random.Random(derive_seed(seed, "env"))
    act_rng = np.random.default_rng(derive_seed(seed, "act"))
    for _ in range(episodes):
        state = env_reset(env_rng, env_config)
        for _step in range(env_config.max_steps):
            g = state.current
            if select_action is None:
                v = int(act_rng.integers(0, g.n))
                category = int(act_rng.integers(1, 9))
                moved, nxt = _apply_category(g, category, v)
                counts[category - 1] += 1
                steps = state.steps_taken + 1
                if not moved:
                    nxt = g
                state = EnvState(nxt, steps, state.target_f)
                if complexity(nxt) <= state.target_f or steps >= env_config.max_steps:
                    break
            else:
                action = select_action(g, act_rng)
                counts[action_category(g, action) - 1] += 1
                state, _reward, done = env_step(state, action, env_config)
                if done:
                    break
    return counts / counts.sum()


def simplify_with_policy(
    select_action,
    p: Plumbing,
    budget: int,
    seed: int = 0,
) -> tuple[Plumbing, list[RlAction]]:
    """Policy rollout keeping the least complex graph visited.

    Returns that graph and the executed actions leading to it (a replayable
    log; illegal attempts consume budget but are not logged)."""
    rng = np.random.default_rng(derive_seed(seed, "simplify"))
    g = p
    log: list[RlAction] = []
    best = p
    best_len = 0
    for _ in range(budget):
        action = select_action(g, rng)
        moved, nxt = apply_action(g, action)
        if not moved:
            continue
        g = nxt
        log.append(action)
        if complexity(g) < complexity(best):
            best = g
            best_len = len(log)
    return best, log[:best_len]
