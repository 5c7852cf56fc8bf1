"""Graph layers over batched plumbings.

A batch is the disjoint union of graphs: node rows are concatenated, edge
lists are index-shifted, and `node_graph` records which graph each node
belongs to.  All layers are equivariant under vertex relabeling because
they only use neighborhood segment reductions.

Layers:

  gcn_layer        z_i = Theta^T sum_{j in N(i) u {i}} x_j / sqrt(dj*di),
                   with d = 1 + degree (self-loop included).
  gat_layer        single-head attention over the closed neighborhood with
                   LeakyReLU(0.2) scores a^T [Theta x_i || Theta x_j].
  gen_layer        init MLP, then one round of message passing: messages
                   MLP([x_i || x_j]) summed over the open neighborhood,
                   update MLP([x_i || msg_sum]).
  gated_aggregate  per-graph pooling: softmax-gated (over nodes, per
                   channel) weighted sum of transformed node embeddings,
                   then an output map.
"""

from __future__ import annotations

import numpy as np

from ..graph import Plumbing
from . import autodiff as ad
from .autodiff import ParamStore, Segments, Tensor

__all__ = ["GraphBatch", "mlp_forward", "affine", "gcn_layer", "gat_layer", "gen_layer", "gated_aggregate"]


class GraphBatch:
    """Disjoint union of plumbings prepared for the layers.

    x            (N, 1) node features: the raw integer weights.
    open_src/dst directed edges both ways, no self-loops (GEN messages).
    closed_*     directed edges plus self-loops (GCN / GAT neighborhoods).
    deg_hat      (N,) 1 + degree.
    node_graph   (N,) graph index per node, nondecreasing.
    """

    def __init__(self, graphs: list[Plumbing]):
        self.graphs = graphs
        self.n_graphs = len(graphs)
        offsets = []
        total = 0
        for g in graphs:
            offsets.append(total)
            total += g.n
        self.n_nodes = total
        feats = np.empty((total, 1))
        node_graph = np.empty(total, dtype=np.int64)
        src_parts: list[np.ndarray] = []
        dst_parts: list[np.ndarray] = []
        deg = np.zeros(total)
        for gi, (g, off) in enumerate(zip(graphs, offsets)):
            feats[off : off + g.n, 0] = g.weights
            node_graph[off : off + g.n] = gi
            if g.edges:
                e = np.asarray(g.edges, dtype=np.int64) + off
                src_parts.append(np.concatenate([e[:, 0], e[:, 1]]))
                dst_parts.append(np.concatenate([e[:, 1], e[:, 0]]))
                np.add.at(deg, e[:, 0], 1.0)
                np.add.at(deg, e[:, 1], 1.0)
        if src_parts:
            open_src = np.concatenate(src_parts)
            open_dst = np.concatenate(dst_parts)
        else:
            open_src = np.empty(0, dtype=np.int64)
            open_dst = np.empty(0, dtype=np.int64)
        loops = np.arange(total, dtype=np.int64)
        closed_src = np.concatenate([open_src, loops])
        closed_dst = np.concatenate([open_dst, loops])
        self.x = Tensor(feats)
        self.deg_hat = deg + 1.0
        self.node_graph = node_graph
        self.open_src = Segments(open_src, total)
        self.open_dst = Segments(open_dst, total)
        self.closed_src = Segments(closed_src, total)
        self.closed_dst = Segments(closed_dst, total)
        self.graph_seg = Segments(node_graph, self.n_graphs)
        # GCN normalization per closed edge: 1/sqrt(d_src * d_dst)
        self._gcn_coeff = Tensor(
            (1.0 / np.sqrt(self.deg_hat[closed_src] * self.deg_hat[closed_dst]))[:, None]
        )


def affine(store: ParamStore, name: str, x: Tensor, out_dim: int) -> Tensor:
    w = store.dense(f"{name}.w", (x.shape[-1], out_dim))
    b = store.dense(f"{name}.b", (out_dim,), init="zeros")
    return ad.add(ad.matmul(x, w), b)


def mlp_forward(store: ParamStore, name: str, x: Tensor, dims: list[int]) -> Tensor:
    """Affine layers of the given output dims, ReLU between, bare last layer."""
    h = x
    for k, dim in enumerate(dims):
        h = affine(store, f"{name}.{k}", h, dim)
        if k < len(dims) - 1:
            h = ad.relu(h)
    return h


def gcn_layer(store: ParamStore, name: str, batch: GraphBatch, x: Tensor, out_dim: int) -> Tensor:
    theta = store.dense(f"{name}.theta", (x.shape[-1], out_dim))
    gathered = ad.mul(ad.gather_rows(x, batch.closed_src), batch._gcn_coeff)
    pooled = ad.segment_sum(gathered, batch.closed_dst)
    return ad.matmul(pooled, theta)


def gat_layer(store: ParamStore, name: str, batch: GraphBatch, x: Tensor, out_dim: int) -> Tensor:
    theta = store.dense(f"{name}.theta", (x.shape[-1], out_dim))
    a_self = store.dense(f"{name}.a_self", (out_dim, 1))
    a_nbr = store.dense(f"{name}.a_nbr", (out_dim, 1))
    h = ad.matmul(x, theta)
    score_self = ad.matmul(h, a_self)  # contribution of the receiving node i
    score_nbr = ad.matmul(h, a_nbr)  # contribution of the sending node j
    e = ad.leaky_relu(
        ad.add(
            ad.gather_rows(score_self, batch.closed_dst),
            ad.gather_rows(score_nbr, batch.closed_src),
        ),
        slope=0.2,
    )
    alpha = ad.segment_softmax(e, batch.closed_dst)
    weighted = ad.mul(alpha, ad.gather_rows(h, batch.closed_src))
    return ad.segment_sum(weighted, batch.closed_dst)


def gen_layer(
    store: ParamStore,
    name: str,
    batch: GraphBatch,
    x: Tensor,
    out_dim: int,
    hidden: int = 128,
) -> Tensor:
    x1 = mlp_forward(store, f"{name}.init", x, [hidden, out_dim])
    pair = ad.concat(
        [ad.gather_rows(x1, batch.open_dst), ad.gather_rows(x1, batch.open_src)], axis=1
    )
    messages = mlp_forward(store, f"{name}.msg", pair, [hidden, out_dim])
    msg_sum = ad.segment_sum(messages, batch.open_dst)
    return mlp_forward(store, f"{name}.upd", ad.concat([x1, msg_sum], axis=1), [hidden, out_dim])


def gated_aggregate(
    store: ParamStore, name: str, batch: GraphBatch, x: Tensor, out_dim: int = 32
) -> Tensor:
    """Node-to-graph pooling: gate logits are softmaxed across each graph's
    nodes independently per channel, so the pooled vector is a weighted
    average and graph size does not change its scale."""
    gates = affine(store, f"{name}.gate", x, out_dim)
    transformed = affine(store, f"{name}.transform", x, out_dim)
    weights = ad.segment_softmax(gates, batch.graph_seg)
    pooled = ad.segment_sum(ad.mul(weights, transformed), batch.graph_seg)
    return affine(store, f"{name}.out", pooled, out_dim)
