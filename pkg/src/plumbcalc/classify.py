"""Graph-pair equivalence classifiers.

A pair model embeds each plumbing into a 32-vector (conv1 -> ReLU -> conv2
-> gated aggregation) and classifies the concatenated pair embedding with an
MLP head into class 0 (inequivalent) / class 1 (equivalent).  Convolution
kinds are any of GEN / GCN / GAT; the named architectures are

    gen+gat   GEN(1,128)  GAT(128,128)  Aggregator(128,32)  head 64->2
    gcn+gat   GCN(1,128)  GAT(128,128)       "                  "
    gcn+gcn   GCN(1,128)  GCN(128,128)       "                  "

Node features are the raw integer weights (one input channel).  Because the
embedding is built from relabeling-equivariant layers and permutation-
invariant pooling, predictions depend only on the isomorphism classes of
the two graphs.  Swapping the pair order changes the head input ordering;
no symmetry of the head is guaranteed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .generate import PairSample, read_pair_file
from .graph import Plumbing
from .nn import autodiff as ad
from .nn.autodiff import ParamStore, Tensor, no_grad
from .nn.layers import GraphBatch, gat_layer, gcn_layer, gen_layer, gated_aggregate, mlp_forward

__all__ = [
    "CONV_KINDS",
    "PairClassifier",
    "TrainConfig",
    "build_model",
    "load_model",
    "train_sl",
    "evaluate",
    "evaluate_samples",
    "write_metrics_csv",
]

CONV_KINDS = ("gen", "gcn", "gat")

CONV_WIDTH = 128
EMBED_DIM = 32
HEAD_DIMS = [64, 32, 2]  # hidden sizes then the 2 output classes


class PairClassifier:
    """Two convolution kinds plus the shared aggregator and head."""

    def __init__(self, conv1: str, conv2: str, seed: int = 0, store: ParamStore | None = None):
        if conv1 not in CONV_KINDS or conv2 not in CONV_KINDS:
            raise ValueError(f"conv kinds must be in {CONV_KINDS}, got {conv1!r}, {conv2!r}")
        self.conv1 = conv1
        self.conv2 = conv2
        self.store = store if store is not None else ParamStore(seed=seed)
        # Materialize all parameters now so checkpoints and copies are
        # complete regardless of which method runs first.
        self._embed(GraphBatch([Plumbing([1]), Plumbing([1])]))

    @property
    def arch(self) -> str:
        return f"{self.conv1}+{self.conv2}"

    def _conv(self, kind: str, name: str, batch: GraphBatch, x: Tensor) -> Tensor:
        if kind == "gen":
            return gen_layer(self.store, name, batch, x, CONV_WIDTH, hidden=CONV_WIDTH)
        if kind == "gcn":
            return gcn_layer(self.store, name, batch, x, CONV_WIDTH)
        return gat_layer(self.store, name, batch, x, CONV_WIDTH)

    def _embed(self, batch: GraphBatch) -> Tensor:
        h = self._conv(self.conv1, "conv1", batch, batch.x)
        h = ad.relu(h)
        h = self._conv(self.conv2, "conv2", batch, h)
        return gated_aggregate(self.store, "aggregate", batch, h, EMBED_DIM)

    def pair_logits(self, lefts: list[Plumbing], rights: list[Plumbing]) -> Tensor:
        """(P, 2) logits for aligned lists of pair sides."""
        if len(lefts) != len(rights):
            raise ValueError("pair sides must align")
        h1 = self._embed(GraphBatch(lefts))
        h2 = self._embed(GraphBatch(rights))
        return mlp_forward(self.store, "head", ad.concat([h1, h2], axis=1), HEAD_DIMS)

    def embed_graph(self, p: Plumbing) -> np.ndarray:
        """32-vector graph embedding (the approximate invariant)."""
        with no_grad():
            return self._embed(GraphBatch([p])).data[0].copy()

    def forward_pair(self, g1: Plumbing, g2: Plumbing) -> np.ndarray:
        with no_grad():
            return self.pair_logits([g1], [g2]).data[0].copy()

    def predict(self, g1: Plumbing, g2: Plumbing) -> int:
        """1 = equivalent, 0 = inequivalent."""
        return int(np.argmax(self.forward_pair(g1, g2)))

    def save(self, path: str) -> None:
        self.store.save(path, {"arch": self.arch, "dims": {"conv": CONV_WIDTH, "embed": EMBED_DIM, "head": HEAD_DIMS}})


def build_model(arch: str, seed: int = 0) -> PairClassifier:
    """`arch` is 'kind+kind', e.g. 'gen+gat'; any of the 9 combinations."""
    parts = arch.lower().split("+")
    if len(parts) != 2:
        raise ValueError(f"arch must look like 'gen+gat', got {arch!r}")
    return PairClassifier(parts[0], parts[1], seed=seed)


def load_model(path: str) -> PairClassifier:
    store, manifest = ParamStore.load(path)
    arch = manifest.get("arch")
    if not arch:
        raise ValueError(f"{path}: checkpoint has no architecture entry")
    parts = arch.split("+")
    return PairClassifier(parts[0], parts[1], store=store)


@dataclass
class TrainConfig:
    epochs: int = 150
    lr: float = 0.001
    batch_size: int = 64
    val_fraction: float = 0.2
    seed: int = 0
    early_stop_acc: float | None = None  # stop once best val accuracy reaches this

    def __post_init__(self) -> None:
        if not (0 < self.val_fraction < 1):
            raise ValueError("val_fraction must be in (0, 1)")


def _labels_to_classes(samples: list[PairSample]) -> np.ndarray:
    # file labels are +-1; class 1 = equivalent, class 0 = inequivalent
    return np.array([1 if s.label == 1 else 0 for s in samples], dtype=np.int64)


def _eval_batches(model: PairClassifier, samples: list[PairSample], batch_size: int) -> tuple[float, float, np.ndarray]:
    """(mean loss, accuracy, confusion counts [tn, fp, fn, tp])."""
    classes = _labels_to_classes(samples)
    losses = []
    preds = np.empty(len(samples), dtype=np.int64)
    with no_grad():
        for lo in range(0, len(samples), batch_size):
            chunk = samples[lo : lo + batch_size]
            logits = model.pair_logits([s.g1 for s in chunk], [s.g2 for s in chunk])
            cls = classes[lo : lo + len(chunk)]
            losses.append(ad.cross_entropy(logits, cls).item() * len(chunk))
            preds[lo : lo + len(chunk)] = logits.data.argmax(axis=1)
    acc = float((preds == classes).mean())
    confusion = np.array(
        [
            int(((preds == 0) & (classes == 0)).sum()),
            int(((preds == 1) & (classes == 0)).sum()),
            int(((preds == 0) & (classes == 1)).sum()),
            int(((preds == 1) & (classes == 1)).sum()),
        ]
    )
    return float(np.sum(losses) / len(samples)), acc, confusion


def train_sl(model: PairClassifier, dataset_path: str, config: TrainConfig) -> list[dict]:
    """Minibatch Adam on cross-entropy with a deterministic 8:2 split.

    Returns the metrics history (one row per epoch and split); the model is
    left holding the parameters of its best validation epoch.
    """
    samples = read_pair_file(dataset_path)
    order = np.arange(len(samples))
    np.random.default_rng(np.random.SeedSequence([config.seed, 0x5B17])).shuffle(order)
    n_val = int(round(len(samples) * config.val_fraction))
    val = [samples[i] for i in order[:n_val]]
    train = [samples[i] for i in order[n_val:]]
    classes = _labels_to_classes(train)
    epoch_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xE60C]))
    history: list[dict] = []
    best_acc = -1.0
    best_state: dict | None = None
    for epoch in range(1, config.epochs + 1):
        perm = epoch_rng.permutation(len(train))
        loss_sum = 0.0
        hit_sum = 0
        for lo in range(0, len(train), config.batch_size):
            idx = perm[lo : lo + config.batch_size]
            chunk = [train[i] for i in idx]
            cls = classes[idx]
            logits = model.pair_logits([s.g1 for s in chunk], [s.g2 for s in chunk])
            loss = ad.cross_entropy(logits, cls)
            model.store.zero_grads()
            loss.backward()
            model.store.adam_step(config.lr)
            loss_sum += loss.item() * len(chunk)
            hit_sum += int((logits.data.argmax(axis=1) == cls).sum())
        train_loss = loss_sum / len(train)
        train_acc = hit_sum / len(train)
        val_loss, val_acc, _ = _eval_batches(model, val, config.batch_size)
        history.append({"epoch": epoch, "split": "train", "loss": train_loss, "accuracy": train_acc})
        history.append({"epoch": epoch, "split": "val", "loss": val_loss, "accuracy": val_acc})
        if val_acc > best_acc:
            best_acc = val_acc
            best_state = model.store.state_copy()
        if config.early_stop_acc is not None and best_acc >= config.early_stop_acc:
            break
    if best_state is not None:
        model.store.load_state(best_state)
    return history


def evaluate_samples(model: PairClassifier, samples: list[PairSample], batch_size: int = 64) -> dict:
    loss, acc, confusion = _eval_batches(model, samples, batch_size)
    tn, fp, fn, tp = (int(v) for v in confusion)
    return {
        "accuracy": acc,
        "mean_loss": loss,
        "count": len(samples),
        "confusion": {"tn": tn, "fp": fp, "fn": fn, "tp": tp},
    }


def evaluate(model: PairClassifier, dataset_path: str, batch_size: int = 64) -> dict:
    return evaluate_samples(model, read_pair_file(dataset_path), batch_size)


def write_metrics_csv(path: str, history: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["epoch", "split", "loss", "accuracy"])
        writer.writeheader()
        for row in history:
            writer.writerow({k: row[k] for k in ("epoch", "split", "loss", "accuracy")})
