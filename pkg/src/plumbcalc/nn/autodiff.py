"""Dense float64 tensors with reverse-mode differentiation.

A deliberately small tape-based engine: each op records its parents and a
closure that accumulates gradients into them.  Graphs here are a few hundred
nodes with feature widths up to 128, so dense numpy arrays plus constant
sparse incidence operators (scipy CSR) cover everything; there are no
learned sparse kernels.

Segment ops (sum / softmax over groups of rows) are the graph-specific
primitives: neighborhoods, per-graph pooling and per-graph action softmax
are all segment reductions over row-index groups.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from typing import Callable, Iterable

import numpy as np
from scipy import sparse

__all__ = [
    "Tensor",
    "Segments",
    "ParamStore",
    "no_grad",
    "constant",
    "add",
    "sub",
    "mul",
    "scale",
    "matmul",
    "relu",
    "leaky_relu",
    "log",
    "reshape",
    "concat",
    "gather_rows",
    "segment_sum",
    "segment_softmax",
    "softmax",
    "sum_all",
    "sum_nodes",
    "mean_nodes",
    "cross_entropy",
    "grad_check",
]

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable tape recording (forward-only evaluation)."""
    global _grad_enabled
    saved = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = saved


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_backward", "_parents", "_grad_owned")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._backward: Callable[[], None] | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._grad_owned = False

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def _accumulate(self, g: np.ndarray) -> None:
        # First contribution is borrowed (possibly a view of another grad);
        # borrowed arrays are never mutated in place, so sharing is safe.
        if self.grad is None:
            self.grad = g
            self._grad_owned = False
        elif not self._grad_owned:
            self.grad = self.grad + g
            self._grad_owned = True
        else:
            self.grad += g

    def backward(self) -> None:
        """Reverse pass from a scalar output."""
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar tensor")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        self._grad_owned = True
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def constant(data) -> Tensor:
    return Tensor(data)


def _make(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(p for p in parents if p.requires_grad)
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `g` down to `shape` (inverse of numpy broadcasting)."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def add(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data + b.data

    def backward():
        if a.requires_grad:
            a._accumulate(_unbroadcast(out.grad, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(out.grad, b.data.shape))

    out = _make(out_data, (a, b), backward)
    return out


def sub(a: Tensor, b: Tensor) -> Tensor:
    return add(a, scale(b, -1.0))


def mul(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data * b.data

    def backward():
        if a.requires_grad:
            a._accumulate(_unbroadcast(out.grad * b.data, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(out.grad * a.data, b.data.shape))

    out = _make(out_data, (a, b), backward)
    return out


def scale(a: Tensor, c: float) -> Tensor:
    out_data = a.data * c

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad * c)

    out = _make(out_data, (a,), backward)
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data @ b.data

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ out.grad)

    out = _make(out_data, (a, b), backward)
    return out


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    out_data = np.where(mask, a.data, 0.0)

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad * mask)

    out = _make(out_data, (a,), backward)
    return out


def leaky_relu(a: Tensor, slope: float = 0.2) -> Tensor:
    mask = a.data > 0
    out_data = np.where(mask, a.data, slope * a.data)

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad * np.where(mask, 1.0, slope))

    out = _make(out_data, (a,), backward)
    return out


def log(a: Tensor) -> Tensor:
    out_data = np.log(a.data)

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad / a.data)

    out = _make(out_data, (a,), backward)
    return out


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    out_data = a.data.reshape(shape)

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad.reshape(a.data.shape))

    out = _make(out_data, (a,), backward)
    return out


def concat(tensors: list[Tensor], axis: int = 0) -> Tensor:
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward():
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                index = [slice(None)] * out.grad.ndim
                index[axis] = slice(lo, hi)
                t._accumulate(out.grad[tuple(index)])

    out = _make(out_data, tuple(tensors), backward)
    return out


class Segments:
    """Grouping of rows by integer ids in [0, n); the constant incidence
    operator used by segment reductions.  `matrix` is the (n x len(ids)) CSR
    summing rows by group, which is also the exact adjoint of row gathering.
    """

    __slots__ = ("ids", "n", "matrix", "counts")

    def __init__(self, ids, n: int):
        self.ids = np.asarray(ids, dtype=np.int64)
        self.n = int(n)
        e = len(self.ids)
        self.matrix = sparse.csr_matrix(
            (np.ones(e), (self.ids, np.arange(e))), shape=(self.n, e)
        )
        self.counts = np.bincount(self.ids, minlength=self.n).astype(np.float64)


def gather_rows(a: Tensor, seg: Segments) -> Tensor:
    """Rows of `a` indexed by seg.ids; backward scatter-adds into `a`."""
    out_data = a.data[seg.ids]

    def backward():
        if a.requires_grad:
            a._accumulate(seg.matrix @ out.grad)

    out = _make(out_data, (a,), backward)
    return out


def segment_sum(a: Tensor, seg: Segments) -> Tensor:
    """Sum rows of `a` into their groups; empty groups give zero rows."""
    out_data = seg.matrix @ a.data

    def backward():
        if a.requires_grad:
            a._accumulate(out.grad[seg.ids])

    out = _make(out_data, (a,), backward)
    return out


def segment_softmax(a: Tensor, seg: Segments) -> Tensor:
    """Column-wise softmax within each row group of `a` (rows grouped by
    seg.ids); every group's entries are positive and sum to one."""
    seg_max = np.full((seg.n,) + a.data.shape[1:], -np.inf)
    np.maximum.at(seg_max, seg.ids, a.data)
    z = np.exp(a.data - seg_max[seg.ids])
    denom = seg.matrix @ z
    out_data = z / denom[seg.ids]

    def backward():
        if a.requires_grad:
            weighted = out_data * out.grad
            correction = (seg.matrix @ weighted)[seg.ids]
            a._accumulate(weighted - out_data * correction)

    out = _make(out_data, (a,), backward)
    return out


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    z = np.exp(shifted)
    out_data = z / z.sum(axis=axis, keepdims=True)

    def backward():
        if a.requires_grad:
            weighted = out_data * out.grad
            correction = weighted.sum(axis=axis, keepdims=True)
            a._accumulate(weighted - out_data * correction)

    out = _make(out_data, (a,), backward)
    return out


def sum_all(a: Tensor) -> Tensor:
    out_data = np.asarray(a.data.sum())

    def backward():
        if a.requires_grad:
            a._accumulate(np.broadcast_to(out.grad, a.data.shape))

    out = _make(out_data, (a,), backward)
    return out


def sum_nodes(a: Tensor) -> Tensor:
    """Sum over the row axis, keeping feature columns."""
    out_data = a.data.sum(axis=0)

    def backward():
        if a.requires_grad:
            a._accumulate(np.broadcast_to(out.grad, a.data.shape))

    out = _make(out_data, (a,), backward)
    return out


def mean_nodes(a: Tensor) -> Tensor:
    n = a.data.shape[0]
    return scale(sum_nodes(a), 1.0 / n)


def cross_entropy(logits: Tensor, classes) -> Tensor:
    """Mean negative log softmax probability of the true classes.

    `logits` is (k,) for a single sample or (B, k) for a batch; `classes`
    is an int or an int array.  Gradient is (softmax - onehot) / B.
    """
    data = logits.data
    single = data.ndim == 1
    if single:
        data = data[None, :]
    cls = np.atleast_1d(np.asarray(classes, dtype=np.int64))
    batch = data.shape[0]
    shifted = data - data.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    logprobs = shifted - logsumexp
    out_data = np.asarray(-logprobs[np.arange(batch), cls].mean())

    def backward():
        if logits.requires_grad:
            g = np.exp(logprobs)
            g[np.arange(batch), cls] -= 1.0
            g *= out.grad / batch
            logits._accumulate(g[0] if single else g)

    out = _make(out_data, (logits,), backward)
    return out


class ParamStore:
    """Named parameter tensors with Adam state.

    Parameters are created on first use (matrices Glorot-uniform, anything
    named `*.b` or requested as zeros starts at zero) from the store's own
    seeded generator, so two stores built by the same model code with the
    same seed hold identical values.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)
        self.params: dict[str, Tensor] = {}
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self.step_count = 0

    def dense(self, name: str, shape: tuple[int, ...], init: str = "glorot") -> Tensor:
        if name not in self.params:
            if init == "zeros":
                data = np.zeros(shape)
            elif init == "glorot":
                fan_in = shape[0] if len(shape) > 1 else shape[0]
                fan_out = shape[-1]
                limit = np.sqrt(6.0 / (fan_in + fan_out))
                data = self.rng.uniform(-limit, limit, size=shape)
            else:
                raise ValueError(f"unknown init {init!r}")
            t = Tensor(data, requires_grad=True)
            self.params[name] = t
            self._m[name] = np.zeros(shape)
            self._v[name] = np.zeros(shape)
        else:
            if self.params[name].data.shape != tuple(shape):
                raise ValueError(
                    f"parameter {name!r} exists with shape "
                    f"{self.params[name].data.shape}, requested {shape}"
                )
        return self.params[name]

    def zero_grads(self) -> None:
        for t in self.params.values():
            t.grad = None

    def grad_norm(self, prefix: str = "") -> float:
        total = 0.0
        for name, t in self.params.items():
            if t.grad is not None and name.startswith(prefix):
                total += float((t.grad * t.grad).sum())
        return float(np.sqrt(total))

    def clip_group(self, prefix: str, max_norm: float) -> None:
        """Scale the gradients of parameters under `prefix` so the group's
        global norm is at most max_norm."""
        norm = self.grad_norm(prefix)
        if norm > max_norm:
            c = max_norm / norm
            for name, t in self.params.items():
                if t.grad is not None and name.startswith(prefix):
                    t.grad = t.grad * c

    def adam_step(
        self,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        max_grad_norm: float | None = None,
    ) -> None:
        """Bias-corrected Adam on every parameter with a gradient; clears
        gradients afterwards.  Parameters without gradients are untouched."""
        clip = 1.0
        if max_grad_norm is not None:
            norm = self.grad_norm()
            if norm > max_grad_norm:
                clip = max_grad_norm / norm
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - beta1**t
        bc2 = 1.0 - beta2**t
        for name, p in self.params.items():
            if p.grad is None:
                continue
            g = p.grad if clip == 1.0 else p.grad * clip
            m = self._m[name]
            v = self._v[name]
            m *= beta1
            m += (1 - beta1) * g
            v *= beta2
            v += (1 - beta2) * g * g
            p.data -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
            p.grad = None

    # -- state -----------------------------------------------------------

    def state_copy(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.params.items()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for k, arr in state.items():
            if k in self.params:
                self.params[k].data = np.array(arr, dtype=np.float64, copy=True)
            else:
                self.params[k] = Tensor(np.array(arr, dtype=np.float64), requires_grad=True)
                self._m[k] = np.zeros(arr.shape)
                self._v[k] = np.zeros(arr.shape)

    def save(self, path: str, manifest_extra: dict | None = None) -> None:
        """One file: a JSON manifest line, then the raw little-endian
        float64 bytes of every parameter in manifest order."""
        entries = []
        offset = 0
        for name, p in self.params.items():
            size = int(p.data.size)
            entries.append(
                {"name": name, "shape": list(p.data.shape), "offset": offset, "size": size}
            )
            offset += size * 8
        manifest = {
            "format": "plumbcalc-checkpoint-v1",
            "seed": self.seed,
            "step": self.step_count,
            "params": entries,
        }
        if manifest_extra:
            manifest.update(manifest_extra)
        with open(path, "wb") as fh:
            fh.write(json.dumps(manifest, sort_keys=True).encode("utf-8") + b"\n")
            for p in self.params.values():
                fh.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str) -> tuple["ParamStore", dict]:
        with open(path, "rb") as fh:
            manifest = json.loads(fh.readline().decode("utf-8"))
            blob = fh.read()
        if manifest.get("format") != "plumbcalc-checkpoint-v1":
            raise ValueError(f"{path}: not a plumbcalc checkpoint")
        store = cls(seed=manifest.get("seed", 0))
        store.step_count = manifest.get("step", 0)
        for entry in manifest["params"]:
            name, shape, offset = entry["name"], tuple(entry["shape"]), entry["offset"]
            size = entry["size"]
            arr = np.frombuffer(blob, dtype="<f8", count=size, offset=offset).reshape(shape)
            store.params[name] = Tensor(arr.astype(np.float64), requires_grad=True)
            store._m[name] = np.zeros(shape)
            store._v[name] = np.zeros(shape)
        return store, manifest


def grad_check(
    loss_fn: Callable[[], Tensor],
    store: ParamStore,
    step: float = 1e-5,
    names: Iterable[str] | None = None,
    max_entries_per_param: int | None = None,
    entry_rng: np.random.Generator | None = None,
) -> dict:
    """Compare reverse-mode gradients with central finite differences.

    Calls `loss_fn` once with the tape on, then twice per checked entry with
    the entry perturbed by +-step.  Relative error is |ad - fd| scaled by
    max(|ad|, |fd|, 1).  Every entry of every parameter is checked unless
    `max_entries_per_param` caps the (seeded) sample per tensor.

    Returns {"max_rel_err": float, "per_param": {name: err}}.
    """
    store.zero_grads()
    loss = loss_fn()
    loss.backward()
    analytic = {
        k: (t.grad.copy() if t.grad is not None else np.zeros_like(t.data))
        for k, t in store.params.items()
    }
    store.zero_grads()
    per_param: dict[str, float] = {}
    check_names = list(names) if names is not None else list(store.params)
    for name in check_names:
        p = store.params[name]
        flat = p.data.reshape(-1)
        size = flat.size
        if max_entries_per_param is not None and size > max_entries_per_param:
            rng = entry_rng or np.random.default_rng(0)
            idxs = rng.choice(size, size=max_entries_per_param, replace=False)
        else:
            idxs = np.arange(size)
        worst = 0.0
        ana_flat = analytic[name].reshape(-1)
        with no_grad():
            for i in idxs:
                orig = flat[i]
                flat[i] = orig + step
                hi = loss_fn().item()
                flat[i] = orig - step
                lo = loss_fn().item()
                flat[i] = orig
                fd = (hi - lo) / (2 * step)
                ad = ana_flat[i]
                err = abs(ad - fd) / max(abs(ad), abs(fd), 1.0)
                if err > worst:
                    worst = err
        per_param[name] = worst
    return {"max_rel_err": max(per_param.values()) if per_param else 0.0, "per_param": per_param}
