"""Minimal deterministic feedforward classifier with hand-coded gradients.

Linear softmax or one hidden rectifier layer, 64-bit floats throughout,
SGD with momentum and weight decay, and a warmup + step learning-rate
schedule. Parameter updates are functional: steps return fresh values.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .priors import ClassPrior

__all__ = [
    "MlpParams",
    "OptimState",
    "LrSchedule",
    "init_params",
    "init_optim_state",
    "forward",
    "softmax_xent",
    "balanced_softmax_xent",
    "oe_prior_xent",
    "backward",
    "sgd_step",
    "lr_at",
    "grad_check",
    "save_params",
    "load_params",
]

CHECKPOINT_MAGIC = b"OSNN1"


@dataclass(frozen=True)
class MlpParams:
    """Weights and biases for a linear or one-hidden-layer rectifier model."""

    layers: tuple
    input_dim: int
    hidden_dim: int
    num_classes: int

    def __post_init__(self):
        if len(self.layers) not in (1, 2):
            raise ValueError("model must be linear or have exactly one hidden layer")
        expect_in = self.input_dim
        for w, b in self.layers:
            if w.shape[0] != expect_in or b.shape != (w.shape[1],):
                raise ValueError("layer shapes do not chain")
            expect_in = w.shape[1]
        if expect_in != self.num_classes:
            raise ValueError("last layer width must equal num_classes")
        if self.hidden_dim != (0 if len(self.layers) == 1 else self.layers[0][0].shape[1]):
            raise ValueError("hidden_dim inconsistent with layer shapes")


@dataclass(frozen=True)
class OptimState:
    """SGD velocity buffers plus the optimizer hyperparameters."""

    velocity: tuple
    momentum: float = 0.9
    weight_decay: float = 2e-4
    base_lr: float = 0.1


@dataclass(frozen=True)
class LrSchedule:
    """Linear warmup then multiplicative decay at each milestone epoch."""

    warmup_epochs: int
    milestones: tuple
    decay_factor: float
    total_epochs: int

    def __post_init__(self):
        if self.total_epochs < 1 or self.warmup_epochs < 0:
            raise ValueError("need total_epochs >= 1 and warmup_epochs >= 0")
        ms = tuple(self.milestones)
        if any(m2 <= m1 for m1, m2 in zip(ms, ms[1:])):
            raise ValueError("milestones must be strictly increasing")
        if ms and ms[0] <= self.warmup_epochs:
            raise ValueError("milestones must come after the warmup")


def init_params(input_dim: int, hidden_dim: int, num_classes: int, rng) -> MlpParams:
    """Seeded init: weights uniform in +-1/sqrt(fan_in), biases zero."""
    rng = np.random.default_rng(rng)
    dims = [input_dim, num_classes] if hidden_dim == 0 else [input_dim, hidden_dim, num_classes]
    layers = []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        layers.append((w, np.zeros(fan_out)))
    return MlpParams(
        layers=tuple(layers),
        input_dim=input_dim,
        hidden_dim=hidden_dim,
        num_classes=num_classes,
    )


def init_optim_state(
    params: MlpParams,
    momentum: float = 0.9,
    weight_decay: float = 2e-4,
    base_lr: float = 0.1,
) -> OptimState:
    vel = tuple((np.zeros_like(w), np.zeros_like(b)) for w, b in params.layers)
    return OptimState(
        velocity=vel, momentum=momentum, weight_decay=weight_decay, base_lr=base_lr
    )


def _check_batch(params: MlpParams, batch: np.ndarray) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != params.input_dim:
        raise ValueError(
            f"batch has shape {batch.shape}, model expects (*, {params.input_dim})"
        )
    return batch


def forward(params: MlpParams, batch) -> np.ndarray:
    """Logits for a batch: affine(relu(affine(x))) or affine(x) when linear."""
    h = _check_batch(params, batch)
    for w, b in params.layers[:-1]:
        h = np.maximum(h @ w + b, 0.0)
    w, b = params.layers[-1]
    return h @ w + b


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def softmax_xent(logits, labels, sample_weights=None):
    """Weighted mean cross entropy and its gradient with respect to the logits.

    loss = mean_b w_b * (-log softmax(logits_b)[y_b]) with w defaulting to 1;
    grad rows are w_b * (softmax_b - onehot_b) / B.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if not np.all(np.isfinite(logits)):
        raise ValueError("non-finite logits")
    batch, k = logits.shape
    if batch == 0:
        raise ValueError("empty batch")
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError("label out of range")
    w = np.ones(batch) if sample_weights is None else np.asarray(sample_weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("sample weights must be non-negative")
    logp = _log_softmax(logits)
    rows = np.arange(batch)
    loss = float(np.mean(w * -logp[rows, labels]))
    grad = np.exp(logp)
    grad[rows, labels] -= 1.0
    grad *= (w / batch)[:, None]
    return loss, grad


def balanced_softmax_xent(logits, labels, prior: ClassPrior):
    """Cross entropy on logits shifted by log class counts.

    The shift models the train-time label prior; with equal counts it cancels
    inside the softmax and the loss reduces to the standard one.
    """
    if np.any(prior.counts == 0):
        raise ValueError("balanced softmax undefined for a zero-count class")
    adjusted = np.asarray(logits, dtype=np.float64) + np.log(prior.counts.astype(np.float64))
    return softmax_xent(adjusted, labels)


def oe_prior_xent(logits, prior):
    """Cross entropy against a fixed reference label distribution.

    loss = mean_b sum_y -P(y) log softmax(logits_b)[y]; used as the outlier
    exposure term with P set to the training label prior.
    """
    logits = np.asarray(logits, dtype=np.float64)
    p = np.asarray(prior, dtype=np.float64)
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"prior sums to {p.sum()}, expected 1")
    if not np.all(np.isfinite(logits)):
        raise ValueError("non-finite logits")
    batch = logits.shape[0]
    if batch == 0:
        raise ValueError("empty batch")
    logp = _log_softmax(logits)
    loss = float(np.mean(-(logp @ p)))
    grad = (np.exp(logp) - p) / batch
    return loss, grad


def backward(params: MlpParams, batch, grad_logits) -> tuple:
    """Exact gradients of the layers given the gradient at the logits.

    The rectifier subgradient at zero is taken as zero.
    """
    x = _check_batch(params, batch)
    grad_logits = np.asarray(grad_logits, dtype=np.float64)
    if grad_logits.shape != (x.shape[0], params.num_classes):
        raise ValueError("grad_logits shape mismatch")
    acts = [x]
    pres = []
    h = x
    for w, b in params.layers[:-1]:
        pre = h @ w + b
        pres.append(pre)
        h = np.maximum(pre, 0.0)
        acts.append(h)
    grads = []
    g = grad_logits
    for i in reversed(range(len(params.layers))):
        w, _ = params.layers[i]
        grads.append((acts[i].T @ g, g.sum(axis=0)))
        if i > 0:
            g = (g @ w.T) * (pres[i - 1] > 0.0)
    return tuple(reversed(grads))


def sgd_step(params: MlpParams, grads, state: OptimState, lr: float):
    """One momentum step: g' = g + wd*theta; v = mu*v + g'; theta -= lr*v."""
    if lr < 0:
        raise ValueError("lr must be non-negative")
    new_layers = []
    new_vel = []
    for (w, b), (gw, gb), (vw, vb) in zip(params.layers, grads, state.velocity):
        vw2 = state.momentum * vw + (gw + state.weight_decay * w)
        vb2 = state.momentum * vb + (gb + state.weight_decay * b)
        new_layers.append((w - lr * vw2, b - lr * vb2))
        new_vel.append((vw2, vb2))
    return replace(params, layers=tuple(new_layers)), replace(state, velocity=tuple(new_vel))


def lr_at(schedule: LrSchedule, epoch: int, base_lr: float = 0.1) -> float:
    """Learning rate at an epoch: linear ramp, then decay at each passed milestone."""
    if not 0 <= epoch < schedule.total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {schedule.total_epochs})")
    if epoch < schedule.warmup_epochs:
        return base_lr * (epoch + 1) / schedule.warmup_epochs
    passed = sum(1 for m in schedule.milestones if epoch >= m)
    return base_lr * schedule.decay_factor ** passed


def grad_check(params: MlpParams, batch, labels, eps: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Per entry: |g_a - g_fd| / max(1e-12, |g_a| + |g_fd|), maximized over all
    parameters, for the mean softmax cross entropy on the batch.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = _check_batch(params, batch)
    labels = np.asarray(labels, dtype=np.int64)

    def loss_for(layers) -> float:
        probe = replace(params, layers=layers)
        return softmax_xent(forward(probe, x), labels)[0]

    _, gl = softmax_xent(forward(params, x), labels)
    analytic = backward(params, x, gl)
    worst = 0.0
    for li in range(len(params.layers)):
        for ti in range(2):
            base = params.layers[li][ti]
            ga = analytic[li][ti]
            it = np.nditer(base, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                bumped = [list(pair) for pair in params.layers]
                plus = base.copy()
                plus[idx] += eps
                bumped[li][ti] = plus
                lp = loss_for(tuple((w, b) for w, b in bumped))
                minus = base.copy()
                minus[idx] -= eps
                bumped[li][ti] = minus
                lm = loss_for(tuple((w, b) for w, b in bumped))
                fd = (lp - lm) / (2.0 * eps)
                err = abs(ga[idx] - fd) / max(1e-12, abs(ga[idx]) + abs(fd))
                worst = max(worst, err)
    return worst


def save_params(params: MlpParams, path) -> None:
    """Write the checkpoint format (magic OSNN1, little-endian, row-major)."""
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<I", len(params.layers)))
        for w, b in params.layers:
            f.write(struct.pack("<II", w.shape[0], w.shape[1]))
            f.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            f.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_params(path) -> MlpParams:
    with open(path, "rb") as f:
        blob = f.read()
    head = len(CHECKPOINT_MAGIC)
    if len(blob) < head + 4 or blob[:head] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    (n_layers,) = struct.unpack_from("<I", blob, head)
    offset = head + 4
    layers = []
    for _ in range(n_layers):
        if len(blob) < offset + 8:
            raise ValueError(f"{path}: truncated checkpoint")
        rows, cols = struct.unpack_from("<II", blob, offset)
        offset += 8
        need = rows * cols * 8 + cols * 8
        if len(blob) < offset + need:
            raise ValueError(f"{path}: truncated checkpoint")
        w = np.frombuffer(blob, dtype="<f8", count=rows * cols, offset=offset).reshape(rows, cols)
        offset += rows * cols * 8
        b = np.frombuffer(blob, dtype="<f8", count=cols, offset=offset)
        offset += cols * 8
        layers.append((w.copy(), b.copy()))
    if len(blob) != offset:
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    if len(layers) not in (1, 2):
        raise ValueError(f"{path}: unsupported layer count {len(layers)}")
    hidden = 0 if len(layers) == 1 else layers[0][0].shape[1]
    return MlpParams(
        layers=tuple(layers),
        input_dim=layers[0][0].shape[0],
        hidden_dim=int(hidden),
        num_classes=int(layers[-1][0].shape[1]),
    )
