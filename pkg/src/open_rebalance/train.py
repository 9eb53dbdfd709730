"""Training loops: auxiliary-relabeling regularization and baseline methods.

Each iteration pairs a training minibatch with an auxiliary minibatch drawn
uniformly from the open-set pool; auxiliary labels are resampled from the
configured label distribution every iteration unless fixed for the run.
Three independent RNG streams (shuffling, auxiliary draws, initialization)
keep ablations bit-comparable: changing one knob touches exactly one stream.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import metrics
from .data import AuxiliaryPool, LabeledDataset
from .nn import (
    LrSchedule,
    MlpParams,
    OptimState,
    backward,
    balanced_softmax_xent,
    forward,
    init_optim_state,
    init_params,
    lr_at,
    oe_prior_xent,
    sgd_step,
    softmax_xent,
)
from .priors import (
    ClassPrior,
    ClassWeights,
    LabelDistributionKind,
    cb_effective_weights,
    label_distribution,
)

__all__ = [
    "METHODS",
    "TrainConfig",
    "EpochRecord",
    "RunResult",
    "default_schedule",
    "sample_aux_labels",
    "open_sampling_step",
    "train_run",
]

METHODS = (
    "standard",
    "open-sampling",
    "cb-rw",
    "balanced-softmax",
    "oe",
    "balanced-softmax+open-sampling",
)
_AUX_METHODS = frozenset({"open-sampling", "oe", "balanced-softmax+open-sampling"})
_RELABEL_METHODS = frozenset({"open-sampling", "balanced-softmax+open-sampling"})

_STREAM_SHUFFLE = 0
_STREAM_AUX = 1
_STREAM_INIT = 2


@dataclass(frozen=True)
class TrainConfig:
    """One training run's knobs; validated up front."""

    method: str = "open-sampling"
    eta: float = 1.5
    alpha: float | None = None
    label_dist: LabelDistributionKind | None = None
    use_class_weights: bool = True
    fixed_labels: bool = False
    beta_cb: float = 0.9999
    epochs: int = 40
    batch_train: int = 32
    batch_aux: int | None = None
    hidden_dim: int = 16
    seed: int = 0
    base_lr: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 2e-4
    schedule: LrSchedule | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.epochs < 0 or self.batch_train < 1:
            raise ValueError("need epochs >= 0 and batch_train >= 1")
        if self.batch_aux is not None and self.batch_aux < 1:
            raise ValueError("batch_aux must be at least 1")
        if not 0.0 <= self.beta_cb < 1.0:
            raise ValueError("beta_cb must lie in [0, 1)")
        if self.hidden_dim < 0 or self.base_lr < 0 or self.weight_decay < 0:
            raise ValueError("hidden_dim, base_lr, weight_decay must be non-negative")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        relabels = self.method in _RELABEL_METHODS
        if self.fixed_labels and not relabels:
            raise ValueError(f"fixed_labels has no effect for method {self.method!r}")
        if self.label_dist is not None and not relabels:
            raise ValueError(f"label_dist has no effect for method {self.method!r}")
        if self.alpha is not None and not relabels:
            raise ValueError(f"alpha has no effect for method {self.method!r}")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    lr: float
    train_loss: float
    base_loss: float
    aux_loss: float
    test_overall_acc: float
    test_per_class_acc: tuple


@dataclass(frozen=True)
class RunResult:
    final_params: MlpParams
    history: tuple
    config: TrainConfig
    wall_time: float


def default_schedule(total_epochs: int) -> LrSchedule:
    """Warmup for 5 epochs then decay by 0.01 at 80% and 90% of the run."""
    if total_epochs < 10:
        return LrSchedule(
            warmup_epochs=0,
            milestones=(),
            decay_factor=0.01,
            total_epochs=max(total_epochs, 1),
        )
    return LrSchedule(
        warmup_epochs=5,
        milestones=(int(0.8 * total_epochs), int(0.9 * total_epochs)),
        decay_factor=0.01,
        total_epochs=total_epochs,
    )


def sample_aux_labels(dist, m: int, rng: np.random.Generator) -> np.ndarray:
    """m i.i.d. label draws from the distribution via inverse-CDF sampling."""
    gammas = np.asarray(getattr(dist, "gammas", dist), dtype=np.float64)
    if m < 1:
        raise ValueError("m must be at least 1")
    cdf = np.cumsum(gammas)
    u = rng.random(m)
    labels = np.searchsorted(cdf, u, side="right")
    return np.minimum(labels, gammas.shape[0] - 1).astype(np.int64)


@dataclass(frozen=True)
class StepLosses:
    base: float
    aux: float
    total: float


def _combine(base_grads, aux_grads, eta: float):
    # eta == 0 must reproduce the base update bit-exactly, so skip the add.
    if eta == 0.0:
        return base_grads
    return tuple(
        (gw + eta * aw, gb + eta * ab)
        for (gw, gb), (aw, ab) in zip(base_grads, aux_grads)
    )


def open_sampling_step(
    params: MlpParams,
    train_x,
    train_y,
    aux_x,
    dist,
    weights: ClassWeights,
    eta: float,
    state: OptimState,
    lr: float,
    rng: np.random.Generator | None = None,
    aux_labels=None,
):
    """One update on the combined objective: CE(train) + eta * weighted CE(aux).

    Auxiliary labels are drawn fresh from ``dist`` unless ``aux_labels`` pins
    them (the fixed-label variant). Returns (params, state, StepLosses).
    """
    train_x = np.asarray(train_x, dtype=np.float64)
    aux_x = np.asarray(aux_x, dtype=np.float64)
    if train_x.shape[0] == 0 or aux_x.shape[0] == 0:
        raise ValueError("empty batch")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if aux_labels is None:
        if rng is None:
            raise ValueError("need an rng to draw auxiliary labels")
        aux_labels = sample_aux_labels(dist, aux_x.shape[0], rng)
    else:
        aux_labels = np.asarray(aux_labels, dtype=np.int64)
    base_loss, gl = softmax_xent(forward(params, train_x), train_y)
    base_grads = backward(params, train_x, gl)
    w = weights.omegas[aux_labels]
    aux_loss, agl = softmax_xent(forward(params, aux_x), aux_labels, sample_weights=w)
    aux_grads = backward(params, aux_x, agl)
    new_params, new_state = sgd_step(params, _combine(base_grads, aux_grads, eta), state, lr)
    return new_params, new_state, StepLosses(base_loss, aux_loss, base_loss + eta * aux_loss)


def _resolve_relabeling(config: TrainConfig, prior: ClassPrior):
    kind = config.label_dist
    if kind is None:
        kind = LabelDistributionKind.complementary(config.alpha)
    gammas = label_distribution(kind, prior)
    if config.use_class_weights:
        omegas = gammas * prior.num_classes
    else:
        omegas = np.ones(prior.num_classes)
    return gammas, ClassWeights(omegas=omegas)


def train_run(
    config: TrainConfig,
    train: LabeledDataset,
    test: LabeledDataset,
    aux: AuxiliaryPool | None = None,
) -> RunResult:
    """Run the configured method; deterministic given the config seed."""
    t0 = time.perf_counter()
    if test.num_classes != train.num_classes:
        raise ValueError("train and test disagree on the number of classes")
    needs_aux = config.method in _AUX_METHODS
    if needs_aux and aux is None:
        raise ValueError(f"method {config.method!r} requires an auxiliary pool")
    if aux is not None and aux.dim != train.dim:
        raise ValueError("auxiliary pool dimension does not match the training set")

    prior = train.prior()
    k = train.num_classes
    schedule = config.schedule or default_schedule(config.epochs)
    shuffle_rng = np.random.default_rng([config.seed, _STREAM_SHUFFLE])
    aux_rng = np.random.default_rng([config.seed, _STREAM_AUX])
    init_rng = np.random.default_rng([config.seed, _STREAM_INIT])

    params = init_params(train.dim, config.hidden_dim, k, init_rng)
    state = init_optim_state(params, config.momentum, config.weight_decay, config.base_lr)

    relabels = config.method in _RELABEL_METHODS
    gammas = weights = pool_labels = None
    if relabels:
        gammas, weights = _resolve_relabeling(config, prior)
        if config.fixed_labels:
            pool_labels = sample_aux_labels(gammas, len(aux), aux_rng)
    balanced_base = config.method in ("balanced-softmax", "balanced-softmax+open-sampling")
    cb_omegas = None
    if config.method == "cb-rw":
        cb_omegas = cb_effective_weights(prior, config.beta_cb).omegas
    oe_reference = prior.betas if config.method == "oe" else None

    n = len(train)
    m_aux = config.batch_aux or config.batch_train
    history = []
    for epoch in range(config.epochs):
        lr = lr_at(schedule, epoch, config.base_lr)
        perm = shuffle_rng.permutation(n)
        sums = np.zeros(3)
        n_batches = 0
        for start in range(0, n, config.batch_train):
            idx = perm[start : start + config.batch_train]
            bx = train.features[idx]
            by = train.labels[idx]
            if balanced_base:
                base_loss, gl = balanced_softmax_xent(forward(params, bx), by, prior)
            elif cb_omegas is not None:
                base_loss, gl = softmax_xent(
                    forward(params, bx), by, sample_weights=cb_omegas[by]
                )
            else:
                base_loss, gl = softmax_xent(forward(params, bx), by)
            grads = backward(params, bx, gl)

            aux_loss = 0.0
            if needs_aux:
                aidx = aux_rng.integers(0, len(aux), size=m_aux)
                ax = aux.features[aidx]
                if relabels:
                    if pool_labels is not None:
                        ay = pool_labels[aidx]
                    else:
                        ay = sample_aux_labels(gammas, m_aux, aux_rng)
                    aux_loss, agl = softmax_xent(
                        forward(params, ax), ay, sample_weights=weights.omegas[ay]
                    )
                else:
                    aux_loss, agl = oe_prior_xent(forward(params, ax), oe_reference)
                grads = _combine(grads, backward(params, ax, agl), config.eta)

            params, state = sgd_step(params, grads, state, lr)
            total = base_loss + config.eta * aux_loss if needs_aux else base_loss
            sums += (total, base_loss, aux_loss)
            n_batches += 1

        report = metrics.accuracy(params, test)
        history.append(
            EpochRecord(
                epoch=epoch,
                lr=lr,
                train_loss=float(sums[0] / n_batches),
                base_loss=float(sums[1] / n_batches),
                aux_loss=float(sums[2] / n_batches),
                test_overall_acc=report.overall_acc,
                test_per_class_acc=tuple(report.per_class_acc.tolist()),
            )
        )

    return RunResult(
        final_params=params,
        history=tuple(history),
        config=config,
        wall_time=time.perf_counter() - t0,
    )
