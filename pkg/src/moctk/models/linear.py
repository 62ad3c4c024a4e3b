"""Multinomial linear classifier trained with cross-entropy or alpha-weighted focal loss."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from ..core import LABELS, DataError, Label, MocError

N_CLASSES = len(LABELS)
FOCAL_GAMMA = 2.0


class DomainError(DataError):
    pass


class TrainingDiverged(MocError):
    pass


def focal_loss(p: float, a_t: float = 1.0, gamma: float = FOCAL_GAMMA) -> float:
    """``-a_t * (1 - p)**gamma * ln(p)`` for the true-class probability ``p``."""
    if not p > 0:
        raise DomainError(f"true-class probability must be > 0, got {p}")
    if p > 1:
        raise DomainError(f"true-class probability must be <= 1, got {p}")
    return -a_t * (1.0 - p) ** gamma * math.log(p)


def focal_alpha(class_freq: Sequence[float]) -> np.ndarray:
    """Per-class weights ``sqrt(1 / p_t)`` from training class frequencies (0 for absent classes)."""
    freq = np.asarray(class_freq, dtype=float)
    out = np.zeros_like(freq)
    present = freq > 0
    out[present] = np.sqrt(1.0 / freq[present])
    return out


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class LossSpec:
    kind: str = "cross_entropy"  # or "focal"
    gamma: float = FOCAL_GAMMA
    alpha: tuple[float, ...] | None = None  # per-class weights; None means all ones

    def __post_init__(self):
        if self.kind not in ("cross_entropy", "focal"):
            raise ValueError(f"unknown loss {self.kind!r}")


def per_example_loss(probs: np.ndarray, y: np.ndarray, spec: LossSpec) -> tuple[np.ndarray, np.ndarray]:
    """Loss per example and its gradient with respect to the logits."""
    n, k = probs.shape
    p = np.clip(probs[np.arange(n), y], 1e-300, 1.0)
    a = np.ones(n) if spec.alpha is None else np.asarray(spec.alpha, dtype=float)[y]
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), y] = 1.0
    if spec.kind == "cross_entropy":
        loss = -a * np.log(p)
        coef = -a
    else:
        g = spec.gamma
        one_minus = 1.0 - p
        loss = -a * one_minus**g * np.log(p)
        if g == 0:
            coef = -a
        else:
            # dL/dz_j = a[g (1-p)^(g-1) p ln p - (1-p)^g] (onehot_j - s_j)
            with np.errstate(divide="ignore", invalid="ignore"):
                lead = np.where(one_minus > 0, g * one_minus ** (g - 1) * p * np.log(p), 0.0)
            coef = a * (lead - one_minus**g)
    grad = coef[:, None] * (onehot - probs)
    return loss, grad


@dataclass
class LinearModel:
    weights: np.ndarray  # classes x features
    bias: np.ndarray
    loss: LossSpec = field(default_factory=LossSpec)

    def logits(self, X) -> np.ndarray:
        return np.asarray(X @ self.weights.T) + self.bias

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.logits(X))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.logits(X), axis=1)


def objective(W: np.ndarray, b: np.ndarray, X, y: np.ndarray, spec: LossSpec, l2: float):
    """Mean loss plus ``l2/2 * ||W||^2`` and its gradients (dW, db)."""
    probs = softmax(np.asarray(X @ W.T) + b)
    loss, gz = per_example_loss(probs, y, spec)
    n = len(y)
    value = loss.mean() + 0.5 * l2 * float((W * W).sum())
    dW = np.asarray(X.T @ gz).T / n + l2 * W
    db = gz.sum(axis=0) / n
    return value, dW, db


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 60
    batch_size: int = 128
    learning_rate: float = 0.05
    l2: float = 1e-4
    seed: int = 0


def fit_linear(
    X,
    y: Sequence[int],
    loss: LossSpec | str = "cross_entropy",
    config: TrainConfig = TrainConfig(),
    n_classes: int = N_CLASSES,
) -> LinearModel:
    """Mini-batch gradient descent with Adam step sizes; deterministic per seed.

    ``loss="focal"`` uses gamma=2 and ``sqrt(1/p_t)`` class weights taken from
    the label frequencies of ``y``.
    """
    y = np.asarray(y, dtype=int)
    if sparse.issparse(X):
        X = sparse.csr_matrix(X)
    else:
        X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n != len(y):
        raise DataError(f"{n} feature rows for {len(y)} labels")
    if isinstance(loss, str):
        loss = make_loss(loss, y, n_classes)
    rng = np.random.default_rng(config.seed)
    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)
    if n == 0:
        return LinearModel(W, b, loss)
    mW, vW = np.zeros_like(W), np.zeros_like(W)
    mb, vb = np.zeros_like(b), np.zeros_like(b)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            value, dW, db = objective(W, b, X[idx], y[idx], loss, config.l2)
            if not math.isfinite(value):
                raise TrainingDiverged(f"non-finite loss after {step} steps")
            step += 1
            mW = beta1 * mW + (1 - beta1) * dW
            vW = beta2 * vW + (1 - beta2) * dW * dW
            mb = beta1 * mb + (1 - beta1) * db
            vb = beta2 * vb + (1 - beta2) * db * db
            c1, c2 = 1 - beta1**step, 1 - beta2**step
            W -= config.learning_rate * (mW / c1) / (np.sqrt(vW / c2) + eps)
            b -= config.learning_rate * (mb / c1) / (np.sqrt(vb / c2) + eps)
    if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
        raise TrainingDiverged("non-finite weights after training")
    return LinearModel(W, b, loss)


def make_loss(kind: str, y: Sequence[int], n_classes: int = N_CLASSES, gamma: float = FOCAL_GAMMA) -> LossSpec:
    kind = {"ce": "cross_entropy", "linear-ce": "cross_entropy", "linear-focal": "focal"}.get(kind, kind)
    if kind == "cross_entropy":
        return LossSpec("cross_entropy")
    freq = np.bincount(np.asarray(y, dtype=int), minlength=n_classes) / max(len(y), 1)
    return LossSpec("focal", gamma, tuple(focal_alpha(freq)))


def label_ids(labels: Sequence[Label]) -> np.ndarray:
    order = {lab: i for i, lab in enumerate(LABELS)}
    return np.array([order[Label.parse(x)] for x in labels], dtype=int)


def cross_val_predict(
    groups: Sequence[str],
    y: Sequence[int],
    fold_of: dict[str, int],
    fit_predict: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> np.ndarray:
    """Out-of-fold predictions: every row is predicted by a model that never saw its group.

    ``fit_predict(train_rows, test_rows)`` returns class ids for ``test_rows``.
    """
    groups = np.asarray(groups)
    folds = np.array([fold_of[g] for g in groups])
    pred = np.full(len(groups), -1, dtype=int)
    for k in sorted(set(fold_of.values())):
        test = np.flatnonzero(folds == k)
        if not len(test):
            continue
        train = np.flatnonzero(folds != k)
        pred[test] = fit_predict(train, test)
    if (pred < 0).any():
        raise DataError("cross-validation left rows without predictions")
    return pred
