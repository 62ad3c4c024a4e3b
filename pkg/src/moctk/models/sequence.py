"""Context-window classifier: a timeline-aware stand-in for a sequence model."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import sparse


def _shift_matrix(lengths: Sequence[int], offset: int) -> sparse.csr_matrix:
    """Row i selects row i+offset of the stacked matrix when both lie in the same timeline."""
    rows, cols = [], []
    start = 0
    for n in lengths:
        for i in range(n):
            j = i + offset
            if 0 <= j < n:
                rows.append(start + i)
                cols.append(start + j)
        start += n
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(start, start))


def context_features(X, lengths: Sequence[int], radius: int):
    """Concatenate each post's features with those of ``radius`` posts on either side.

    Rows of ``X`` are the posts of consecutive timelines with the given
    ``lengths``; neighbours beyond a timeline boundary are zero. Blocks are
    ordered by offset ``-radius .. radius``, so ``radius=0`` returns ``X``.
    """
    if radius < 0:
        raise ValueError("context radius must be >= 0")
    if sum(lengths) != X.shape[0]:
        raise ValueError(f"lengths sum to {sum(lengths)} but X has {X.shape[0]} rows")
    if radius == 0:
        return X
    blocks = [_shift_matrix(lengths, o) @ X for o in range(-radius, radius + 1)]
    if sparse.issparse(X):
        return sparse.hstack(blocks, format="csr")
    return np.hstack([np.asarray(b) for b in blocks])


def sequence_classifier(
    X,
    y: Sequence[int],
    lengths: Sequence[int],
    radius: int = 2,
    folds: int = 5,
    seed: int = 0,
    loss: str = "cross_entropy",
    config=None,
    timeline_ids: Sequence[str] | None = None,
) -> np.ndarray:
    """Out-of-fold label ids from a linear classifier over context windows.

    Timelines (not posts) are split into folds. ``radius=0`` is the plain
    post-level classifier on the same features.
    """
    from ..core import split_folds
    from .linear import TrainConfig, cross_val_predict, fit_linear, make_loss

    config = config or TrainConfig(seed=seed)
    y = np.asarray(y, dtype=int)
    ids = list(timeline_ids) if timeline_ids is not None else [f"t{i:05d}" for i in range(len(lengths))]
    groups = np.repeat(ids, lengths)
    fold_of = dict(split_folds(ids, folds, seed).folds)
    Z = context_features(X, lengths, radius)
    if sparse.issparse(Z):
        Z = sparse.csr_matrix(Z)

    def fit_predict(train, test):
        clf = fit_linear(Z[train], y[train], make_loss(loss, y[train]), config)
        return clf.predict(Z[test])

    return cross_val_predict(groups, y, fold_of, fit_predict)
