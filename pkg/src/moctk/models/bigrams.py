"""Which bigrams separate correctly identified posts from missed ones."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..core import DataError
from .linear import TrainConfig, fit_linear
from .text import bigrams, count_matrix, fit_vocabulary, tokenize


class InsufficientData(DataError):
    pass


def error_correlation_bigrams(
    texts: Mapping[str, str],
    tp_set: Sequence[str],
    fn_set: Sequence[str],
    config: TrainConfig = TrainConfig(epochs=200, batch_size=256, learning_rate=0.05, l2=1e-3),
) -> list[tuple[str, float]]:
    """Logistic regression on bigram indicators, true positives vs false negatives.

    Returns ``(bigram, coefficient)`` pairs sorted by descending coefficient;
    positive weights point to bigrams typical of posts the model caught.
    """
    tp, fn = list(tp_set), list(fn_set)
    if not tp or not fn:
        raise InsufficientData("need at least one true positive and one false negative post")
    if set(tp) & set(fn):
        raise DataError("true-positive and false-negative sets overlap")
    missing = [p for p in tp + fn if p not in texts]
    if missing:
        raise DataError(f"no text for post(s): {', '.join(missing[:5])}")
    docs = [bigrams(tokenize(texts[p])) for p in tp + fn]
    if not any(docs):
        raise InsufficientData("no bigrams in the selected posts")
    vocab = fit_vocabulary(docs)
    X = count_matrix(docs, vocab, binary=True)
    y = np.array([1] * len(tp) + [0] * len(fn))
    model = fit_linear(X, y, "cross_entropy", config, n_classes=2)
    coef = model.weights[1] - model.weights[0]
    names = sorted(vocab.index, key=vocab.index.get)
    return sorted(zip(names, coef.tolist()), key=lambda kv: (-kv[1], kv[0]))
