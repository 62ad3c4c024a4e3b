"""Cross-validated prediction files for every baseline."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from ..core import LABELS, AlignmentError, DataError, LabelSequence, Timeline, split_folds
from .baselines import majority_baseline, random_baseline
from .fsd import DEFAULT_N_LIST, fsd_features
from .linear import TrainConfig, cross_val_predict, fit_linear, label_ids, make_loss
from .scd import DEFAULT_K, DEFAULT_RIDGE, fit_forecaster, fit_procrustes, scd_op_features
from .sequence import context_features
from .text import l2_normalize, lsa_projection, tfidf_featurize

MODELS = ("majority", "random", "linear-ce", "linear-focal", "fsd", "scd-op", "scd-fp")
#: Sequence-style models look at neighbours by default, post-level ones do not.
DEFAULT_CONTEXT = {"linear-ce": 0, "linear-focal": 0, "fsd": 2, "scd-op": 2, "scd-fp": 2}


@dataclass(frozen=True)
class BaselineConfig:
    folds: int = 5
    seed: int = 0
    context_radius: int | None = None
    fsd_mode: str = "centroid"
    lsa_dim: int = 50
    scd_k: int = DEFAULT_K
    ridge: float = DEFAULT_RIDGE
    train: TrainConfig = TrainConfig(epochs=30)


def _aligned(timelines: Sequence[Timeline], gold: Sequence[LabelSequence]) -> list[tuple[Timeline, LabelSequence]]:
    by_id = {g.timeline_id: g for g in gold}
    out = []
    for t in sorted(timelines, key=lambda t: t.timeline_id):
        if t.timeline_id not in by_id:
            raise AlignmentError(f"no gold labels for timeline {t.timeline_id}")
        by_id[t.timeline_id].check_aligned(t)
        out.append((t, by_id[t.timeline_id]))
    return out


def _texts(timelines: Sequence[Timeline]) -> list[str]:
    return [p.text for t in timelines for p in t.posts]


def _external_vectors(timelines, vectors: Mapping[tuple[str, str], np.ndarray]) -> list[np.ndarray]:
    out = []
    for t in timelines:
        try:
            out.append(np.vstack([vectors[(t.timeline_id, pid)] for pid in t.post_ids]))
        except KeyError as exc:
            raise AlignmentError(f"no vector for post {exc.args[0]}") from None
    return out


def _representations(train: Sequence[Timeline], timelines: Sequence[Timeline], dense_dim: int | None):
    """Per-timeline representation matrices from tf-idf fitted on ``train`` only."""
    X_train, vocab = tfidf_featurize(_texts(train))
    X_all, _ = tfidf_featurize(_texts(timelines), vocab)
    if dense_dim is not None:
        proj = lsa_projection(X_train, dense_dim)
        X_all = l2_normalize(np.asarray(X_all @ proj))
    else:
        X_all = X_all.toarray()
    out, start = [], 0
    for t in timelines:
        out.append(X_all[start : start + len(t)])
        start += len(t)
    return out


def _meta_features(model: str, train_idx, reps: list[np.ndarray], cfg: BaselineConfig) -> list[np.ndarray]:
    if model == "fsd":
        return [fsd_features(r, DEFAULT_N_LIST, cfg.fsd_mode).features for r in reps]
    if model == "scd-op":
        omega = fit_procrustes([reps[i] for i in train_idx])
        return [scd_op_features(r, omega) for r in reps]
    if model == "scd-fp":
        fc = fit_forecaster([reps[i] for i in train_idx], cfg.scd_k, cfg.ridge)
        return [fc.residuals(r) if len(r) > cfg.scd_k else np.zeros_like(r) for r in reps]
    raise ValueError(model)


def run_baseline(
    model: str,
    timelines: Sequence[Timeline],
    gold: Sequence[LabelSequence] | None = None,
    config: BaselineConfig = BaselineConfig(),
    vectors: Mapping[tuple[str, str], np.ndarray] | None = None,
    priors: Mapping | None = None,
) -> list[LabelSequence]:
    """Out-of-fold predictions for ``model`` over ``timelines``.

    Folds split whole timelines. Vocabulary, projections, aligners and the
    classifier are all fitted on the training folds only.
    """
    if model not in MODELS:
        raise DataError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    timelines = sorted(timelines, key=lambda t: t.timeline_id)
    if model == "majority":
        return majority_baseline(timelines)
    if model == "random":
        if priors is None:
            if gold is None:
                raise DataError("random baseline needs gold labels or explicit priors")
            counts = Counter(x for g in gold for x in g.labels)
            total = sum(counts.values())
            priors = {lab: counts[lab] / total for lab in LABELS}
        return random_baseline(timelines, priors, config.seed)
    if gold is None:
        raise DataError(f"model {model} needs gold labels for training")

    pairs = _aligned(timelines, gold)
    tls = [t for t, _ in pairs]
    lengths = [len(t) for t in tls]
    y = np.concatenate([label_ids(g.labels) for _, g in pairs])
    groups = np.repeat([t.timeline_id for t in tls], lengths)
    folds = split_folds([t.timeline_id for t in tls], config.folds, config.seed)
    radius = DEFAULT_CONTEXT[model] if config.context_radius is None else config.context_radius
    loss_kind = "focal" if model == "linear-focal" else "cross_entropy"
    offsets = np.concatenate([[0], np.cumsum(lengths)])
    tl_index = {t.timeline_id: i for i, t in enumerate(tls)}

    def fit_predict(train_rows: np.ndarray, test_rows: np.ndarray) -> np.ndarray:
        train_tl = sorted({tl_index[g] for g in groups[train_rows]})
        if model.startswith("linear"):
            X_train, vocab = tfidf_featurize(_texts([tls[i] for i in train_tl]))
            X, _ = tfidf_featurize(_texts(tls), vocab)
        else:
            if vectors is not None:
                reps = _external_vectors(tls, vectors)
            else:
                dim = None if model == "fsd" else config.lsa_dim
                reps = _representations([tls[i] for i in train_tl], tls, dim)
            meta = _meta_features(model, train_tl, reps, config)
            X = np.vstack(meta)
        X = context_features(X, lengths, radius)
        if sparse.issparse(X):
            X = sparse.csr_matrix(X)
        X = _standardize(X, train_rows) if not sparse.issparse(X) else X
        clf = fit_linear(X[train_rows], y[train_rows], make_loss(loss_kind, y[train_rows]), config.train)
        return clf.predict(X[test_rows])

    pred = cross_val_predict(groups, y, dict(folds.folds), fit_predict)
    return [
        LabelSequence(t.timeline_id, tuple(LABELS[k] for k in pred[offsets[i] : offsets[i + 1]]))
        for i, t in enumerate(tls)
    ]


def _standardize(X: np.ndarray, train_rows: np.ndarray) -> np.ndarray:
    mu = X[train_rows].mean(axis=0)
    sd = X[train_rows].std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd
