"""Novelty features in the style of first story detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_N_LIST = tuple(range(1, 11))


@dataclass(frozen=True)
class MetaFeatureSequence:
    timeline_id: str
    features: np.ndarray  # posts x features

    def __len__(self) -> int:
        return self.features.shape[0]


def fsd_features(
    vectors: np.ndarray,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    mode: str = "centroid",
    timeline_id: str = "",
) -> MetaFeatureSequence:
    """Cosine similarity of each post to its preceding posts.

    One column per ``n`` in ``n_list`` (the previous ``n`` posts, or fewer near
    the start) plus one for the full history. ``centroid`` compares with the
    mean vector, ``nearest`` with the most similar single post. The first post
    gets 0 everywhere, as do comparisons involving zero vectors.
    """
    if mode not in ("centroid", "nearest"):
        raise ValueError(f"unknown FSD mode {mode!r}")
    V = np.asarray(vectors, dtype=float)
    n = V.shape[0]
    norms = np.linalg.norm(V, axis=1)
    unit = np.divide(V, norms[:, None], out=np.zeros_like(V), where=norms[:, None] > 0)
    idx = np.arange(n)
    windows = [min(int(s), n) for s in n_list] + [n]
    out = np.zeros((n, len(windows)))
    if n < 2:
        return MetaFeatureSequence(timeline_id, out)
    if mode == "centroid":
        prefix = np.vstack([np.zeros(V.shape[1]), np.cumsum(V, axis=0)])
        for j, size in enumerate(windows):
            lo = np.maximum(idx - size, 0)
            total = prefix[idx] - prefix[lo]  # sum of the window; same direction as its mean
            tn = np.linalg.norm(total, axis=1)
            dots = np.einsum("ij,ij->i", unit, total)
            out[:, j] = np.divide(dots, tn, out=np.zeros(n), where=tn > 0)
    else:
        sim = unit @ unit.T
        for j, size in enumerate(windows):
            lo = np.maximum(idx - size, 0)
            inside = (idx[None, :] >= lo[:, None]) & (idx[None, :] < idx[:, None])
            best = np.where(inside, sim, -np.inf).max(axis=1)
            out[:, j] = np.where(np.isfinite(best), best, 0.0)
    out[0] = 0.0
    return MetaFeatureSequence(timeline_id, out)
