"""Tokenisation, bigrams and tf-idf featurisation."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from ..core import DataError

_TOKEN = re.compile(r"\w+", re.UNICODE)


class EmptyVocabulary(DataError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercased Unicode word tokens; no stemming."""
    return _TOKEN.findall(text.lower())


def bigrams(tokens: Sequence[str]) -> list[str]:
    return [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]


@dataclass(frozen=True)
class TfidfVocabulary:
    index: dict[str, int]
    df: dict[str, int]
    n_docs: int

    def __len__(self) -> int:
        return len(self.index)

    def idf(self) -> np.ndarray:
        out = np.empty(len(self.index))
        for tok, i in self.index.items():
            out[i] = math.log((1 + self.n_docs) / (1 + self.df[tok])) + 1.0
        return out


def fit_vocabulary(docs: Iterable[Sequence[str]], min_df: int = 1) -> TfidfVocabulary:
    df: Counter = Counter()
    n = 0
    for toks in docs:
        df.update(set(toks))
        n += 1
    kept = sorted(t for t, c in df.items() if c >= min_df)
    if not kept:
        raise EmptyVocabulary("no tokens survive vocabulary fitting")
    return TfidfVocabulary({t: i for i, t in enumerate(kept)}, {t: df[t] for t in kept}, n)


def count_matrix(docs: Sequence[Sequence[str]], vocab: TfidfVocabulary, binary: bool = False) -> sparse.csr_matrix:
    rows, cols, vals = [], [], []
    for r, toks in enumerate(docs):
        counts = Counter(t for t in toks if t in vocab.index)
        for tok, c in counts.items():
            rows.append(r)
            cols.append(vocab.index[tok])
            vals.append(1.0 if binary else float(c))
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(docs), len(vocab)))


def tfidf_featurize(
    texts: Sequence[str], vocab: TfidfVocabulary | None = None, min_df: int = 1
) -> tuple[sparse.csr_matrix, TfidfVocabulary]:
    """L2-normalised tf-idf rows, with ``idf = ln((1+N)/(1+df)) + 1``.

    Fits the vocabulary on ``texts`` unless one is given; tokens outside the
    vocabulary are ignored.
    """
    docs = [tokenize(t) for t in texts]
    if vocab is None:
        vocab = fit_vocabulary(docs, min_df)
    X = count_matrix(docs, vocab) @ sparse.diags(vocab.idf())
    return l2_normalize(sparse.csr_matrix(X)), vocab


def l2_normalize(X):
    if sparse.issparse(X):
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        norms[norms == 0] = 1.0
        return sparse.csr_matrix(sparse.diags(1.0 / norms) @ X)
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return X / norms


def lsa_projection(X: sparse.spmatrix, dim: int = 50) -> np.ndarray:
    """Right singular vectors (features x dim) of a tf-idf matrix for dense projection."""
    k = min(dim, min(X.shape) - 1)
    if k < 1:
        return np.eye(X.shape[1])
    from scipy.sparse.linalg import svds

    _, s, vt = svds(sparse.csr_matrix(X, dtype=float), k=k, random_state=0)
    order = np.argsort(-s)
    vt = vt[order]
    # deterministic sign: largest-magnitude entry of each component positive
    signs = np.sign(vt[np.arange(len(vt)), np.argmax(np.abs(vt), axis=1)])
    signs[signs == 0] = 1.0
    return (vt * signs[:, None]).T
