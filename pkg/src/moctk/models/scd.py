"""Change signals from aligning or forecasting consecutive post representations."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import DataError, MocError

log = logging.getLogger(__name__)

DEFAULT_K = 3
DEFAULT_RIDGE = 1.0


class SingularSystem(MocError):
    pass


class InsufficientHistory(DataError):
    pass


def orthogonal_procrustes(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal ``omega`` minimising ``||A @ omega - B||_F`` and the residual ``A @ omega - B``.

    Falls back to the identity (with a warning) when ``A.T @ B`` is rank deficient.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2:
        raise DataError(f"Procrustes inputs must be matching 2-d arrays, got {A.shape} and {B.shape}")
    M = A.T @ B
    u, s, vt = np.linalg.svd(M)
    d = M.shape[0]
    tol = s.max(initial=0.0) * d * np.finfo(float).eps
    if s.size == 0 or s.max() == 0 or (s > tol).sum() < d:
        log.warning("rank-deficient Procrustes input; using the identity transform")
        omega = np.eye(d)
    else:
        omega = u @ vt
    return omega, A @ omega - B


def scd_op_features(vectors: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Per-post residual ``v_{i-1} @ omega - v_i``; the first post gets zeros."""
    V = np.asarray(vectors, dtype=float)
    out = np.zeros_like(V)
    if len(V) > 1:
        out[1:] = V[:-1] @ omega - V[1:]
    return out


def consecutive_pairs(sequences: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    prev = [np.asarray(v)[:-1] for v in sequences if len(v) > 1]
    cur = [np.asarray(v)[1:] for v in sequences if len(v) > 1]
    if not prev:
        raise InsufficientHistory("no consecutive post pairs to align")
    return np.vstack(prev), np.vstack(cur)


def fit_procrustes(sequences: Sequence[np.ndarray]) -> np.ndarray:
    A, B = consecutive_pairs(sequences)
    return orthogonal_procrustes(A, B)[0]


# forecasting


def history_windows(vectors: np.ndarray, k: int = DEFAULT_K) -> tuple[np.ndarray, np.ndarray]:
    """Rows of ``k`` concatenated previous vectors and the vector that follows them."""
    V = np.asarray(vectors, dtype=float)
    if k >= len(V):
        raise InsufficientHistory(f"need more than k={k} posts, got {len(V)}")
    X = np.stack([V[i - k : i].ravel() for i in range(k, len(V))])
    return X, V[k:]


def ridge_fit(X: np.ndarray, Y: np.ndarray, lam: float = DEFAULT_RIDGE) -> np.ndarray:
    """``(X^T X + lam I)^-1 X^T Y``."""
    A = X.T @ X + lam * np.eye(X.shape[1])
    try:
        if lam == 0 and np.linalg.matrix_rank(A) < A.shape[0]:
            raise np.linalg.LinAlgError("singular")
        return np.linalg.solve(A, X.T @ Y)
    except np.linalg.LinAlgError:
        raise SingularSystem("normal equations are singular; use a positive ridge penalty") from None


@dataclass
class Forecaster:
    coef: np.ndarray
    k: int = DEFAULT_K

    def residuals(self, vectors: np.ndarray) -> np.ndarray:
        """Per-post ``actual - predicted``; the first ``k`` posts get zeros."""
        V = np.asarray(vectors, dtype=float)
        X, Y = history_windows(V, self.k)
        out = np.zeros_like(V)
        out[self.k :] = Y - X @ self.coef
        return out


def fit_forecaster(sequences: Sequence[np.ndarray], k: int = DEFAULT_K, lam: float = DEFAULT_RIDGE) -> Forecaster:
    parts = [history_windows(v, k) for v in sequences if len(v) > k]
    if not parts:
        raise InsufficientHistory(f"no training timeline longer than k={k}")
    X = np.vstack([p[0] for p in parts])
    Y = np.vstack([p[1] for p in parts])
    return Forecaster(ridge_fit(X, Y, lam), k)


def scd_forecast(vectors: np.ndarray, forecaster: Forecaster) -> np.ndarray:
    return forecaster.residuals(vectors)
