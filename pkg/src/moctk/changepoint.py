"""Bayesian online change-point detection over daily post counts.

Counts are modelled as Poisson with a conjugate Gamma prior on the rate, so
the one-step predictive of every run is Negative Binomial. The run-length
recursion is carried out in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import DataError, NumericalError

DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 1.0
DEFAULT_HAZARD = 1.0 / 100
DEFAULT_R_RESET = 2
DEFAULT_MASS_THRESHOLD = 0.5
DEFAULT_MIN_GAP_DAYS = 7
TRUNCATION_MASS = 1e-12


@dataclass(frozen=True)
class GammaParams:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DataError(f"Gamma parameters must be positive and finite, got {self.alpha}, {self.beta}")


@dataclass(frozen=True)
class CountSeries:
    user_id: str
    start_date: date
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise DataError(f"negative count in series for {self.user_id}")
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return len(self.counts)

    def date_at(self, t: int) -> date:
        return self.start_date + timedelta(days=t)


@dataclass(frozen=True)
class ChangePoint:
    date: date
    posterior_mass: float
    index: int = field(default=-1, compare=False)


class RunLengthPosterior:
    """Run-length distributions P(r_t | x_0..x_t), one vector per step.

    ``r_t`` is the number of observations preceding ``x_t`` in its current
    segment, so the vector at step ``t`` has support ``0..t``. Entries pruned
    during the recursion are stored as exact zeros.
    """

    def __init__(self, steps: list[tuple[np.ndarray, np.ndarray]], start_date: date | None = None):
        self._steps = steps
        self.start_date = start_date

    def __len__(self) -> int:
        return len(self._steps)

    def vector(self, t: int) -> np.ndarray:
        runs, probs = self._steps[t]
        out = np.zeros(t + 1)
        out[runs] = probs
        return out

    def __getitem__(self, t: int) -> np.ndarray:
        return self.vector(t)

    def __iter__(self):
        return (self.vector(t) for t in range(len(self)))

    def sparse(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        return self._steps[t]

    def map_run_lengths(self) -> np.ndarray:
        return np.array([runs[np.argmax(p)] for runs, p in self._steps], dtype=int)

    def reset_mass(self, r_reset: int) -> np.ndarray:
        """P(r_t <= r_reset) for every step."""
        return np.array([p[runs <= r_reset].sum() for runs, p in self._steps])

    def as_matrix(self) -> np.ndarray:
        n = len(self)
        mat = np.zeros((n, n))
        for t, (runs, p) in enumerate(self._steps):
            mat[t, runs] = p
        return mat


def log_predictive(alpha, beta, x):
    """Log Negative-Binomial predictive mass of count ``x`` under Gamma(alpha, beta)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return (
        gammaln(x + alpha)
        - gammaln(alpha)
        - gammaln(x + 1.0)
        + alpha * (np.log(beta) - np.log1p(beta))
        - x * np.log1p(beta)
    )


def poisson_gamma_predictive(params: GammaParams, x: int) -> float:
    if x < 0 or int(x) != x:
        raise DataError(f"count must be a non-negative integer, got {x}")
    value = float(np.exp(log_predictive(params.alpha, params.beta, x)))
    if not math.isfinite(value):
        raise NumericalError(f"non-finite predictive for x={x}, {params}")
    return value


def run_bocpd(
    series: CountSeries | Sequence[int],
    prior: GammaParams = GammaParams(),
    hazard: float = DEFAULT_HAZARD,
    truncation: float = TRUNCATION_MASS,
) -> RunLengthPosterior:
    counts = series.counts if isinstance(series, CountSeries) else tuple(int(c) for c in series)
    if not counts:
        raise DataError("cannot run change-point detection on an empty series")
    if not 0 < hazard < 1:
        raise DataError(f"hazard must lie in (0, 1), got {hazard}")
    log_h, log_1mh = math.log(hazard), math.log1p(-hazard)

    # active runs: run length, log posterior, sufficient statistics including the latest count
    runs = np.array([0])
    logp = np.array([0.0])
    alphas = np.array([prior.alpha + counts[0]])
    betas = np.array([prior.beta + 1.0])
    steps = [(runs.copy(), np.array([1.0]))]

    for x in counts[1:]:
        grow = logp + log_1mh + log_predictive(alphas, betas, x)
        change = log_h + float(log_predictive(prior.alpha, prior.beta, x))  # sum of normalized logp is 0
        joint = np.concatenate(([change], grow))
        norm = logsumexp(joint)
        if not math.isfinite(norm):
            raise NumericalError("run-length posterior collapsed to zero mass")
        logp = joint - norm
        runs = np.concatenate(([0], runs + 1))
        alphas = np.concatenate(([prior.alpha + x], alphas + x))
        betas = np.concatenate(([prior.beta + 1.0], betas + 1.0))

        if truncation > 0:
            keep = logp >= math.log(truncation)
            if not keep.all():
                runs, logp, alphas, betas = runs[keep], logp[keep], alphas[keep], betas[keep]
                logp = logp - logsumexp(logp)
        steps.append((runs.copy(), np.exp(logp)))

    start = series.start_date if isinstance(series, CountSeries) else None
    return RunLengthPosterior(steps, start)


def declare_changepoints(
    posterior: RunLengthPosterior,
    r_reset: int = DEFAULT_R_RESET,
    mass_threshold: float = DEFAULT_MASS_THRESHOLD,
    min_gap_days: int = DEFAULT_MIN_GAP_DAYS,
    start_date: date | None = None,
) -> list[ChangePoint]:
    """Declare days on which the run length has probably reset.

    Day ``t`` is declared when P(r_t <= r_reset) exceeds ``mass_threshold`` and
    at least ``min_gap_days`` have passed since the previous declaration. Days
    ``t <= r_reset`` are never declared: there the event is certain.
    """
    if r_reset < 0:
        raise DataError("r_reset must be >= 0")
    if not 0 < mass_threshold < 1:
        raise DataError("mass_threshold must lie in (0, 1)")
    start = start_date or posterior.start_date or date(1970, 1, 1)
    mass = posterior.reset_mass(r_reset)
    out: list[ChangePoint] = []
    last = None
    for t in range(r_reset + 1, len(mass)):
        if mass[t] > mass_threshold and (last is None or t - last >= min_gap_days):
            out.append(ChangePoint(start + timedelta(days=t), float(mass[t]), t))
            last = t
    return out


def detect(
    series: CountSeries,
    prior: GammaParams = GammaParams(),
    hazard: float = DEFAULT_HAZARD,
    r_reset: int = DEFAULT_R_RESET,
    mass_threshold: float = DEFAULT_MASS_THRESHOLD,
    min_gap_days: int = DEFAULT_MIN_GAP_DAYS,
) -> list[ChangePoint]:
    post = run_bocpd(series, prior, hazard)
    return declare_changepoints(post, r_reset, mass_threshold, min_gap_days, series.start_date)
