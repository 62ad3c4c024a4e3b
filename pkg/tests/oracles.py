"""Independent reference implementations used only by the tests.

Each one recomputes a quantity by brute force or a different route than the
library and must not import the code path it checks.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import mpmath


def runs_by_scanning(labels):
    """Maximal runs as (label, start, end) via itertools.groupby."""
    out, pos = [], 0
    for lab, grp in itertools.groupby(labels):
        n = len(list(grp))
        out.append((lab, pos, pos + n - 1))
        pos += n
    return out


def max_matching_exhaustive(gold, pred, w):
    """Maximum bipartite matching size under |i - j| <= w by memoised exhaustive search."""
    gold, pred = tuple(gold), tuple(pred)

    @lru_cache(maxsize=None)
    def best(i, used):
        if i == len(gold):
            return 0
        top = best(i + 1, used)  # leave gold[i] unmatched
        for j, p in enumerate(pred):
            if not used & (1 << j) and abs(gold[i] - p) <= w:
                top = max(top, 1 + best(i + 1, used | (1 << j)))
        return top

    return best(0, 0)


def coverage_by_sets(gold, pred, label):
    """(C_p, C_r) from explicit index sets and set-based IoU."""
    def regions(seq):
        return [set(range(s, e + 1)) for lab, s, e in runs_by_scanning(seq) if lab == label]

    def iou(a, b):
        return len(a & b) / len(a | b)

    def directed(targets, others):
        total = sum(len(r) for r in targets)
        if total == 0:
            return None
        return sum(len(r) * max([iou(r, o) for o in others] or [0.0]) for r in targets) / total

    rg, rm = regions(gold), regions(pred)
    return directed(rm, rg), directed(rg, rm)


def segment_log_marginal(xs, alpha, beta):
    """Closed-form log marginal likelihood of a Poisson segment under a Gamma(alpha, beta) rate."""
    a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
    s, n = sum(xs), len(xs)
    return (
        a * mpmath.log(b)
        - mpmath.loggamma(a)
        + mpmath.loggamma(a + s)
        - (a + s) * mpmath.log(b + n)
        - sum(mpmath.loggamma(x + 1) for x in xs)
    )


def run_length_by_enumeration(xs, alpha, beta, hazard):
    """P(r_last | xs) by summing over every change/no-change configuration."""
    n = len(xs)
    h = mpmath.mpf(hazard)
    post = [mpmath.mpf(0)] * n
    for flags in itertools.product((0, 1), repeat=n - 1):
        starts = [0] + [t for t, f in zip(range(1, n), flags) if f]
        weight = mpmath.mpf(1)
        for f in flags:
            weight *= h if f else (1 - h)
        bounds = starts + [n]
        for s, e in zip(bounds, bounds[1:]):
            weight *= mpmath.exp(segment_log_marginal(xs[s:e], alpha, beta))
        post[n - 1 - starts[-1]] += weight
    z = sum(post)
    return [float(p / z) for p in post]


def run_length_by_segments(xs, alpha, beta, hazard, dps=50):
    """P(r_last | xs) by a dynamic program over the position of the last change.

    Uses closed-form segment marginals in high precision; equivalent to full
    enumeration but quadratic, so it scales to long series.
    """
    with mpmath.workdps(dps):
        n = len(xs)
        h = mpmath.mpf(hazard)
        ml = {}

        def seg(s, e):
            if (s, e) not in ml:
                ml[(s, e)] = mpmath.exp(segment_log_marginal(xs[s:e], alpha, beta))
            return ml[(s, e)]

        # Z[m]: total weight of all partitions of xs[:m]
        Z = [mpmath.mpf(1)] + [mpmath.mpf(0)] * n
        for m in range(1, n + 1):
            Z[m] = sum(
                (Z[s] * h if s > 0 else 1) * (1 - h) ** (m - 1 - s) * seg(s, m) for s in range(m)
            )
        post = [
            (Z[s] * h if s > 0 else 1) * (1 - h) ** (n - 1 - s) * seg(s, n) for s in range(n)
        ]
        z = sum(post)
        # index by run length r = n - 1 - s
        return [float(post[n - 1 - r] / z) for r in range(n)]
