"""Candidate timeline extraction around posting-frequency change points."""

from __future__ import annotations

import random
import statistics
from collections import defaultdict
from dataclasses import asdict, dataclass
from datetime import timedelta
from typing import Iterable, Mapping, Sequence

from .changepoint import ChangePoint, CountSeries, GammaParams, detect
from .core import MAX_TIMELINE_POSTS, MIN_TIMELINE_POSTS, DataError, Post, Timeline

WINDOW_DAYS = 7


class InsufficientCandidates(DataError):
    pass


def group_by_user(posts: Iterable[Post]) -> dict[str, list[Post]]:
    out: dict[str, list[Post]] = defaultdict(list)
    for p in posts:
        out[p.user_id].append(p)
    return {u: sorted(ps, key=lambda p: (p.timestamp, p.post_id)) for u, ps in sorted(out.items())}


def daily_counts(posts: Iterable[Post]) -> dict[str, CountSeries]:
    """Zero-filled posts-per-day series for every user, first to last post day."""
    out = {}
    for user, ps in group_by_user(posts).items():
        first = ps[0].day
        n = (ps[-1].day - first).days + 1
        counts = [0] * n
        for p in ps:
            counts[(p.day - first).days] += 1
        out[user] = CountSeries(user, first, tuple(counts))
    return out


@dataclass
class ExtractionSummary:
    candidates: int = 0
    dropped_short: int = 0
    dropped_long: int = 0
    sampled: int | None = None
    changepoints: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def extract_timelines(
    posts: Sequence[Post],
    changepoints: Sequence[ChangePoint],
    window_days: int = WINDOW_DAYS,
    min_posts: int = MIN_TIMELINE_POSTS,
    max_posts: int = MAX_TIMELINE_POSTS,
    summary: ExtractionSummary | None = None,
) -> list[Timeline]:
    """Build one user's timelines: posts whose UTC date is within ``window_days`` of each anchor.

    Windows with fewer than ``min_posts`` or more than ``max_posts`` posts are
    dropped and counted in ``summary``.
    """
    users = {p.user_id for p in posts}
    if len(users) > 1:
        raise DataError("extract_timelines expects the posts of a single user")
    if not posts:
        return []
    user = next(iter(users))
    out = []
    for cp in sorted(changepoints, key=lambda c: c.date):
        lo, hi = cp.date - timedelta(days=window_days), cp.date + timedelta(days=window_days)
        window = [p for p in posts if lo <= p.day <= hi]
        if summary is not None:
            summary.changepoints += 1
        if len(window) < min_posts:
            if summary is not None:
                summary.dropped_short += 1
            continue
        if len(window) > max_posts:
            if summary is not None:
                summary.dropped_long += 1
            continue
        out.append(Timeline(f"{user}@{cp.date.isoformat()}", user, tuple(window), cp.date))
        if summary is not None:
            summary.candidates += 1
    return out


def extract_all(
    posts: Iterable[Post],
    prior: GammaParams = GammaParams(),
    hazard: float = 0.01,
    r_reset: int = 2,
    mass_threshold: float = 0.5,
    min_gap_days: int = 7,
    window_days: int = WINDOW_DAYS,
    min_posts: int = MIN_TIMELINE_POSTS,
    max_posts: int = MAX_TIMELINE_POSTS,
    threads: int = 1,
) -> tuple[list[Timeline], ExtractionSummary]:
    """Detect change points per user and extract every candidate timeline."""
    by_user = group_by_user(posts)
    series = daily_counts(p for ps in by_user.values() for p in ps)

    def detect_user(user):
        return detect(series[user], prior, hazard, r_reset, mass_threshold, min_gap_days)

    users = list(by_user)
    if threads > 1 and len(users) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as pool:
            cps = list(pool.map(detect_user, users))
    else:
        cps = [detect_user(u) for u in users]

    summary = ExtractionSummary()
    out = []
    for user, user_cps in zip(users, cps):
        out.extend(extract_timelines(by_user[user], user_cps, window_days, min_posts, max_posts, summary))
    out.sort(key=lambda t: (t.anchor, t.user_id))
    return out, summary


def sample_timelines(
    candidates: Sequence[Timeline], n: int = 500, one_per_user: bool = True, seed: int = 0
) -> list[Timeline]:
    """Uniform sample without replacement, at most one timeline per user when requested.

    A user is drawn uniformly among eligible users first, then one of their
    candidate timelines uniformly; this keeps every user equally likely.
    """
    if n < 0:
        raise DataError("n must be >= 0")
    if n == 0:
        return []
    rng = random.Random(seed)
    ordered = sorted(candidates, key=lambda t: t.timeline_id)
    if not one_per_user:
        if len(ordered) < n:
            raise InsufficientCandidates(f"{len(ordered)} candidates for a sample of {n}")
        return sorted(rng.sample(ordered, n), key=lambda t: t.timeline_id)
    by_user: dict[str, list[Timeline]] = defaultdict(list)
    for t in ordered:
        by_user[t.user_id].append(t)
    users = sorted(by_user)
    if len(users) < n:
        raise InsufficientCandidates(f"{len(users)} distinct users for a sample of {n}")
    chosen = rng.sample(users, n)
    return sorted((rng.choice(by_user[u]) for u in chosen), key=lambda t: t.timeline_id)


def length_summary(timelines: Sequence[Timeline]) -> dict:
    """Count, total posts, mean, SD, min and max of timeline lengths."""
    lengths = [len(t) for t in timelines]
    if not lengths:
        return {"timelines": 0, "posts": 0, "mean": None, "sd": None, "min": None, "max": None}
    return {
        "timelines": len(lengths),
        "posts": sum(lengths),
        "mean": statistics.fmean(lengths),
        "sd": statistics.stdev(lengths) if len(lengths) > 1 else 0.0,
        "min": min(lengths),
        "max": max(lengths),
    }


def posts_index(posts: Iterable[Post]) -> Mapping[str, Post]:
    return {p.post_id: p for p in posts}
