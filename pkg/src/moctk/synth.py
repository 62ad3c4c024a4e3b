"""Synthetic corpora with planted posting-rate changes and planted Switch/Escalation structure.

Text is drawn from small template lexicons, not natural language: the
downstream featurisers are bag-of-words, so that is all they need. Scores on
synthetic data say nothing about real data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Sequence

import numpy as np

from .changepoint import GammaParams
from .core import Annotation, AnnotationSet, DataError, Label, LabelSequence, Post, Timeline
from .extraction import extract_all, sample_timelines

POSITIVE_WORDS = (
    "happy great love hope calm proud better grateful smile excited fine good glad strong relaxed "
    "peaceful thankful laugh sunny bright"
).split()
NEGATIVE_WORDS = (
    "sad alone hate tired empty hurt cry lost scared anxious worse broken numb angry hopeless "
    "worthless pain dark exhausted awful"
).split()
NEUTRAL_WORDS = (
    "today work school home friend day night food music phone sleep went class walk bus game "
    "week time family room"
).split()


class ConfigError(DataError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 100
    days: int = 60
    base_rate: float = 1.0
    changed_rate: float = 8.0
    change_day: int = 30
    positive_lexicon: int = 20
    negative_lexicon: int = 20
    neutral_lexicon: int = 20
    words_per_post: int = 8
    switch_prob: float = 0.9
    switch_length: tuple[int, int] = (1, 3)
    escalation_length: tuple[int, int] = (2, 7)
    priors: dict = field(default_factory=lambda: {"O": 0.845, "IE": 0.108, "IS": 0.047})
    annotator_noise: tuple[float, ...] = (0.0, 0.0, 0.0)
    seed: int = 0
    start: str = "2021-01-01"

    def validate(self) -> None:
        if self.base_rate <= 0 or self.changed_rate <= 0:
            raise ConfigError("posting rates must be positive")
        if not 0 <= self.change_day <= self.days:
            raise ConfigError("change_day must lie within the simulated days")
        if self.n_users < 0 or self.days < 1:
            raise ConfigError("n_users must be >= 0 and days >= 1")
        total = sum(self.priors.values())
        if abs(total - 1) > 1e-6 or any(v < 0 for v in self.priors.values()):
            raise ConfigError(f"priors must be a distribution, got {self.priors}")
        if self.priors.get("IS", 0) > 0 and self.switch_prob <= 0:
            raise ConfigError("a positive IS prior needs switch_prob > 0")
        if self.priors.get("O", 0) < 0.5:
            raise ConfigError("label priors leave too few O posts to separate planted regions")
        for lo, hi in (self.switch_length, self.escalation_length):
            if not 1 <= lo <= hi:
                raise ConfigError("region length ranges must satisfy 1 <= min <= max")
        if self.escalation_length[0] < 2:
            raise ConfigError("escalations need at least two posts to ramp")
        if len(self.annotator_noise) < 2 or any(not 0 <= r <= 1 for r in self.annotator_noise):
            raise ConfigError("need two or more annotators with noise rates in [0, 1]")
        if min(self.positive_lexicon, self.negative_lexicon, self.neutral_lexicon) < 1:
            raise ConfigError("lexicon sizes must be >= 1")


@dataclass
class SynthCorpus:
    posts: list[Post]
    timelines: list[Timeline]
    gold: list[LabelSequence]
    annotations: AnnotationSet
    change_days: dict[str, int]


def _lexicon(base: Sequence[str], size: int, tag: str) -> list[str]:
    words = list(base[:size])
    words += [f"{tag}{i}" for i in range(size - len(words))]
    return words


def _stochastic_round(x: float, rng: np.random.Generator) -> int:
    lo = math.floor(x)
    return lo + int(rng.random() < x - lo)


def _split_budget(total: int, lo: int, hi: int, rng: np.random.Generator) -> list[int]:
    """Region lengths in [lo, hi] summing to ``total`` (a final short piece is widened or merged)."""
    out = []
    while total > 0:
        if total < lo:
            if out:
                out[-1] += total
            else:
                out.append(total)
            break
        n = int(rng.integers(lo, min(hi, total) + 1))
        out.append(n)
        total -= n
    return out


def plant_labels(n: int, cfg: SynthConfig, rng: np.random.Generator) -> tuple[list[Label], list[str]]:
    """Labels and roles for one timeline: separated escalation and switch regions over O."""
    n_ie = _stochastic_round(cfg.priors.get("IE", 0.0) * n, rng)
    # timelines without a switch are compensated so the expected IS fraction stays at its prior
    n_is = 0
    if rng.random() < cfg.switch_prob:
        n_is = _stochastic_round(cfg.priors.get("IS", 0.0) * n / cfg.switch_prob, rng)
    regions = [(Label.IE, k) for k in _split_budget(n_ie, *cfg.escalation_length, rng)]
    regions += [(Label.IS, k) for k in _split_budget(n_is, *cfg.switch_length, rng)]
    order = rng.permutation(len(regions))
    regions = [regions[i] for i in order]
    used = sum(k for _, k in regions)
    gaps_needed = max(len(regions) - 1, 0)
    free = n - used - gaps_needed
    if free < 0:
        raise ConfigError(f"cannot place {used} MoC posts in {len(regions)} regions within {n} posts")
    # distribute the free O posts over len(regions)+1 slots
    cuts = np.sort(rng.integers(0, free + 1, size=len(regions)))
    slots = np.diff(np.concatenate([[0], cuts, [free]]))
    labels: list[Label] = []
    roles: list[str] = []
    for i, (lab, k) in enumerate(regions):
        pad = int(slots[i]) + (1 if i > 0 else 0)
        labels += [Label.O] * pad
        roles += ["none"] * pad
        labels += [lab] * k
        if lab == Label.IS:
            roles += ["switch_start"] + ["in_region"] * (k - 1)
        else:
            peak = int(rng.integers(k // 2, k))
            roles += ["escalation_peak" if j == peak else "in_region" for j in range(k)]
    labels += [Label.O] * int(slots[-1])
    roles += ["none"] * int(slots[-1])
    return labels, roles


def mood_path(labels: Sequence[Label], roles: Sequence[str], rng: np.random.Generator) -> np.ndarray:
    """Latent mood in [-1, 1]: flipped sign on switches, a ramp to the peak on escalations."""
    base = float(rng.choice([-1, 1])) * rng.uniform(0.2, 0.4)
    mood = np.full(len(labels), base)
    i = 0
    while i < len(labels):
        j = i
        while j < len(labels) and labels[j] == labels[i]:
            j += 1
        if labels[i] == Label.IS:
            mood[i:j] = -np.sign(base) * rng.uniform(0.7, 1.0)
        elif labels[i] == Label.IE:
            direction = float(rng.choice([-1, 1]))
            peak = next(k for k in range(i, j) if roles[k] == "escalation_peak")
            for k in range(i, j):
                frac = (k - i + 1) / (peak - i + 1) if k <= peak else 1.0 - 0.3 * (k - peak) / (j - peak)
                mood[k] = base + direction * frac * (1.0 - abs(base))
        i = j
    return np.clip(mood + rng.normal(0, 0.05, len(labels)), -1, 1)


def post_text(mood: float, cfg: SynthConfig, rng: np.random.Generator, lex) -> str:
    pos, neg, neu = lex
    words = []
    strength = abs(mood)
    for _ in range(cfg.words_per_post):
        if rng.random() < strength:
            pool = pos if mood > 0 else neg
        else:
            pool = neu
        words.append(pool[int(rng.integers(len(pool)))])
    return " ".join(words)


def _user_posts(user: str, cfg: SynthConfig, rng: np.random.Generator, start: datetime) -> list[Post]:
    posts = []
    k = 0
    for day in range(cfg.days):
        rate = cfg.base_rate if day < cfg.change_day else cfg.changed_rate
        for sec in sorted(rng.integers(0, 86400, size=rng.poisson(rate))):
            ts = start + timedelta(days=day, seconds=int(sec))
            posts.append(Post(user, f"{user}-p{k:05d}", ts, ""))
            k += 1
    return posts


def _annotate(timeline_id, post_ids, labels, roles, noise, rng) -> list[Annotation]:
    out = []
    for a, rate in enumerate(noise):
        for pid, lab, role in zip(post_ids, labels, roles):
            if rng.random() < rate:
                others = [x for x in (Label.O, Label.IS, Label.IE) if x != lab]
                lab = others[int(rng.integers(2))]
                role = "none" if lab == Label.O else "in_region"
            out.append(Annotation(timeline_id, pid, f"a{a + 1}", lab, role))
    return out


def generate(cfg: SynthConfig = SynthConfig()) -> SynthCorpus:
    """Posts, extracted timelines, planted gold labels and noisy annotations; deterministic per seed.

    Timelines are found with the default change-point settings and one is kept
    per user, so re-running extraction on the posts reproduces their ids.
    """
    cfg.validate()
    start = datetime.fromisoformat(cfg.start).replace(tzinfo=timezone.utc)
    lex = (
        _lexicon(POSITIVE_WORDS, cfg.positive_lexicon, "posword"),
        _lexicon(NEGATIVE_WORDS, cfg.negative_lexicon, "negword"),
        _lexicon(NEUTRAL_WORDS, cfg.neutral_lexicon, "neuword"),
    )
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_users + 1)
    skeleton = []
    for u in range(cfg.n_users):
        skeleton += _user_posts(f"u{u:04d}", cfg, np.random.default_rng(seeds[u]), start)

    candidates, _ = extract_all(skeleton, GammaParams())
    n_users = len({t.user_id for t in candidates})
    chosen = sample_timelines(candidates, n_users, True, cfg.seed)

    rng = np.random.default_rng(seeds[-1])
    text: dict[str, str] = {}
    gold, records = [], []
    for tl in chosen:
        labels, roles = plant_labels(len(tl), cfg, rng)
        mood = mood_path(labels, roles, rng)
        for p, m in zip(tl.posts, mood):
            text[p.post_id] = post_text(float(m), cfg, rng, lex)
        gold.append(LabelSequence(tl.timeline_id, tuple(labels), {"roles": roles}))
        records += _annotate(tl.timeline_id, tl.post_ids, labels, roles, cfg.annotator_noise, rng)

    posts = []
    for p in skeleton:
        t = text.get(p.post_id)
        if t is None:
            t = post_text(float(rng.uniform(-0.3, 0.3)), cfg, rng, lex)
        posts.append(Post(p.user_id, p.post_id, p.timestamp, t))
    by_id = {p.post_id: p for p in posts}
    timelines = [Timeline(t.timeline_id, t.user_id, tuple(by_id[i] for i in t.post_ids), t.anchor) for t in chosen]
    return SynthCorpus(
        posts,
        timelines,
        gold,
        AnnotationSet.from_records(records),
        {f"u{u:04d}": cfg.change_day for u in range(cfg.n_users)},
    )


def planted_series(
    n_before: int, n_after: int, rate_before: float, rate_after: float, seed: int
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.concatenate([rng.poisson(rate_before, n_before), rng.poisson(rate_after, n_after)])


def exact_label_sequences(counts: dict, n_timelines: int) -> list[LabelSequence]:
    """Sequences whose pooled label counts equal ``counts`` exactly, split over ``n_timelines``."""
    pool = [Label.O] * counts.get("O", 0) + [Label.IE] * counts.get("IE", 0) + [Label.IS] * counts.get("IS", 0)
    rng = np.random.default_rng(0)
    pool = [pool[i] for i in rng.permutation(len(pool))]
    sizes = [len(pool) // n_timelines + (1 if i < len(pool) % n_timelines else 0) for i in range(n_timelines)]
    out, start = [], 0
    for i, n in enumerate(sizes):
        out.append(LabelSequence(f"t{i:04d}", tuple(pool[start : start + n])))
        start += n
    return out


def neighbor_contrast_dataset(
    n_timelines: int = 60, length: int = 40, seed: int = 0, noise: float = 0.3
) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Features where a post's label shows only relative to its neighbours.

    Each timeline sits at its own random level, so a post's raw value says
    little. Switch posts jump well above the level for one or two posts;
    escalations climb step by step. Returns stacked features (posts x 1),
    label ids in ``LABELS`` order and the timeline lengths.
    """
    from .core import LABELS

    rng = np.random.default_rng(seed)
    cfg = SynthConfig()
    xs, ys, lengths = [], [], []
    for _ in range(n_timelines):
        labels, roles = plant_labels(length, cfg, rng)
        level = rng.normal(0, 3.0)
        x = np.full(length, level)
        i = 0
        while i < length:
            j = i
            while j < length and labels[j] == labels[i]:
                j += 1
            if labels[i] == Label.IS:
                x[i:j] += 3.0
            elif labels[i] == Label.IE:
                x[i:j] += np.linspace(1.0, 2.0, j - i)
            i = j
        x += rng.normal(0, noise, length)
        xs.append(x[:, None])
        ys.append([LABELS.index(lab) for lab in labels])
        lengths.append(length)
    return np.vstack(xs), np.concatenate(ys), lengths
