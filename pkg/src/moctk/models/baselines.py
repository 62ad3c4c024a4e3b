"""Naive baselines: always-None and prior-sampling predictors."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from ..core import LABELS, DataError, Label, LabelSequence, Timeline

#: Label distribution of the annotated corpus (15,799 O / 2,018 IE / 885 IS of 18,702 posts).
CORPUS_PRIORS = {Label.O: 15799 / 18702, Label.IE: 2018 / 18702, Label.IS: 885 / 18702}


class InvalidDistribution(DataError):
    pass


def _lengths(timelines) -> list[tuple[str, int]]:
    out = []
    for t in timelines:
        if isinstance(t, Timeline):
            out.append((t.timeline_id, len(t)))
        elif isinstance(t, LabelSequence):
            out.append((t.timeline_id, len(t)))
        else:
            tid, n = t
            out.append((str(tid), int(n)))
    return out


def majority_baseline(timelines: Sequence) -> list[LabelSequence]:
    """Predict O for every post."""
    return [LabelSequence(tid, (Label.O,) * n) for tid, n in _lengths(timelines)]


def check_priors(priors: Mapping) -> dict[Label, float]:
    probs = {Label.parse(k): float(v) for k, v in priors.items()}
    if any(not math.isfinite(v) or v < 0 for v in probs.values()):
        raise InvalidDistribution(f"priors must be finite and non-negative: {priors}")
    total = sum(probs.values())
    if abs(total - 1.0) > 1e-6:
        raise InvalidDistribution(f"priors sum to {total}, expected 1")
    return {lab: probs.get(lab, 0.0) for lab in LABELS}


def random_baseline(timelines: Sequence, class_priors: Mapping = CORPUS_PRIORS, seed: int = 0) -> list[LabelSequence]:
    """Sample every post's label i.i.d. from ``class_priors``."""
    probs = check_priors(class_priors)
    rng = np.random.default_rng(seed)
    p = np.array([probs[lab] for lab in LABELS])
    p = p / p.sum()
    out = []
    for tid, n in _lengths(timelines):
        draws = rng.choice(len(LABELS), size=n, p=p)
        out.append(LabelSequence(tid, tuple(LABELS[i] for i in draws)))
    return out
