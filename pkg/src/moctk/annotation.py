"""Inter-annotator agreement and majority-vote gold standard."""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Iterable, Literal, Sequence

from .core import LABELS, AlignmentError, AnnotationSet, DataError, Label, LabelSequence, Timeline

PostKey = tuple[str, str]


def _post_sets(
    ann: AnnotationSet, label: Label, timelines: Iterable[Timeline] | None = None
) -> dict[str, set[PostKey]]:
    """Per annotator, the (timeline_id, post_id) keys they gave ``label``.

    With ``timelines``, posts an annotator left unlabelled count as O.
    """
    sets: dict[str, set[PostKey]] = {a: set() for a in ann.annotators}
    seen: dict[str, set[PostKey]] = defaultdict(set)
    for rec in ann:
        key = (rec.timeline_id, rec.post_id)
        seen[rec.annotator_id].add(key)
        if rec.label == label:
            sets[rec.annotator_id].add(key)
    if timelines is not None and label == Label.O:
        covered = set(ann.timeline_ids)
        for tl in timelines:
            if tl.timeline_id not in covered:
                continue
            for pid in tl.post_ids:
                key = (tl.timeline_id, pid)
                for a in sets:
                    if key not in seen[a]:
                        sets[a].add(key)
    return sets


def positive_agreement(
    ann: AnnotationSet,
    label: Label,
    mode: Literal["perfect", "majority"] = "perfect",
    timelines: Iterable[Timeline] | None = None,
) -> float | None:
    """Per-label positive agreement; ``None`` when no annotator used the label.

    ``perfect`` divides the intersection of annotators' post sets by their
    union; ``majority`` divides the posts chosen by at least two annotators by
    the same union.
    """
    label = Label.parse(label)
    sets = list(_post_sets(ann, label, timelines).values())
    if len(sets) < 2:
        raise DataError("positive agreement needs at least two annotators")
    union = set().union(*sets)
    if not union:
        return None
    if mode == "perfect":
        agreed = set.intersection(*sets)
    elif mode == "majority":
        votes = Counter(k for s in sets for k in s)
        agreed = {k for k, v in votes.items() if v >= 2}
    else:
        raise ValueError(f"unknown agreement mode {mode!r}")
    return len(agreed) / len(union)


def agreement_table(ann: AnnotationSet, timelines: Iterable[Timeline] | None = None) -> dict:
    timelines = list(timelines) if timelines is not None else None
    return {
        lab.value: {
            "perfect": positive_agreement(ann, lab, "perfect", timelines),
            "majority": positive_agreement(ann, lab, "majority", timelines),
        }
        for lab in (Label.IS, Label.IE, Label.O)
    }


def resolve_votes(votes: Sequence[Label]) -> Label:
    """IS with two or more IS votes, else IE with two or more IE votes, else O."""
    counts = Counter(Label.parse(v) for v in votes)
    if counts[Label.IS] >= 2:
        return Label.IS
    if counts[Label.IE] >= 2:
        return Label.IE
    return Label.O


def derive_gold(ann: AnnotationSet, timeline: Timeline, annotators: Sequence[str] | None = None) -> LabelSequence:
    """Majority-vote gold labels for one timeline.

    Posts without a record from an annotator count as that annotator voting O.
    The agreed role (switch start or escalation peak) is kept in ``extra["roles"]``.
    """
    annotators = list(annotators) if annotators is not None else ann.annotators
    positions = {pid: i for i, pid in enumerate(timeline.post_ids)}
    votes: list[dict[str, Label]] = [{} for _ in positions]
    roles: list[Counter] = [Counter() for _ in positions]
    for rec in ann.for_timeline(timeline.timeline_id):
        if rec.post_id not in positions:
            raise AlignmentError(
                f"annotation by {rec.annotator_id} references post {rec.post_id!r} "
                f"not in timeline {timeline.timeline_id}"
            )
        i = positions[rec.post_id]
        votes[i][rec.annotator_id] = rec.label
        roles[i][rec.role] += 1
    labels = []
    gold_roles = []
    for v, r in zip(votes, roles):
        lab = resolve_votes([v.get(a, Label.O) for a in annotators])
        labels.append(lab)
        if lab == Label.IS and r["switch_start"] >= 2:
            gold_roles.append("switch_start")
        elif lab == Label.IE and r["escalation_peak"] >= 2:
            gold_roles.append("escalation_peak")
        else:
            gold_roles.append("none" if lab == Label.O else "in_region")
    return LabelSequence(timeline.timeline_id, tuple(labels), {"roles": gold_roles})


def aggregate(ann: AnnotationSet, timelines: Iterable[Timeline]) -> list[LabelSequence]:
    """Gold sequences for every timeline that carries annotations."""
    annotators = ann.annotators
    by_id = {t.timeline_id: t for t in timelines}
    unknown = set(ann.timeline_ids) - set(by_id)
    if unknown:
        raise AlignmentError(f"annotations reference unknown timeline(s): {', '.join(sorted(unknown))}")
    return [derive_gold(ann, by_id[tid], annotators) for tid in sorted(ann.timeline_ids)]


def label_counts(seqs: Iterable[LabelSequence]) -> dict[str, int]:
    c = Counter(x for s in seqs for x in s.labels)
    return {lab.value: c[lab] for lab in LABELS}
