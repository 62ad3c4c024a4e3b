"""Post-level, windowed and coverage evaluation of Moment-of-Change predictions.

Undefined values (zero denominators) are ``None``. Two averaging rules apply:

* over timelines, undefined values are skipped, and the mean is ``None`` when
  every timeline is undefined;
* over labels (the ``macro`` entries), an undefined label counts as 0, which
  is how the published Majority row arrives at macro-P .282 from O-P .845.
"""

from __future__ import annotations

import csv
import io as _io
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import LABELS, TABLE_LABELS, AlignmentError, Label, LabelSequence, Region, extract_regions

DEFAULT_WINDOWS = (0, 1, 2, 3)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def _label_macro(values: Iterable[float | None]) -> float:
    values = list(values)
    return sum(v or 0.0 for v in values) / len(values)


def _mean_defined(values: Iterable[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return statistics.fmean(defined) if defined else None


def pair_sequences(
    gold: Sequence[LabelSequence], pred: Sequence[LabelSequence]
) -> list[tuple[LabelSequence, LabelSequence]]:
    """Match gold and predicted sequences by timeline id, in sorted id order."""
    g = {s.timeline_id: s for s in gold}
    p = {s.timeline_id: s for s in pred}
    if len(g) != len(gold) or len(p) != len(pred):
        raise AlignmentError("duplicate timeline_id in gold or predictions")
    missing = sorted(set(g) - set(p))
    if missing:
        raise AlignmentError(f"no predictions for timeline(s): {', '.join(missing[:5])}")
    extra = sorted(set(p) - set(g))
    if extra:
        raise AlignmentError(f"predictions for unknown timeline(s): {', '.join(extra[:5])}")
    pairs = []
    for tid in sorted(g):
        _check_pair(g[tid], p[tid])
        pairs.append((g[tid], p[tid]))
    return pairs


def _check_pair(gold: LabelSequence, pred: LabelSequence) -> None:
    if len(gold) != len(pred):
        raise AlignmentError(
            f"timeline {gold.timeline_id}: {len(gold)} gold labels vs {len(pred)} predicted"
        )


# post level


@dataclass(frozen=True)
class ClassCounts:
    tp: int = 0
    predicted: int = 0
    support: int = 0

    @property
    def precision(self) -> float | None:
        return _ratio(self.tp, self.predicted)

    @property
    def recall(self) -> float | None:
        return _ratio(self.tp, self.support)

    @property
    def f1(self) -> float | None:
        # 2PR/(P+R) written on counts; 0 when one side is defined and nothing matches
        return _ratio(2 * self.tp, self.predicted + self.support)

    def __add__(self, other: "ClassCounts") -> "ClassCounts":
        return ClassCounts(self.tp + other.tp, self.predicted + other.predicted, self.support + other.support)

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
            "predicted": self.predicted,
        }


def class_counts(gold: Sequence[Label], pred: Sequence[Label], label: Label) -> ClassCounts:
    tp = sum(1 for g, p in zip(gold, pred) if g == label and p == label)
    return ClassCounts(tp, sum(1 for p in pred if p == label), sum(1 for g in gold if g == label))


def post_level(gold: Sequence[LabelSequence], pred: Sequence[LabelSequence]) -> dict:
    """Per-class P/R/F1 pooled over every post of every timeline, plus the label macro."""
    totals = {lab: ClassCounts() for lab in LABELS}
    for g, p in pair_sequences(gold, pred):
        for lab in LABELS:
            totals[lab] = totals[lab] + class_counts(g.labels, p.labels, lab)
    out = {lab.value: totals[lab].as_dict() for lab in TABLE_LABELS}
    out["macro"] = {
        m: _label_macro(totals[lab].as_dict()[m] for lab in LABELS) for m in ("precision", "recall", "f1")
    }
    return out


# windowed


def match_within_window(gold_idx: Sequence[int], pred_idx: Sequence[int], w: int) -> list[tuple[int, int]]:
    """Maximum one-to-one matching of gold and predicted positions at distance <= w.

    Every gold position's admissible interval has the same width, so scanning
    gold positions in order and taking the leftmost free prediction that is
    still in range is optimal.
    """
    if w < 0:
        raise ValueError("window must be >= 0")
    g = sorted(gold_idx)
    p = sorted(pred_idx)
    pairs = []
    j = 0
    for gi in g:
        while j < len(p) and p[j] < gi - w:
            j += 1
        if j < len(p) and p[j] <= gi + w:
            pairs.append((gi, p[j]))
            j += 1
    return pairs


def windowed(gold: LabelSequence, pred: LabelSequence, label: Label, w: int) -> tuple[float | None, float | None]:
    """(P_w, R_w) for one timeline and label."""
    _check_pair(gold, pred)
    g = gold.indices(label)
    p = pred.indices(label)
    tp = len(match_within_window(g, p, w))
    return _ratio(tp, len(p)), _ratio(tp, len(g))


def windowed_macro(
    gold: Sequence[LabelSequence], pred: Sequence[LabelSequence], label: Label, w: int
) -> tuple[float | None, float | None]:
    """(P_w, R_w) averaged over the timelines where each is defined."""
    vals = [windowed(g, p, label, w) for g, p in pair_sequences(gold, pred)]
    return _mean_defined(v[0] for v in vals), _mean_defined(v[1] for v in vals)


# coverage


def region_overlap(a: Region, b: Region) -> float:
    """Intersection over union of two contiguous index ranges."""
    inter = min(a.end, b.end) - max(a.start, b.start) + 1
    if inter <= 0:
        return 0.0
    return inter / (len(a) + len(b) - inter)


def _weighted_best_overlap(targets: list[Region], others: list[Region]) -> float | None:
    total = sum(len(r) for r in targets)
    if not total:
        return None
    score = sum(len(r) * max((region_overlap(r, o) for o in others), default=0.0) for r in targets)
    return score / total


def coverage(gold: LabelSequence, pred: LabelSequence, label: Label) -> tuple[float | None, float | None]:
    """(C_p, C_r) for one timeline and label."""
    _check_pair(gold, pred)
    if not len(gold):
        return None, None
    rg = [r for r in extract_regions(gold) if r.label == label]
    rm = [r for r in extract_regions(pred) if r.label == label]
    return _weighted_best_overlap(rm, rg), _weighted_best_overlap(rg, rm)


def coverage_macro(
    gold: Sequence[LabelSequence], pred: Sequence[LabelSequence], label: Label
) -> tuple[float | None, float | None]:
    vals = [coverage(g, p, label) for g, p in pair_sequences(gold, pred)]
    return _mean_defined(v[0] for v in vals), _mean_defined(v[1] for v in vals)


# recall by escalation length


def _bucket_name(length: int, edges: Sequence[int] | None) -> str:
    if not edges:
        return str(length)
    edges = sorted(edges)
    for lo, hi in zip(edges, edges[1:]):
        if lo <= length < hi:
            return str(lo) if hi - lo == 1 else f"{lo}-{hi - 1}"
    if length >= edges[-1]:
        return f"{edges[-1]}+"
    return f"<{edges[0]}"


def recall_by_region_length(
    gold: Sequence[LabelSequence],
    pred: Sequence[LabelSequence],
    label: Label = Label.IE,
    buckets: Sequence[int] | None = None,
) -> dict[str, dict]:
    """Post recall grouped by the length of the gold region each post belongs to.

    ``buckets`` are ascending lower edges (e.g. ``[1, 2, 5, 10]``); without
    them every distinct length is its own bucket.
    """
    table: dict[str, list[int]] = {}  # bucket -> [shortest length, posts, correct]
    for g, p in pair_sequences(gold, pred):
        if not len(g):
            continue
        for r in extract_regions(g):
            if r.label != label:
                continue
            row = table.setdefault(_bucket_name(len(r), buckets), [len(r), 0, 0])
            row[0] = min(row[0], len(r))
            row[1] += len(r)
            row[2] += sum(1 for i in r.indices if p.labels[i] == label)
    return {
        name: {"posts": posts, "correct": correct, "recall": correct / posts}
        for name, (_, posts, correct) in sorted(table.items(), key=lambda kv: kv[1][0])
    }


# full report


def per_timeline(gold: LabelSequence, pred: LabelSequence, windows: Sequence[int], labels: Sequence[Label]) -> dict:
    out = {"timeline_id": gold.timeline_id, "posts": len(gold), "windowed": {}, "coverage": {}}
    for w in windows:
        out["windowed"][f"w={w}"] = {}
        for lab in labels:
            pw, rw = windowed(gold, pred, lab, w)
            out["windowed"][f"w={w}"][lab.value] = {"precision": pw, "recall": rw}
    for lab in labels:
        cp, cr = coverage(gold, pred, lab)
        out["coverage"][lab.value] = {"C_p": cp, "C_r": cr}
    return out


def evaluate(
    gold: Sequence[LabelSequence],
    pred: Sequence[LabelSequence],
    windows: Sequence[int] = DEFAULT_WINDOWS,
    labels: Sequence[Label] = TABLE_LABELS,
    include_per_timeline: bool = False,
    length_buckets: Sequence[int] | None = None,
) -> dict:
    """Full report: post-level, windowed per ``w``, coverage, and escalation recall by length."""
    labels = [Label.parse(x) for x in labels]
    pairs = pair_sequences(gold, pred)
    gs = [g for g, _ in pairs]
    ps = [p for _, p in pairs]
    report: dict = {
        "meta": {
            "timelines": len(pairs),
            "posts": sum(len(g) for g in gs),
            "windows": list(windows),
            "labels": [lab.value for lab in labels],
        },
        "post_level": post_level(gs, ps),
        "windowed": {},
        "coverage": {},
    }
    for w in windows:
        block = {}
        for lab in labels:
            pw, rw = windowed_macro(gs, ps, lab, w)
            block[lab.value] = {"precision": pw, "recall": rw}
        block["macro"] = {
            "precision": _label_macro(block[lab.value]["precision"] for lab in labels),
            "recall": _label_macro(block[lab.value]["recall"] for lab in labels),
        }
        report["windowed"][f"w={w}"] = block
    for lab in labels:
        cp, cr = coverage_macro(gs, ps, lab)
        report["coverage"][lab.value] = {"C_p": cp, "C_r": cr}
    report["coverage"]["macro"] = {
        "C_p": _label_macro(report["coverage"][lab.value]["C_p"] for lab in labels),
        "C_r": _label_macro(report["coverage"][lab.value]["C_r"] for lab in labels),
    }
    report["recall_by_region_length"] = recall_by_region_length(gs, ps, Label.IE, length_buckets)
    if include_per_timeline:
        report["per_timeline"] = [per_timeline(g, p, windows, labels) for g, p in pairs]
    return report


def flatten_report(report: Mapping) -> list[dict]:
    """Rows of (section, label, window, metric, value) for delimited export."""
    rows = []
    for lab, vals in report["post_level"].items():
        for m in ("precision", "recall", "f1"):
            rows.append({"section": "post_level", "label": lab, "window": "", "metric": m, "value": vals[m]})
    for wkey, block in report["windowed"].items():
        for lab, vals in block.items():
            for m, v in vals.items():
                rows.append({"section": "windowed", "label": lab, "window": wkey[2:], "metric": m, "value": v})
    for lab, vals in report["coverage"].items():
        for m, v in vals.items():
            rows.append({"section": "coverage", "label": lab, "window": "", "metric": m, "value": v})
    for bucket, vals in report.get("recall_by_region_length", {}).items():
        rows.append(
            {"section": "recall_by_region_length", "label": "IE", "window": bucket, "metric": "recall", "value": vals["recall"]}
        )
    return rows


def report_to_csv(report: Mapping) -> str:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["section", "label", "window", "metric", "value"], lineterminator="\n")
    writer.writeheader()
    for row in flatten_report(report):
        row = dict(row)
        row["value"] = "" if row["value"] is None else repr(float(row["value"]))
        writer.writerow(row)
    return buf.getvalue()
