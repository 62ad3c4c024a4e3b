"""Domain types shared by every module: posts, timelines, labels and regions."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Any, Iterable, Mapping, Sequence

MIN_TIMELINE_POSTS = 10
MAX_TIMELINE_POSTS = 150


class MocError(Exception):
    """Base class for all toolkit errors."""


class DataError(MocError):
    """Input data violates a contract (maps to CLI exit code 2)."""


class EmptySequence(DataError):
    pass


class InvalidFoldCount(DataError):
    pass


class AlignmentError(DataError):
    pass


class NumericalError(MocError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Label(str, enum.Enum):
    O = "O"
    IS = "IS"
    IE = "IE"

    @property
    def rank(self) -> int:
        return _LABEL_RANK[self]

    def __lt__(self, other):
        if not isinstance(other, Label):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other):
        if not isinstance(other, Label):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other):
        if not isinstance(other, Label):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other):
        if not isinstance(other, Label):
            return NotImplemented
        return self.rank >= other.rank

    @classmethod
    def parse(cls, value) -> "Label":
        if isinstance(value, Label):
            return value
        try:
            return cls(value)
        except ValueError:
            raise DataError(f"invalid label {value!r}; expected one of O, IS, IE") from None


_LABEL_RANK = {Label.O: 0, Label.IS: 1, Label.IE: 2}

#: Deterministic label order used for serialization and reporting (O < IS < IE).
LABELS: tuple[Label, ...] = (Label.O, Label.IS, Label.IE)
#: Column order of the published results table.
TABLE_LABELS: tuple[Label, ...] = (Label.IS, Label.IE, Label.O)


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (AttributeError, ValueError):
        raise DataError(f"unparseable timestamp {value!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S+00:00")


@dataclass(frozen=True)
class Post:
    user_id: str
    post_id: str
    timestamp: datetime
    text: str = ""
    extra: Mapping[str, Any] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))
        if self.text is None:
            raise DataError(f"post {self.post_id}: text must be present")

    @property
    def day(self) -> date:
        return self.timestamp.astimezone(timezone.utc).date()


def _post_order(post: Post):
    return (post.timestamp, post.post_id)


@dataclass(frozen=True)
class Timeline:
    """Ordered posts of one user around a detected change point.

    Posts are sorted by timestamp, ties broken by ascending ``post_id``.
    """

    timeline_id: str
    user_id: str
    posts: tuple[Post, ...]
    anchor: date
    extra: Mapping[str, Any] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.posts:
            raise DataError(f"timeline {self.timeline_id} has no posts")
        for p in self.posts:
            if p.user_id != self.user_id:
                raise DataError(
                    f"timeline {self.timeline_id}: post {p.post_id} belongs to user {p.user_id}"
                )
        object.__setattr__(self, "posts", tuple(sorted(self.posts, key=_post_order)))

    def __len__(self) -> int:
        return len(self.posts)

    @property
    def post_ids(self) -> list[str]:
        return [p.post_id for p in self.posts]

    @property
    def out_of_bounds(self) -> bool:
        """True when the length falls outside the range used for extracted timelines."""
        return not (MIN_TIMELINE_POSTS <= len(self.posts) <= MAX_TIMELINE_POSTS)


@dataclass(frozen=True)
class LabelSequence:
    timeline_id: str
    labels: tuple[Label, ...]
    extra: Mapping[str, Any] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(Label.parse(x) for x in self.labels))

    def __len__(self) -> int:
        return len(self.labels)

    def indices(self, label: Label) -> list[int]:
        return [i for i, x in enumerate(self.labels) if x == label]

    def check_aligned(self, timeline: Timeline) -> None:
        if len(self.labels) != len(timeline.posts):
            raise AlignmentError(
                f"timeline {self.timeline_id}: {len(self.labels)} labels for "
                f"{len(timeline.posts)} posts"
            )


@dataclass(frozen=True)
class Region:
    label: Label
    start: int
    end: int  # inclusive

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"region start {self.start} > end {self.end}")

    def __len__(self) -> int:
        return self.end - self.start + 1

    @property
    def indices(self) -> range:
        return range(self.start, self.end + 1)


def extract_regions(seq: LabelSequence | Sequence[Label]) -> list[Region]:
    """Split a label sequence into maximal runs of identical labels."""
    labels = seq.labels if isinstance(seq, LabelSequence) else tuple(Label.parse(x) for x in seq)
    if not labels:
        raise EmptySequence("cannot extract regions from an empty sequence")
    regions = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            regions.append(Region(labels[start], start, i - 1))
            start = i
    return regions


@dataclass(frozen=True)
class FoldAssignment:
    folds: Mapping[str, int]
    k: int

    def members(self, fold: int) -> list[str]:
        return sorted(t for t, f in self.folds.items() if f == fold)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for f in self.folds.values():
            counts[f] += 1
        return counts


def split_folds(timeline_ids: Iterable[str], k: int = 5, seed: int = 0) -> FoldAssignment:
    """Randomly assign whole timelines to ``k`` folds of near-equal size."""
    ids = sorted(set(timeline_ids))
    if k < 2:
        raise InvalidFoldCount(f"k must be >= 2, got {k}")
    if k > len(ids):
        raise InvalidFoldCount(f"cannot split {len(ids)} timelines into {k} folds")
    random.Random(seed).shuffle(ids)
    return FoldAssignment({tid: i % k for i, tid in enumerate(ids)}, k)


@dataclass(frozen=True)
class Annotation:
    timeline_id: str
    post_id: str
    annotator_id: str
    label: Label
    role: str = "none"
    extra: Mapping[str, Any] | None = field(default=None, compare=False, repr=False)

    ROLES = ("switch_start", "escalation_peak", "in_region", "none")

    def __post_init__(self):
        object.__setattr__(self, "label", Label.parse(self.label))
        if self.role not in self.ROLES:
            raise DataError(f"invalid role {self.role!r}")


@dataclass
class AnnotationSet:
    """Per-annotator post labels keyed by (timeline_id, post_id, annotator_id)."""

    records: dict[tuple[str, str, str], Annotation] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[Annotation]) -> "AnnotationSet":
        out = cls()
        for r in records:
            out.add(r)
        return out

    def add(self, rec: Annotation) -> None:
        key = (rec.timeline_id, rec.post_id, rec.annotator_id)
        if key in self.records:
            raise DataError(f"duplicate annotation for {key}")
        self.records[key] = rec

    def __iter__(self):
        return iter(self.records.values())

    def __len__(self) -> int:
        return len(self.records)

    @property
    def annotators(self) -> list[str]:
        return sorted({k[2] for k in self.records})

    @property
    def timeline_ids(self) -> list[str]:
        return sorted({k[0] for k in self.records})

    def for_timeline(self, timeline_id: str) -> list[Annotation]:
        return [r for k, r in self.records.items() if k[0] == timeline_id]
