"""JSON Lines readers and writers for the canonical file formats.

Every record type round-trips losslessly: reading a canonical file and
writing it back produces identical bytes. Unknown fields are kept on read
(and written back after the known ones) unless ``strict=True``, in which
case they are rejected.
"""

from __future__ import annotations

import json
import logging
from datetime import date
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping

import numpy as np

from .core import (
    AlignmentError,
    Annotation,
    AnnotationSet,
    DataError,
    Label,
    LabelSequence,
    ParseError,
    Post,
    Timeline,
    format_timestamp,
    parse_timestamp,
)

log = logging.getLogger(__name__)

POST_FIELDS = ("user_id", "post_id", "timestamp", "text")
TIMELINE_FIELDS = ("timeline_id", "user_id", "anchor", "post_ids")
LABEL_FIELDS = ("timeline_id", "labels")
#: Optional fields a loader accepts even in strict mode; kept in ``extra``.
OPTIONAL_FIELDS = {LABEL_FIELDS: ("roles",)}
ANNOTATION_FIELDS = ("timeline_id", "post_id", "annotator_id", "label", "role")
VECTOR_FIELDS = ("timeline_id", "post_id", "vector")


def _dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False)


def _iter_json_lines(path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
            if not isinstance(obj, dict):
                raise ParseError("record is not a JSON object", lineno)
            yield lineno, obj


def _split(obj: dict, known: tuple[str, ...], lineno: int, strict: bool) -> dict | None:
    missing = [k for k in known if k not in obj]
    if missing:
        raise ParseError(f"missing field(s) {', '.join(missing)}", lineno)
    extra = {k: v for k, v in obj.items() if k not in known}
    unknown = sorted(set(extra) - set(OPTIONAL_FIELDS.get(known, ())))
    if unknown and strict:
        raise ParseError(f"unknown field(s) {', '.join(unknown)}", lineno)
    return extra or None


def _record(known: Mapping[str, Any], extra: Mapping[str, Any] | None) -> dict:
    out = dict(known)
    if extra:
        out.update(extra)
    return out


def _write_lines(path, records: Iterable[dict]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(_dumps(rec))
            fh.write("\n")


def _read(path, known, build: Callable[[dict, dict | None], Any], strict: bool) -> list:
    out = []
    for lineno, obj in _iter_json_lines(path):
        extra = _split(obj, known, lineno, strict)
        try:
            out.append(build(obj, extra))
        except ParseError:
            raise
        except (DataError, TypeError, ValueError) as exc:
            raise ParseError(str(exc), lineno) from None
    return out


# posts


def read_posts(path, strict: bool = False) -> list[Post]:
    def build(o, extra):
        if not isinstance(o["text"], str):
            raise DataError("text must be a string")
        return Post(str(o["user_id"]), str(o["post_id"]), parse_timestamp(o["timestamp"]), o["text"], extra)

    posts = _read(path, POST_FIELDS, build, strict)
    seen = set()
    for p in posts:
        if p.post_id in seen:
            raise DataError(f"duplicate post_id {p.post_id!r} in {path}")
        seen.add(p.post_id)
    return posts


def post_record(p: Post) -> dict:
    return _record(
        {"user_id": p.user_id, "post_id": p.post_id, "timestamp": format_timestamp(p.timestamp), "text": p.text},
        p.extra,
    )


def write_posts(path, posts: Iterable[Post]) -> None:
    _write_lines(path, (post_record(p) for p in posts))


# timelines


def read_timelines(path, posts: Iterable[Post] | Mapping[str, Post], strict: bool = False) -> list[Timeline]:
    """Read timeline records, resolving ``post_ids`` against ``posts``.

    Timelines outside the 10-150 post range are accepted but logged.
    """
    by_id = posts if isinstance(posts, Mapping) else {p.post_id: p for p in posts}

    def build(o, extra):
        ids = o["post_ids"]
        if not isinstance(ids, list):
            raise DataError("post_ids must be a list")
        try:
            members = tuple(by_id[str(i)] for i in ids)
        except KeyError as exc:
            raise DataError(f"unknown post_id {exc.args[0]!r}") from None
        tl = Timeline(str(o["timeline_id"]), str(o["user_id"]), members, date.fromisoformat(o["anchor"]), extra)
        if tl.post_ids != [str(i) for i in ids]:
            raise DataError(f"timeline {tl.timeline_id}: post_ids not in (timestamp, post_id) order")
        if tl.out_of_bounds:
            log.warning("timeline %s has %d posts (outside 10-150)", tl.timeline_id, len(tl))
        return tl

    timelines = _read(path, TIMELINE_FIELDS, build, strict)
    _check_unique((t.timeline_id for t in timelines), "timeline_id", path)
    return timelines


def timeline_record(t: Timeline) -> dict:
    return _record(
        {"timeline_id": t.timeline_id, "user_id": t.user_id, "anchor": t.anchor.isoformat(), "post_ids": t.post_ids},
        t.extra,
    )


def write_timelines(path, timelines: Iterable[Timeline]) -> None:
    _write_lines(path, (timeline_record(t) for t in timelines))


# labels


def read_labels(path, timelines: Iterable[Timeline] | None = None, strict: bool = False) -> list[LabelSequence]:
    """Read a gold or predicted labels file; optionally check alignment."""

    def build(o, extra):
        if not isinstance(o["labels"], list):
            raise DataError("labels must be a list")
        return LabelSequence(str(o["timeline_id"]), tuple(o["labels"]), extra)

    seqs = _read(path, LABEL_FIELDS, build, strict)
    _check_unique((s.timeline_id for s in seqs), "timeline_id", path)
    if timelines is not None:
        check_alignment(seqs, timelines)
    return seqs


def check_alignment(seqs: Iterable[LabelSequence], timelines: Iterable[Timeline]) -> None:
    by_id = {t.timeline_id: t for t in timelines}
    for s in seqs:
        if s.timeline_id not in by_id:
            raise AlignmentError(f"labels reference unknown timeline {s.timeline_id!r}")
        s.check_aligned(by_id[s.timeline_id])


def label_record(s: LabelSequence) -> dict:
    return _record({"timeline_id": s.timeline_id, "labels": [x.value for x in s.labels]}, s.extra)


def write_labels(path, seqs: Iterable[LabelSequence]) -> None:
    _write_lines(path, (label_record(s) for s in seqs))


# annotations


def read_annotations(path, strict: bool = False) -> AnnotationSet:
    def build(o, extra):
        return Annotation(
            str(o["timeline_id"]), str(o["post_id"]), str(o["annotator_id"]), Label.parse(o["label"]), o["role"], extra
        )

    recs = _read(path, ANNOTATION_FIELDS, build, strict)
    return AnnotationSet.from_records(recs)


def annotation_record(a: Annotation) -> dict:
    return _record(
        {
            "timeline_id": a.timeline_id,
            "post_id": a.post_id,
            "annotator_id": a.annotator_id,
            "label": a.label.value,
            "role": a.role,
        },
        a.extra,
    )


def write_annotations(path, ann: AnnotationSet | Iterable[Annotation]) -> None:
    _write_lines(path, (annotation_record(a) for a in ann))


# external vectors


def read_vectors(path) -> dict[tuple[str, str], np.ndarray]:
    """Read per-post representation vectors keyed by (timeline_id, post_id)."""
    out = {}
    dim = None
    for lineno, o in _iter_json_lines(path):
        _split(o, VECTOR_FIELDS, lineno, strict=False)
        vec = np.asarray(o["vector"], dtype=float)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise ParseError("vector must be a finite 1-d list of numbers", lineno)
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise ParseError(f"vector dimension {vec.shape[0]} != {dim}", lineno)
        out[(str(o["timeline_id"]), str(o["post_id"]))] = vec
    return out


def write_vectors(path, vectors: Mapping[tuple[str, str], np.ndarray]) -> None:
    _write_lines(
        path,
        ({"timeline_id": t, "post_id": p, "vector": [float(x) for x in v]} for (t, p), v in vectors.items()),
    )


# reports


def read_report(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report JSON: {exc.msg}", exc.lineno) from None


def write_report(path, report: Mapping) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def write_json(path, obj: Mapping) -> None:
    write_report(path, obj)


def _check_unique(ids: Iterable[str], what: str, path) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise DataError(f"duplicate {what} {i!r} in {path}")
        seen.add(i)
