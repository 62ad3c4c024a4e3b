import json
from datetime import date, datetime, timezone

import pytest

from moctk import io as mio
from moctk.core import AlignmentError, Annotation, AnnotationSet, DataError, Label, LabelSequence, ParseError, Post, Timeline


def _posts(n=10, user="u1"):
    return [
        Post(user, f"{user}-{i:02d}", datetime(2021, 3, 1, 12, i, tzinfo=timezone.utc), f"post {i} é❤")
        for i in range(n)
    ]


def test_empty_files_give_empty_collections(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("")
    assert mio.read_posts(p) == []
    assert mio.read_labels(p) == []
    assert len(mio.read_annotations(p)) == 0
    assert mio.read_timelines(p, []) == []


def test_posts_round_trip_bytes(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    mio.write_posts(a, _posts())
    mio.write_posts(b, mio.read_posts(a))
    assert a.read_bytes() == b.read_bytes()
    assert mio.read_posts(a) == _posts()


def test_timelines_labels_annotations_round_trip(tmp_path):
    posts = _posts()
    tl = Timeline("t1", "u1", tuple(posts), date(2021, 3, 1))
    mio.write_timelines(tmp_path / "t.jsonl", [tl])
    assert mio.read_timelines(tmp_path / "t.jsonl", posts) == [tl]

    seq = LabelSequence("t1", (Label.O,) * 8 + (Label.IE, Label.IS))
    mio.write_labels(tmp_path / "l.jsonl", [seq])
    assert mio.read_labels(tmp_path / "l.jsonl", [tl]) == [seq]

    ann = AnnotationSet.from_records([Annotation("t1", posts[0].post_id, "a1", Label.IS, "switch_start")])
    mio.write_annotations(tmp_path / "a.jsonl", ann)
    back = mio.read_annotations(tmp_path / "a.jsonl")
    assert list(back) == list(ann)


def test_canonical_file_rewrites_identically(tmp_path):
    src = tmp_path / "labels.jsonl"
    src.write_text('{"timeline_id": "t1", "labels": ["O", "IE", "IS"]}\n', encoding="utf-8")
    out = tmp_path / "out.jsonl"
    mio.write_labels(out, mio.read_labels(src))
    assert out.read_bytes() == src.read_bytes()


def test_unknown_fields_kept_unless_strict(tmp_path):
    src = tmp_path / "labels.jsonl"
    src.write_text('{"timeline_id": "t1", "labels": ["O"], "source": "m1"}\n', encoding="utf-8")
    seqs = mio.read_labels(src)
    assert seqs[0].extra == {"source": "m1"}
    out = tmp_path / "out.jsonl"
    mio.write_labels(out, seqs)
    assert out.read_bytes() == src.read_bytes()
    with pytest.raises(ParseError):
        mio.read_labels(src, strict=True)


def test_roles_allowed_in_strict_mode(tmp_path):
    src = tmp_path / "gold.jsonl"
    src.write_text('{"timeline_id": "t1", "labels": ["IS"], "roles": ["switch_start"]}\n', encoding="utf-8")
    assert mio.read_labels(src, strict=True)[0].extra == {"roles": ["switch_start"]}


def test_malformed_line_reports_line_number(tmp_path):
    src = tmp_path / "labels.jsonl"
    src.write_text('{"timeline_id": "t1", "labels": ["O"]}\n{not json\n', encoding="utf-8")
    with pytest.raises(ParseError) as err:
        mio.read_labels(src)
    assert err.value.line == 2


def test_invalid_label_is_parse_error(tmp_path):
    src = tmp_path / "labels.jsonl"
    src.write_text('{"timeline_id": "t1", "labels": ["O", "MAYBE"]}\n', encoding="utf-8")
    with pytest.raises(ParseError) as err:
        mio.read_labels(src)
    assert err.value.line == 1


def test_labels_misaligned_with_timeline(tmp_path):
    posts = _posts(10)
    tl = Timeline("t1", "u1", tuple(posts), date(2021, 3, 1))
    mio.write_labels(tmp_path / "l.jsonl", [LabelSequence("t1", (Label.O,) * 9)])
    with pytest.raises(AlignmentError):
        mio.read_labels(tmp_path / "l.jsonl", [tl])


def test_duplicate_post_ids_rejected(tmp_path):
    p = _posts(1)
    mio.write_posts(tmp_path / "p.jsonl", p + p)
    with pytest.raises(DataError):
        mio.read_posts(tmp_path / "p.jsonl")


def test_timeline_unknown_post(tmp_path):
    (tmp_path / "t.jsonl").write_text(
        json.dumps({"timeline_id": "t", "user_id": "u1", "anchor": "2021-03-01", "post_ids": ["nope"]}) + "\n"
    )
    with pytest.raises(ParseError):
        mio.read_timelines(tmp_path / "t.jsonl", _posts())


def test_short_external_timeline_accepted_with_warning(tmp_path, caplog):
    posts = _posts(3)
    mio.write_timelines(tmp_path / "t.jsonl", [Timeline("t", "u1", tuple(posts), date(2021, 3, 1))])
    with caplog.at_level("WARNING"):
        tls = mio.read_timelines(tmp_path / "t.jsonl", posts)
    assert len(tls[0]) == 3 and tls[0].out_of_bounds
    assert "outside 10-150" in caplog.text


def test_timestamps_written_with_utc_offset(tmp_path):
    mio.write_posts(tmp_path / "p.jsonl", _posts(1))
    rec = json.loads((tmp_path / "p.jsonl").read_text(encoding="utf-8"))
    assert rec["timestamp"].endswith("+00:00")


def test_vectors_round_trip(tmp_path):
    import numpy as np

    vecs = {("t", "p1"): np.array([0.5, -1.0]), ("t", "p2"): np.array([0.0, 2.0])}
    mio.write_vectors(tmp_path / "v.jsonl", vecs)
    back = mio.read_vectors(tmp_path / "v.jsonl")
    assert set(back) == set(vecs)
    assert all(np.array_equal(back[k], vecs[k]) for k in vecs)


def test_report_round_trip(tmp_path):
    rep = {"post_level": {"O": {"precision": None}}, "windowed": {}, "coverage": {}}
    mio.write_report(tmp_path / "r.json", rep)
    assert mio.read_report(tmp_path / "r.json") == rep
