import itertools
from datetime import date, datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moctk.core import (
    LABELS,
    AlignmentError,
    EmptySequence,
    InvalidFoldCount,
    Label,
    LabelSequence,
    Post,
    Region,
    Timeline,
    extract_regions,
    split_folds,
)
from oracles import runs_by_scanning

O, IS, IE = Label.O, Label.IS, Label.IE
labels_st = st.lists(st.sampled_from(LABELS), min_size=1, max_size=40)


def seq(*labels):
    return LabelSequence("t", labels)


def test_regions_escalation_in_middle():
    assert extract_regions(seq(O, IE, IE, O)) == [Region(O, 0, 0), Region(IE, 1, 2), Region(O, 3, 3)]


def test_regions_single_run():
    assert extract_regions(seq(O, O, O)) == [Region(O, 0, 2)]


def test_regions_alternating_singletons():
    assert extract_regions(seq(IS, IE, IS)) == [Region(IS, 0, 0), Region(IE, 1, 1), Region(IS, 2, 2)]


def test_regions_empty_raises():
    with pytest.raises(EmptySequence):
        extract_regions(LabelSequence("t", ()))


def test_regions_match_scanner_exhaustively():
    for n in range(1, 7):
        for labels in itertools.product(LABELS, repeat=n):
            got = [(r.label, r.start, r.end) for r in extract_regions(labels)]
            assert got == runs_by_scanning(labels)


@given(labels_st)
def test_regions_partition_sequence(labels):
    regions = extract_regions(labels)
    assert sum(len(r) for r in regions) == len(labels)
    assert all(a.label != b.label for a, b in zip(regions, regions[1:]))
    rebuilt = [r.label for r in regions for _ in r.indices]
    assert rebuilt == labels


def test_label_order_is_o_is_ie():
    assert sorted([IE, O, IS]) == [O, IS, IE]


def test_label_parse_rejects_unknown():
    with pytest.raises(Exception):
        Label.parse("X")


def test_folds_corpus_scale():
    ids = [f"t{i}" for i in range(500)]
    folds = split_folds(ids, 5, seed=3)
    assert folds.sizes() == [100] * 5


def test_folds_deterministic():
    ids = [f"t{i}" for i in range(10)]
    assert split_folds(ids, 5, 7).folds == split_folds(ids, 5, 7).folds


def test_folds_balanced_uneven():
    folds = split_folds([f"t{i}" for i in range(11)], 5, 0)
    assert sorted(folds.sizes(), reverse=True) == [3, 2, 2, 2, 2]


def test_folds_too_many():
    with pytest.raises(InvalidFoldCount):
        split_folds(["a", "b"], 3)


@given(st.integers(2, 8), st.integers(0, 40), st.integers(0, 1000))
def test_folds_partition(k, extra, seed):
    ids = [f"id{i}" for i in range(k + extra)]
    folds = split_folds(ids, k, seed)
    assert sorted(folds.folds) == sorted(ids)
    sizes = folds.sizes()
    assert max(sizes) - min(sizes) <= 1


def _post(pid, ts, user="u"):
    return Post(user, pid, datetime.fromisoformat(ts).replace(tzinfo=timezone.utc), "x")


def test_timeline_orders_by_time_then_post_id():
    posts = (_post("b", "2021-01-01T10:00:00"), _post("a", "2021-01-01T10:00:00"), _post("c", "2021-01-01T09:00:00"))
    tl = Timeline("t", "u", posts, date(2021, 1, 1))
    assert tl.post_ids == ["c", "a", "b"]
    assert tl.out_of_bounds


def test_timeline_rejects_foreign_posts():
    with pytest.raises(Exception):
        Timeline("t", "u", (_post("a", "2021-01-01T00:00:00", user="v"),), date(2021, 1, 1))


def test_alignment_check():
    tl = Timeline("t", "u", tuple(_post(f"p{i}", f"2021-01-01T00:00:0{i}") for i in range(10)), date(2021, 1, 1))
    with pytest.raises(AlignmentError):
        LabelSequence("t", (O,) * 9).check_aligned(tl)
    LabelSequence("t", (O,) * 10).check_aligned(tl)
