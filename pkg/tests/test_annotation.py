import itertools
from datetime import date, datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moctk.annotation import (
    aggregate,
    agreement_table,
    derive_gold,
    label_counts,
    positive_agreement,
    resolve_votes,
)
from moctk.core import AlignmentError, Annotation, AnnotationSet, DataError, Label, Post, Timeline

IS, IE, O = Label.IS, Label.IE, Label.O


def make_timeline(tid="t", n=10):
    posts = tuple(Post("u", f"p{i}", datetime(2021, 1, 1, i, tzinfo=timezone.utc), "") for i in range(n))
    return Timeline(tid, "u", posts, date(2021, 1, 1))


def ann_from_sets(label, sets, tid="t"):
    recs = [Annotation(tid, f"p{i}", a, label) for a, posts in sets.items() for i in posts]
    return AnnotationSet.from_records(recs)


def test_hand_example_perfect_and_majority():
    ann = ann_from_sets(IS, {"A1": {1, 2}, "A2": {2, 3}, "A3": {2}})
    assert positive_agreement(ann, IS, "perfect") == pytest.approx(1 / 3)
    assert positive_agreement(ann, IS, "majority") == pytest.approx(1 / 3)


def test_identical_annotators_agree_fully():
    ann = ann_from_sets(IE, {a: {1, 4, 5} for a in ("A1", "A2", "A3")})
    assert positive_agreement(ann, IE, "perfect") == 1
    assert positive_agreement(ann, IE, "majority") == 1


def test_unused_label_is_undefined():
    ann = ann_from_sets(IS, {"A1": {1}, "A2": {1}})
    assert positive_agreement(ann, IE) is None


def test_needs_two_annotators():
    with pytest.raises(DataError):
        positive_agreement(ann_from_sets(IS, {"A1": {1}}), IS)


def test_implicit_o_with_timelines():
    ann = ann_from_sets(IS, {"A1": {1}, "A2": {2}})
    table = agreement_table(ann, [make_timeline(n=4)])
    # posts 0 and 3 are O for both annotators, 1 and 2 for one each
    assert table["O"]["perfect"] == pytest.approx(2 / 4)


@pytest.mark.parametrize(
    "votes,expected",
    [((IS, IS, O), IS), ((IS, IE, O), O), ((IE, IE, IS), IE), ((IS, IS, IE), IS), ((O, O, O), O)],
)
def test_vote_rule(votes, expected):
    for perm in itertools.permutations(votes):
        assert resolve_votes(perm) == expected


def test_derive_gold_and_roles():
    tl = make_timeline(n=5)
    recs = [
        Annotation("t", "p1", a, IS, "switch_start") for a in ("A1", "A2")
    ] + [Annotation("t", "p1", "A3", O)] + [
        Annotation("t", "p3", a, IE, "escalation_peak") for a in ("A1", "A2", "A3")
    ]
    gold = derive_gold(AnnotationSet.from_records(recs), tl)
    assert gold.labels == (O, IS, O, IE, O)
    assert gold.extra["roles"] == ["none", "switch_start", "none", "escalation_peak", "none"]


def test_unknown_post_raises():
    ann = AnnotationSet.from_records([Annotation("t", "zz", "A1", IS)])
    with pytest.raises(AlignmentError):
        derive_gold(ann, make_timeline())


def test_unknown_timeline_raises():
    ann = AnnotationSet.from_records([Annotation("other", "p1", "A1", IS)])
    with pytest.raises(AlignmentError):
        aggregate(ann, [make_timeline()])


def test_aggregate_counts():
    ann = ann_from_sets(IS, {"A1": {0, 1}, "A2": {1}, "A3": {1, 2}})
    gold = aggregate(ann, [make_timeline(n=4)])
    assert label_counts(gold) == {"O": 3, "IS": 1, "IE": 0}


sets_strategy = st.lists(st.frozensets(st.integers(0, 15), max_size=10), min_size=2, max_size=5)


@settings(max_examples=100, deadline=None)
@given(sets_strategy)
def test_perfect_never_exceeds_majority(sets):
    ann = ann_from_sets(IS, {f"A{i}": s for i, s in enumerate(sets)})
    if len(ann.annotators) < 2:
        return
    p = positive_agreement(ann, IS, "perfect")
    m = positive_agreement(ann, IS, "majority")
    if p is None:
        assert m is None
    else:
        assert 0 <= p <= m <= 1


@settings(max_examples=50, deadline=None)
@given(sets_strategy, st.randoms())
def test_agreement_invariant_to_annotator_order(sets, rnd):
    names = [f"A{i}" for i in range(len(sets))]
    shuffled = names[:]
    rnd.shuffle(shuffled)
    a = ann_from_sets(IS, dict(zip(names, sets)))
    b = ann_from_sets(IS, dict(zip(shuffled, sets)))
    if len(a.annotators) < 2:
        return
    for mode in ("perfect", "majority"):
        assert positive_agreement(a, IS, mode) == positive_agreement(b, IS, mode)
