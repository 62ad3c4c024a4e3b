from collections import Counter

import numpy as np
import pytest

from moctk import io as mio
from moctk.annotation import aggregate
from moctk.core import Label
from moctk.extraction import extract_all
from moctk.synth import (
    ConfigError,
    SynthConfig,
    exact_label_sequences,
    generate,
    neighbor_contrast_dataset,
    plant_labels,
)


@pytest.fixture(scope="module")
def small():
    return generate(SynthConfig(n_users=25, seed=7))


def test_noise_free_annotations_reproduce_gold(small):
    gold = aggregate(small.annotations, small.timelines)
    assert [g.labels for g in gold] == [g.labels for g in sorted(small.gold, key=lambda g: g.timeline_id)]


def test_timelines_are_re_extractable(small):
    found, _ = extract_all(small.posts)
    ids = {t.timeline_id for t in found}
    assert {t.timeline_id for t in small.timelines} <= ids


def test_deterministic_per_seed():
    a = generate(SynthConfig(n_users=8, seed=3))
    b = generate(SynthConfig(n_users=8, seed=3))
    assert [p.text for p in a.posts] == [p.text for p in b.posts]
    assert a.gold == b.gold


def test_planted_frequencies():
    cfg = SynthConfig()
    rng = np.random.default_rng(0)
    counts = Counter()
    while sum(counts.values()) < 100_000:
        labels, _ = plant_labels(int(rng.integers(10, 150)), cfg, rng)
        counts.update(labels)
    total = sum(counts.values())
    for lab, p in cfg.priors.items():
        assert counts[Label(lab)] / total == pytest.approx(p, abs=0.01)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"base_rate": 0},
        {"change_day": 99},
        {"priors": {"O": 0.5, "IS": 0.1, "IE": 0.1}},
        {"annotator_noise": (0.1,)},
        {"escalation_length": (1, 3)},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        generate(SynthConfig(**kwargs))


def test_files_load_strictly(tmp_path, small):
    mio.write_posts(tmp_path / "posts.jsonl", small.posts)
    mio.write_timelines(tmp_path / "tl.jsonl", small.timelines)
    mio.write_labels(tmp_path / "gold.jsonl", small.gold)
    mio.write_annotations(tmp_path / "ann.jsonl", small.annotations)
    posts = mio.read_posts(tmp_path / "posts.jsonl", strict=True)
    tls = mio.read_timelines(tmp_path / "tl.jsonl", posts, strict=True)
    gold = mio.read_labels(tmp_path / "gold.jsonl", tls, strict=True)
    ann = mio.read_annotations(tmp_path / "ann.jsonl", strict=True)
    assert len(tls) == len(small.timelines) and len(gold) == len(small.gold)
    assert len(ann) == len(small.annotations)


def test_exact_label_sequences():
    seqs = exact_label_sequences({"O": 10, "IE": 3, "IS": 2}, 4)
    c = Counter(x for s in seqs for x in s.labels)
    assert c == {Label.O: 10, Label.IE: 3, Label.IS: 2}


def test_neighbor_contrast_shapes():
    X, y, lengths = neighbor_contrast_dataset(n_timelines=5, length=12, seed=1)
    assert X.shape == (60, 1) and len(y) == 60 and lengths == [12] * 5
    assert set(np.unique(y)) <= {0, 1, 2}
