from moctk.core import Label, LabelSequence
from moctk.metrics import evaluate
from moctk.plotting import render_figures
from moctk.reporting import fmt, render_csv, render_table

O, IS, IE = Label.O, Label.IS, Label.IE


def _report():
    gold = [LabelSequence("a", (O, IS, IE, IE, O)), LabelSequence("b", (O, O, IE, O, O))]
    pred = [LabelSequence("a", (O, O, IS, IE, O)), LabelSequence("b", (O, O, O, O, O))]
    return evaluate(gold, pred)


def test_fmt():
    assert fmt(0.8448) == ".845"
    assert fmt(1.0) == "1.000"
    assert fmt(None) == "--"


def test_table_and_csv():
    reps = {"M1": _report(), "M2": _report()}
    table = render_table(reps)
    assert table.count("M1") == 1 + 4  # one table row, one windowed line per w
    assert "C_p" in table
    lines = render_csv(reps).splitlines()
    assert len(lines) == 3 and len(lines[0].split(",")) == 1 + 12 + 8


def test_figures_written_and_reproducible(tmp_path):
    reps = {"M1": _report()}
    first = render_figures(reps, tmp_path / "a")
    second = render_figures(reps, tmp_path / "b")
    assert [p.name for p in first] == ["windowed.png", "coverage.png", "recall_by_length.png"]
    for a, b in zip(first, second):
        assert a.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert a.read_bytes() == b.read_bytes()
