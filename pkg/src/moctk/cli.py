"""Command-line entry point: ``moctk <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error. Option defaults can be
overridden through ``MOC_<OPTION>`` environment variables (flags win).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from . import io as mio
from .core import DataError, Label, MocError

log = logging.getLogger("moctk")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def env(name: str, default, cast=str):
    raw = os.environ.get(f"MOC_{name.upper().replace('-', '_')}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"invalid value {raw!r} for MOC_{name.upper()}") from None


def int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("values must be >= 0")
    return vals


def label_list(text: str) -> list[Label]:
    try:
        return [Label(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"labels must be drawn from IS, IE, O; got {text!r}") from None


def _emit(obj, out: str | None) -> None:
    if out:
        mio.write_json(out, obj)
    else:
        json.dump(obj, sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")


def _load_timelines(posts_path, timelines_path):
    posts = mio.read_posts(posts_path)
    return mio.read_timelines(timelines_path, posts)


# subcommands


def cmd_extract(args) -> int:
    from .changepoint import GammaParams
    from .extraction import extract_all, length_summary, sample_timelines

    posts = mio.read_posts(args.posts)
    timelines, summary = extract_all(
        posts,
        GammaParams(args.alpha, args.beta),
        args.hazard,
        args.r_reset,
        args.mass_threshold,
        args.min_gap_days,
        args.window_days,
        args.min_posts,
        args.max_posts,
        args.threads,
    )
    if args.sample is not None:
        timelines = sample_timelines(timelines, args.sample, True, args.seed)
        summary.sampled = len(timelines)
    mio.write_timelines(args.out, timelines)
    _emit({**summary.as_dict(), "lengths": length_summary(timelines)}, args.summary)
    return 0


def cmd_aggregate(args) -> int:
    from .annotation import aggregate

    timelines = _load_timelines(args.posts, args.timelines)
    ann = mio.read_annotations(args.annotations)
    mio.write_labels(args.out, aggregate(ann, timelines))
    return 0


def cmd_iaa(args) -> int:
    from .annotation import agreement_table

    ann = mio.read_annotations(args.annotations)
    timelines = _load_timelines(args.posts, args.timelines) if args.posts and args.timelines else None
    _emit(agreement_table(ann, timelines), args.out)
    return 0


def cmd_evaluate(args) -> int:
    from .metrics import evaluate, report_to_csv

    gold = mio.read_labels(args.gold)
    pred = mio.read_labels(args.pred)
    if args.posts and args.timelines:
        timelines = _load_timelines(args.posts, args.timelines)
        mio.check_alignment(gold, timelines)
        mio.check_alignment(pred, timelines)
    report = evaluate(gold, pred, args.windows, args.labels, args.per_timeline, args.buckets)
    _emit(report, args.out)
    if args.csv:
        Path(args.csv).write_text(report_to_csv(report), encoding="utf-8")
    return 0


def cmd_baseline(args) -> int:
    from .models import BaselineConfig, TrainConfig, run_baseline

    timelines = _load_timelines(args.posts, args.timelines)
    gold = mio.read_labels(args.gold) if args.gold else None
    if gold is not None:
        ids = {g.timeline_id for g in gold}
        # timelines without gold (e.g. unannotated candidates) are not part of the experiment
        timelines = [t for t in timelines if t.timeline_id in ids]
        mio.check_alignment(gold, timelines)
    vectors = mio.read_vectors(args.vectors) if args.vectors else None
    try:
        priors = json.loads(args.priors) if args.priors else None
    except json.JSONDecodeError:
        raise UsageError(f"--priors is not valid JSON: {args.priors!r}") from None
    cfg = BaselineConfig(
        folds=args.folds,
        seed=args.seed,
        context_radius=args.context_radius,
        fsd_mode=args.fsd_mode,
        train=TrainConfig(epochs=args.epochs, seed=args.seed),
    )
    preds = run_baseline(args.model, timelines, gold, cfg, vectors, priors)
    mio.write_labels(args.out, preds)
    return 0


def cmd_synth(args) -> int:
    from .synth import SynthConfig, generate

    cfg = SynthConfig(
        n_users=args.users,
        days=args.days,
        change_day=args.change_day if args.change_day is not None else args.days // 2,
        base_rate=args.base_rate,
        changed_rate=args.changed_rate,
        annotator_noise=tuple(args.noise),
        seed=args.seed,
    )
    corpus = generate(cfg)
    out = Path(args.out_dir)
    mio.write_posts(out / "posts.jsonl", corpus.posts)
    mio.write_timelines(out / "timelines.jsonl", corpus.timelines)
    mio.write_labels(out / "gold.jsonl", corpus.gold)
    mio.write_annotations(out / "annotations.jsonl", corpus.annotations)
    _emit(
        {
            "users": cfg.n_users,
            "posts": len(corpus.posts),
            "timelines": len(corpus.timelines),
            "timeline_posts": sum(len(t) for t in corpus.timelines),
        },
        None,
    )
    return 0


def cmd_report(args) -> int:
    from .reporting import render_csv, render_table

    reports = {}
    names = args.names or []
    for i, path in enumerate(args.report):
        name = names[i] if i < len(names) else Path(path).stem
        rep = mio.read_report(path)
        for key in ("post_level", "windowed", "coverage"):
            if key not in rep:
                raise DataError(f"{path}: not a metrics report (missing {key!r})")
        reports[name] = rep
    text = render_table(reports)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(render_csv(reports), encoding="utf-8")
    if args.figures:
        from .plotting import render_figures

        for p in render_figures(reports, args.figures):
            log.info("wrote %s", p)
    return 0


# parser


def build_parser() -> Parser:
    p = Parser(prog="moctk", description="Moments of Change in user post timelines.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=Parser)
    sub.required = True

    threads_default = env("threads", os.cpu_count() or 1, int)

    s = sub.add_parser("extract", help="detect posting-frequency change points and cut timelines")
    s.add_argument("--posts", required=True)
    s.add_argument("--out", required=True, help="timelines JSONL")
    s.add_argument("--summary", help="write the extraction summary here instead of stdout")
    s.add_argument("--alpha", type=float, default=env("alpha", 1.0, float))
    s.add_argument("--beta", type=float, default=env("beta", 1.0, float))
    s.add_argument("--hazard", type=float, default=env("hazard", 0.01, float))
    s.add_argument("--r-reset", type=int, default=env("r_reset", 2, int))
    s.add_argument("--mass-threshold", type=float, default=env("mass_threshold", 0.5, float))
    s.add_argument("--min-gap-days", type=int, default=env("min_gap_days", 7, int))
    s.add_argument("--window-days", type=int, default=env("window_days", 7, int))
    s.add_argument("--min-posts", type=int, default=env("min_posts", 10, int))
    s.add_argument("--max-posts", type=int, default=env("max_posts", 150, int))
    s.add_argument("--sample", type=int, help="keep N timelines, one per user")
    s.add_argument("--seed", type=int, default=env("seed", 0, int))
    s.add_argument("--threads", type=int, default=threads_default)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("aggregate", help="majority-vote gold labels from annotations")
    s.add_argument("--annotations", required=True)
    s.add_argument("--posts", required=True)
    s.add_argument("--timelines", required=True)
    s.add_argument("--out", required=True, help="gold labels JSONL")
    s.set_defaults(func=cmd_aggregate)

    s = sub.add_parser("iaa", help="per-label positive agreement")
    s.add_argument("--annotations", required=True)
    s.add_argument("--posts", help="with --timelines, count unannotated posts as O")
    s.add_argument("--timelines")
    s.add_argument("--out")
    s.set_defaults(func=cmd_iaa)

    s = sub.add_parser("evaluate", help="score predictions against gold labels")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--windows", type=int_list, default=env("windows", [0, 1, 2, 3], int_list))
    s.add_argument("--labels", type=label_list, default=[Label.IS, Label.IE, Label.O])
    s.add_argument("--buckets", type=int_list, help="lower edges of escalation-length buckets")
    s.add_argument("--per-timeline", action="store_true")
    s.add_argument("--posts", help="with --timelines, check label alignment against timelines")
    s.add_argument("--timelines")
    s.add_argument("--out", help="report JSON (stdout if omitted)")
    s.add_argument("--csv", help="flat delimited export")
    s.set_defaults(func=cmd_evaluate)

    from .models.pipeline import MODELS

    s = sub.add_parser("baseline", help="cross-validated predictions from a baseline model")
    s.add_argument("--model", required=True, choices=MODELS)
    s.add_argument("--posts", required=True)
    s.add_argument("--timelines", required=True)
    s.add_argument("--gold")
    s.add_argument("--vectors", help="external per-post vectors JSONL for fsd/scd models")
    s.add_argument("--priors", help='JSON object of class priors for the random model, e.g. {"O": 0.9, ...}')
    s.add_argument("--context-radius", type=int, default=env("context_radius", None, int))
    s.add_argument("--fsd-mode", choices=("centroid", "nearest"), default="centroid")
    s.add_argument("--folds", type=int, default=env("folds", 5, int))
    s.add_argument("--epochs", type=int, default=env("epochs", 30, int))
    s.add_argument("--seed", type=int, default=env("seed", 0, int))
    s.add_argument("--threads", type=int, default=threads_default)
    s.add_argument("--out", required=True, help="predictions JSONL")
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("synth", help="write a synthetic corpus in every canonical format")
    s.add_argument("--users", type=int, default=env("users", 100, int))
    s.add_argument("--days", type=int, default=env("days", 60, int))
    s.add_argument("--change-day", type=int)
    s.add_argument("--base-rate", type=float, default=1.0)
    s.add_argument("--changed-rate", type=float, default=8.0)
    s.add_argument("--noise", type=float, nargs="+", default=[0.0, 0.0, 0.0], help="per-annotator flip rates")
    s.add_argument("--seed", type=int, default=env("seed", 0, int))
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("report", help="render metrics reports as a table, CSV and figures")
    s.add_argument("--report", required=True, nargs="+", help="one or more report JSON files")
    s.add_argument("--names", nargs="+", help="row names (default: file stems)")
    s.add_argument("--out", help="text table (stdout if omitted)")
    s.add_argument("--csv")
    s.add_argument("--figures", help="directory for PNG figures")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"moctk {args.command}: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except (DataError, MocError) as exc:
        print(f"moctk {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
