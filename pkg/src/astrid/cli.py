"""Command-line interface.

Exit status: 0 on success (for ``test``: grouping not rejected), 2 on
usage, input or validation errors, 3 when ``test`` rejects the grouping.
Results go to stdout, progress and warnings to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from astrid.anonymize import anonymize, measure_p_anon
from astrid.classifiers import parse_classifier
from astrid.data import generate_synthetic, load_csv, parse_partition, split_dataset, write_csv
from astrid.errors import AstridError
from astrid.report import (
    TEST_FORMAT,
    anonymity_to_json,
    dumps,
    ladder_to_json,
    render_anonymity,
    render_ladder,
    render_test,
    report_to_json,
)
from astrid.rng import Streams
from astrid.search import SELECT, astrid
from astrid.significance import baseline_accuracy, empirical_p_value

log = logging.getLogger("astrid")

EXIT_OK, EXIT_ERROR, EXIT_REJECTED = 0, 2, 3


def _ratios(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad split {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("split needs three comma-separated fractions")
    return parts


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _data_options(p: argparse.ArgumentParser, *, split: bool = True) -> None:
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--class-column", default="class")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--format", choices=("table", "json"), default="table")
    if split:
        p.add_argument("--classifier", default="rf", help="nb, rf, knn or external:<command>")
        p.add_argument("--trees", type=_positive, default=100, help="random forest size")
        p.add_argument("--neighbours", type=_positive, default=5, help="k for knn")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--R", type=_positive, default=250, help="replicates for p-values")
        p.add_argument("--split", type=_ratios, default=(0.5, 0.25, 0.25),
                       help="train,reward,select fractions")
        p.add_argument("--jobs", type=_positive, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="astrid", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write the four-attribute synthetic dataset")
    p.add_argument("--n-per-class", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("test", help="test one grouping")
    _data_options(p)
    p.add_argument("--partition", required=True, help='1-based grouping such as "1,2|3|4"')

    p = sub.add_parser("analyze", help="find and test the best grouping for every k")
    _data_options(p)
    p.add_argument("--Rprime", type=_positive, default=100, help="replicates per reward")
    p.add_argument("--out", help="also write the JSON ladder here")

    p = sub.add_parser("anonymize", help="shuffle a dataset with a validated grouping")
    _data_options(p, split=False)
    p.add_argument("--partition", help='1-based grouping such as "1,2|3|4"')
    p.add_argument("--replicates", type=_positive, default=100)
    p.add_argument("--out", help="shuffled CSV (default: not written)")
    return ap


def _spec(args):
    return parse_classifier(args.classifier, n_trees=args.trees, k=args.neighbours)


def _load(args, min_classes: int = 2):
    d, stats = load_csv(args.input, args.class_column, min_classes=min_classes)
    if stats.rows_dropped or stats.columns_dropped:
        log.warning(
            "dropped %d rows with missing values and %d constant columns %s",
            stats.rows_dropped, len(stats.columns_dropped), list(stats.columns_dropped),
        )
    return d


def cmd_synth(args) -> int:
    d = generate_synthetic(args.n_per_class, args.seed)
    text = write_csv(d, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_test(args) -> int:
    d = _load(args)
    partition = parse_partition(args.partition, d.m)
    split = split_dataset(d, args.split, args.seed)
    # same streams as the corresponding rung of `analyze`
    spec = _spec(args)
    rng = Streams(args.seed).child(SELECT)
    base = baseline_accuracy(split.train, split.test_select, spec, rng)
    report = empirical_p_value(
        split.train, split.test_select, partition, spec, args.R, args.alpha,
        rng.child(partition.k), args.jobs, baseline=base,
    )
    names = [c.name for c in d.columns]
    if args.format == "json":
        sys.stdout.write(dumps({"format": TEST_FORMAT, "columns": names, **report_to_json(report)}))
    else:
        sys.stdout.write(render_test(report, names))
    return EXIT_REJECTED if report.rejected else EXIT_OK


def cmd_analyze(args) -> int:
    d = _load(args)
    split = split_dataset(d, args.split, args.seed)
    ladder = astrid(split, _spec(args), args.Rprime, args.R, args.alpha, Streams(args.seed), args.jobs)
    names = [c.name for c in d.columns]
    doc = dumps(ladder_to_json(ladder, names))
    if args.out:
        Path(args.out).write_text(doc, encoding="utf-8")
    sys.stdout.write(doc if args.format == "json" else render_ladder(ladder, names))
    return EXIT_OK


def cmd_anonymize(args) -> int:
    if not args.partition:
        raise AstridError("no --partition given; run `astrid analyze` first to find a valid grouping")
    d = _load(args, min_classes=1)
    partition = parse_partition(args.partition, d.m)
    if partition.k == 1:
        log.warning("a single group only reorders rows within classes: every row stays intact (P_anon = 1)")
    rng = Streams(args.seed)
    report = measure_p_anon(d, partition, args.replicates, rng)
    if args.out:
        write_csv(anonymize(d, partition, rng.child(0)), args.out)
    if args.format == "json":
        sys.stdout.write(dumps(anonymity_to_json(report)))
    else:
        sys.stdout.write(render_anonymity(report))
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "test": cmd_test, "analyze": cmd_analyze, "anonymize": cmd_anonymize}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (AstridError, ValueError) as exc:
        print(f"astrid: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
