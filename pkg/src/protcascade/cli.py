"""Batch command line: classify, insert, build-kb, features, bench.

Exit codes: 0 success, 1 storage failure, 2 noisy or malformed input,
3 empty warehouse, 4 bad flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import bench, format_records, format_table
from .cascade import ORDERS, CascadeConfig, Classifier
from .errors import (
    EmptyInput,
    EmptyWarehouse,
    FormatError,
    NoiseError,
    SequenceTooShort,
    StorageError,
)
from .features import (
    DISTRIBUTION_PAIRS,
    FEATURE_NAMES,
    exchange_two_gram_counts,
    feature_vector,
    hydropathy_composition_counts,
    hydropathy_distribution_counts,
    pattern_vector,
    PATTERN_SLOTS,
    two_gram_counts,
)
from .knowledge import (
    build_knowledge,
    ensure_knowledge,
    insert_row,
    load_knowledge,
    load_warehouse,
    save_knowledge,
)
from .seq_core import HYDROPATHY_CLASSES, fasta_blocks, parse_fasta, parse_sequence, to_exchange_groups
from . import synthetic

log = logging.getLogger("protcascade")

EXIT_OK, EXIT_STORAGE, EXIT_INPUT, EXIT_EMPTY, EXIT_FLAGS = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def _add_input(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--seq", help="a single sequence given inline")
    g.add_argument("--fasta", type=Path, help="FASTA file with one or more records")


def _read_records(args):
    if args.seq is not None:
        return [("seq", parse_sequence(args.seq, record="seq"))]
    try:
        text = args.fasta.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read {args.fasta}: {exc}") from exc
    records = parse_fasta(text)
    if not records:
        raise EmptyInput(f"{args.fasta}: no FASTA records")
    return records


def _write(args, text: str):
    out = getattr(args, "out_report", None)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run_classify(args) -> int:
    records = _read_records(args)
    warehouse = load_warehouse(args.warehouse)
    if len(warehouse) == 0:
        raise EmptyWarehouse(f"warehouse {args.warehouse} is empty")
    cached = load_knowledge(args.kb) if args.kb.exists() else None
    kb, rebuilt = ensure_knowledge(warehouse, cached, force=args.force_rebuild)
    if rebuilt:
        save_knowledge(kb, args.kb)
        log.info("knowledge table rebuilt (countrow %d)", kb.row_count)
    else:
        log.info("cache hit: countrow %d matches warehouse", kb.row_count)
    clf = Classifier(warehouse, kb, config=CascadeConfig(order=args.order, seed=args.seed))
    lines = []
    for ident, seq in records:
        res = clf.classify(seq)
        if args.json:
            lines.append(json.dumps({"id": ident, **res.to_dict(timing=not args.no_timing)}, sort_keys=True))
        else:
            cols = [ident, res.family, res.resolved_by]
            if not args.no_timing:
                cols.append(f"{res.total_time:.3f}")
            lines.append("\t".join(cols))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def run_insert(args) -> int:
    if not args.family.strip():
        raise UsageError("--family must be non-empty")
    records = _read_records(args)
    for ident, seq in records:
        if len(seq) < 2:
            raise SequenceTooShort(f"record {ident!r}: at least 2 residues are required")
    warehouse = load_warehouse(args.warehouse)
    for _, seq in records:
        insert_row(warehouse, args.family, seq)
    print(len(warehouse))
    return EXIT_OK


def run_build_kb(args) -> int:
    warehouse = load_warehouse(args.warehouse)
    kb = build_knowledge(warehouse)
    save_knowledge(kb, args.out)
    print(f"families\t{len(kb.families)}")
    print(f"rows\t{kb.row_count}")
    return EXIT_OK


def _pct_table(title, names, counts, denom):
    lines = [f"# {title}"]
    for name, c in zip(names, counts):
        pct = 100.0 * c / denom if denom else 0.0
        lines.append(f"{name}\t{c}\t{pct:.2f}%")
    return lines


def run_features(args) -> int:
    out = []
    for ident, seq in _read_records(args):
        if len(seq) < 2:
            raise SequenceTooShort(f"record {ident!r}: at least 2 residues are required")
        out.append(f">{ident}\tlength {len(seq)}")
        out.append("# features")
        for name, v in zip(FEATURE_NAMES, feature_vector(seq)):
            out.append(f"{name}\t{float(v)!r}")
        out += _pct_table(
            "hydropathy composition",
            [c.value for c in HYDROPATHY_CLASSES],
            hydropathy_composition_counts(seq),
            len(seq),
        )
        out += _pct_table(
            "hydropathy distribution",
            [f"{a.value}–{b.value}" for a, b in DISTRIBUTION_PAIRS],
            hydropathy_distribution_counts(seq),
            len(seq) - 1,
        )
        out.append("# exchange groups\t" + "".join(g.value for g in to_exchange_groups(seq)))
        for title, counts in (("2-grams", two_gram_counts(seq)), ("exchange 2-grams", exchange_two_gram_counts(seq))):
            out.append(f"# {title}")
            out += [f"{p}\t{c}\t{c / (len(seq) - 1)!r}" for p, c in counts.items()]
        if args.pattern:
            out.append("# pattern vector nonzero slots")
            vec = pattern_vector(seq)
            out += [f"{i}\t{PATTERN_SLOTS[i]}\t{float(vec[i])!r}" for i in vec.nonzero()[0]]
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def _labelled_fasta(path: Path, n: int | None):
    corpus = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc
    for header, body in fasta_blocks(text):
        tokens = header.split()
        if len(tokens) < 2:
            raise FormatError(f"header {header!r} lacks a family label (expected '>id family')")
        corpus.append((tokens[1], parse_sequence(body, record=tokens[0])))
    return corpus[:n] if n is not None else corpus


def run_bench(args) -> int:
    config = CascadeConfig(seed=args.seed)
    if args.synthetic:
        if args.families < 2 or args.per_family < 2 or args.n < 1:
            raise UsageError("--families and --per-family must be >= 2, --n >= 1")
        warehouse = synthetic.synthetic_warehouse(args.families, args.per_family, args.seed)
        corpus = synthetic.synthetic_draws(args.families, args.n, args.seed)
    else:
        if args.warehouse is None or args.fasta is None:
            raise UsageError("bench needs --synthetic, or --warehouse with a labelled --fasta corpus")
        if args.n < 1:
            raise UsageError("--n must be >= 1")
        warehouse = load_warehouse(args.warehouse)
        corpus = _labelled_fasta(args.fasta, args.n)
    report = bench(corpus, warehouse, config)
    timing = not args.no_timing
    text = format_records(report, timing) if args.json else format_table(report, timing)
    _write(args, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="protcascade", description="Three-phase protein family classifier.")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress cache-decision messages on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="classify sequences against a warehouse")
    c.add_argument("--kb", type=Path, required=True, help="knowledge table file (created or refreshed)")
    c.add_argument("--warehouse", type=Path, required=True)
    _add_input(c)
    c.add_argument("--order", choices=ORDERS, default=ORDERS[0])
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true", help="one JSON record per sequence with the full trace")
    c.add_argument(
        "--force-rebuild",
        action="store_true",
        help="rebuild the knowledge table even if countrow matches (edits that keep the row count are otherwise missed)",
    )
    c.add_argument("--no-timing", action="store_true", help="omit wall-clock columns for reproducible output")
    c.set_defaults(func=run_classify)

    i = sub.add_parser("insert", help="append labelled sequences to the warehouse")
    i.add_argument("--warehouse", type=Path, required=True)
    i.add_argument("--family", required=True)
    _add_input(i)
    i.set_defaults(func=run_insert)

    b = sub.add_parser("build-kb", help="write the per-family range table")
    b.add_argument("--warehouse", type=Path, required=True)
    b.add_argument("--out", type=Path, required=True)
    b.set_defaults(func=run_build_kb)

    f = sub.add_parser("features", help="dump the features of each sequence")
    _add_input(f)
    f.add_argument("--pattern", action="store_true", help="also list nonzero 436-vector slots")
    f.set_defaults(func=run_features)

    r = sub.add_parser("bench", help="compare fuzzy-first and neural-first orderings")
    r.add_argument("--synthetic", action="store_true")
    r.add_argument("--families", type=int, default=5)
    r.add_argument("--per-family", type=int, default=500)
    r.add_argument("--warehouse", type=Path)
    r.add_argument("--fasta", type=Path, help="labelled test corpus, headers as '>id family'")
    r.add_argument("--n", type=int, default=500, help="number of test draws")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--json", action="store_true")
    r.add_argument("--out", dest="out_report", type=Path)
    r.add_argument("--no-timing", action="store_true")
    r.set_defaults(func=run_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_FLAGS
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    log.propagate = False
    try:
        return args.func(args)
    except (NoiseError, FormatError, EmptyInput, SequenceTooShort) as exc:
        print(f"protcascade: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyWarehouse as exc:
        print(f"protcascade: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (UsageError, ValueError) as exc:
        print(f"protcascade: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except StorageError as exc:
        print(f"protcascade: {exc}", file=sys.stderr)
        return EXIT_STORAGE
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
