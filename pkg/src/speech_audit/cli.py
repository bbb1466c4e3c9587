"""Command-line entry point: ``speech-audit <command>``.

Exit codes: 0 success, 2 audit raised at least one ``fail`` flag, 1 error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

from speech_audit import __version__
from speech_audit.config import parse_yaml
from speech_audit.errors import AuditError
from speech_audit.text_metrics import TokenMode, tokenize
from speech_audit.variety.classify import CATEGORY_ORDER, CorpusTally, classifier_for
from speech_audit.variety.lexicon import builtin_lexicon, load_lexicon

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FLAGGED = 2


def _err(msg: str) -> None:
    print(f"speech-audit: {msg}", file=sys.stderr)


def cmd_audit(args: argparse.Namespace) -> int:
    from speech_audit.audit import run_audit
    from speech_audit.config import load_config
    from speech_audit.report import emit_report

    config = load_config(args.config)
    updates = {}
    if args.parallelism is not None:
        updates["parallelism"] = args.parallelism
    if args.output is not None or args.format is not None:
        updates["output"] = config.output.model_copy(
            update={k: v for k, v in (("path", args.output), ("format", args.format)) if v is not None}
        )
    if updates:
        config = config.model_copy(update=updates)
    if config.parallelism < 1:
        raise AuditError("parallelism must be >= 1")

    report = run_audit(args.manifest, config)

    out = config.output
    if out.path:
        path = Path(out.path)
        if out.format in ("json", "both"):
            json_path = path if out.format == "json" else path.with_suffix(".json")
            json_path.write_bytes(emit_report(report, "json"))
        if out.format in ("markdown", "both"):
            md_path = path if out.format == "markdown" else path.with_suffix(".md")
            md_path.write_bytes(emit_report(report, "markdown"))
    else:
        sys.stdout.buffer.write(emit_report(report, "json" if out.format != "markdown" else "markdown"))

    for f in report.flags:
        _err(f"{f.severity.value.upper()} {f.code.value}")
    return EXIT_FLAGGED if report.has_failures() else EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    lexicon = load_lexicon(args.lexicon) if args.lexicon else builtin_lexicon(args.classifier)
    classify = classifier_for(lexicon, None)
    try:
        lines = Path(args.text_file).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise AuditError(f"cannot read {args.text_file}: {exc}") from None

    counts: Counter = Counter()
    out = sys.stdout
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        verdict = classify(line, lexicon)
        counts[verdict.category] += 1
        markers = ",".join(f"{m}:{lexicon.label(c)}" for m, c in verdict.matched_markers)
        out.write(f"{n}\t{lexicon.label(verdict.category)}\t{markers}\n")
    tally = CorpusTally.from_counts(counts, lexicon)
    for cat in CATEGORY_ORDER:
        k = cat.value
        print(f"{tally.labels[k]}\t{tally.counts[k]}\t{tally.percentages[k]:.1f}%", file=sys.stderr)
    print(f"Total\t{tally.total}", file=sys.stderr)
    return EXIT_OK


def cmd_wer(args: argparse.Namespace) -> int:
    from speech_audit.wer import align, corpus_wer, join_on_id, read_id_tsv, top_substitutions

    mode = TokenMode.PER_CHARACTER_CJK if args.mode == "char" else TokenMode.WHITESPACE
    joined = join_on_id(read_id_tsv(args.ref), read_id_tsv(args.hyp))
    if not joined.pairs:
        raise AuditError("reference and hypothesis files share no utterance ids")
    for uid in joined.missing_in_hyp:
        _err(f"no hypothesis for id {uid}")
    for uid in joined.missing_in_ref:
        _err(f"no reference for id {uid}")
    results = [align(tokenize(r, mode), tokenize(h, mode)) for _, r, h in joined.pairs]
    total = corpus_wer(results)
    label = "CER" if args.mode == "char" else "WER"
    print(total.summary_line().replace("WER", label, 1))
    print(f"N {total.n_ref} | S {total.substitutions} D {total.deletions} I {total.insertions}")
    subs = top_substitutions(total, args.top)
    if subs:
        print("Top substitutions:")
        for ref_tok, hyp_tok, count in subs:
            print(f"  {ref_tok} -> {hyp_tok}\t{count}")
    if joined.missing_in_hyp or joined.missing_in_ref:
        print(f"Unmatched ids: {len(joined.missing_in_hyp)} ref-only, {len(joined.missing_in_ref)} hyp-only")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from speech_audit.report import emit_report, report_from_json

    try:
        text = Path(args.report_json).read_bytes()
    except OSError as exc:
        raise AuditError(f"cannot read {args.report_json}: {exc}") from None
    try:
        report = report_from_json(text)
    except ValueError as exc:
        raise AuditError(f"{args.report_json}: not a valid audit report ({exc})") from None
    data = emit_report(report, args.format)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_data_statement(args: argparse.Namespace) -> int:
    from speech_audit.datastatement import emit_data_statement
    from speech_audit.report import report_from_json

    decisions = {}
    if args.decisions:
        decisions = parse_yaml(Path(args.decisions).read_text(encoding="utf-8")) or {}
        if not isinstance(decisions, dict):
            raise AuditError("decisions file must contain a mapping")
    report = report_from_json(Path(args.report).read_bytes()) if args.report else None
    sys.stdout.write(emit_data_statement(args.locale, decisions, report))
    return EXIT_OK


def cmd_print_default_config(args: argparse.Namespace) -> int:
    from speech_audit.config import default_config_text

    sys.stdout.write(default_config_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speech-audit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--print-default-config", action="store_true", help="print the default YAML config and exit"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("audit", help="audit one manifest and write a report")
    p.add_argument("manifest")
    p.add_argument("--config", "-c", help="YAML config (defaults when omitted)")
    p.add_argument("--parallelism", "-j", type=int)
    p.add_argument("--output", "-o", help="report path (overrides config)")
    p.add_argument("--format", choices=["json", "markdown", "both"])
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("classify", help="classify one sentence per line")
    p.add_argument("text_file")
    p.add_argument("--classifier", default="no", help="no | ar | yue")
    p.add_argument("--lexicon", help="lexicon file overriding the bundled one")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("wer", help="WER with Del/Ins/Sub breakdown over id-keyed TSVs")
    p.add_argument("ref")
    p.add_argument("hyp")
    p.add_argument("--mode", choices=["word", "char"], default="word")
    p.add_argument("--top", type=int, default=10, help="substitution pairs to list")
    p.set_defaults(func=cmd_wer)

    p = sub.add_parser("report", help="re-render a JSON report")
    p.add_argument("report_json")
    p.add_argument("--format", choices=["json", "markdown"], default="markdown")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("data-statement", help="data statement skeleton for a locale")
    p.add_argument("locale")
    p.add_argument("--decisions", help="YAML mapping of planning decisions")
    p.add_argument("--report", help="audit report JSON to summarize")
    p.set_defaults(func=cmd_data_statement)

    p = sub.add_parser("print-default-config", help="print the default YAML config")
    p.set_defaults(func=cmd_print_default_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.print_default_config:
        return cmd_print_default_config(args)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (AuditError, OSError) as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
