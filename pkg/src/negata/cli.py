"""Command-line surface: build, reverse, detect, validate, score, report.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .builder import (BuildConfig, ConfigError, build_corpus, digest_files,
                      validate_output)
from .conllu import parse_conllu, parse_conllu_file
from .cues import CueKind, CueLexicon, detect_cues, eligibility
from .metrics import (MetricError, group_consistency, macro_f1,
                      mean_top1_error, precision_at_1)
from .reversal import CuePolicy, ReversalRejected, reverse_polarity

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

CUE_BY_NAME = {"not": CueKind.NOT, "nt": CueKind.NT, "never": CueKind.NEVER,
               "n't": CueKind.NT}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_config_file(path):
    """Flat key=value file mirroring the build flags."""
    values = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _parse_bool(value):
    if str(value).lower() in ("1", "true", "yes", "on"):
        return True
    if str(value).lower() in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {value!r}")


def _build_config(args):
    """Precedence: flags > config file > defaults."""
    file_values = _read_config_file(args.config) if args.config else {}

    def pick(flag_value, key, default, convert=lambda v: v):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return convert(file_values[key])
        return default

    tasks = pick(args.tasks, "tasks", "nspp,nsp")
    lexicon = pick(args.lexicon, "lexicon_path",
                   os.environ.get("NEGATA_LEXICON") or None)
    match = not args.no_cue_matching if args.no_cue_matching else None
    return BuildConfig(
        seed=pick(args.seed, "seed", 0, int),
        val_pairs=pick(args.val_pairs, "val_pairs", 25000, int),
        subset_mode=pick(args.subset, "subset_mode", "both"),
        tasks=tuple(t.strip() for t in tasks.split(",") if t.strip()),
        match_cue_distribution=pick(match, "match_cue_distribution", True,
                                    _parse_bool),
        lexicon_path=lexicon,
        jobs=pick(args.jobs, "jobs", 1, int),
        emit_tsv=pick(args.tsv or None, "emit_tsv", False, _parse_bool),
    )


def _iter_input_sentences(paths, diagnostics):
    for path in paths:
        yield from parse_conllu_file(path, diagnostics=diagnostics)


def _cmd_build(args):
    config = _build_config(args)
    config.validate()
    for path in args.input:
        if not os.path.exists(path):
            raise FileNotFoundError(path)
    diagnostics = []
    sentences = _iter_input_sentences(args.input, diagnostics)
    _, manifest = build_corpus(sentences, config, args.out,
                               input_digest=digest_files(args.input))
    for diag in diagnostics:
        print(diag, file=sys.stderr)
    counts = manifest["counts"]["records"]
    print(json.dumps({"out": args.out, "records": counts,
                      "rejections": manifest["rejections"]},
                     ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def _read_stdin_sentences():
    diagnostics = []
    sentences = list(parse_conllu(sys.stdin, source="<stdin>",
                                  diagnostics=diagnostics))
    for diag in diagnostics:
        print(diag, file=sys.stderr)
    return sentences


def _load_lexicon(path):
    path = path or os.environ.get("NEGATA_LEXICON")
    return CueLexicon.load(path) if path else CueLexicon.default()


def _cmd_reverse(args):
    sentences = _read_stdin_sentences()
    if not sentences:
        print("no sentence on stdin", file=sys.stderr)
        return EXIT_DATA
    lexicon = _load_lexicon(args.lexicon)
    policy = CuePolicy(fixed=CUE_BY_NAME[args.cue])
    try:
        outcome = reverse_polarity(sentences[0], policy, rng_seed=args.seed,
                                   lexicon=lexicon)
    except ReversalRejected as exc:
        print(json.dumps({"rejection": {"reason": exc.reason.value}},
                         ensure_ascii=False, sort_keys=True))
        return EXIT_OK
    print(json.dumps({
        "output_text": outcome.text,
        "direction": outcome.direction.value,
        "cue_used": outcome.cue_used.value,
        "edits": [{"position": e.position, "kind": e.kind.value,
                   "before": e.before, "after": e.after}
                  for e in outcome.edits],
    }, ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def _cmd_detect(args):
    sentences = _read_stdin_sentences()
    if not sentences:
        print("no sentence on stdin", file=sys.stderr)
        return EXIT_DATA
    lexicon = _load_lexicon(args.lexicon)
    for sentence in sentences:
        cues = detect_cues(sentence, lexicon)
        verdict = eligibility(sentence, lexicon)
        print(json.dumps({
            "text": sentence.raw_text,
            "cues": [{"kind": c.kind.value, "token_index": c.token_index,
                      "attached_to": c.attached_to, "span": c.span,
                      "surface": c.surface} for c in cues],
            "eligible": verdict.eligible,
            "reason": verdict.reason.value if verdict.reason else None,
        }, ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def _cmd_validate(args):
    failures = validate_output(args.dir)
    if failures:
        for failure in failures:
            print(failure, file=sys.stderr)
        return EXIT_DATA
    print(f"{args.dir}: ok")
    return EXIT_OK


def _read_jsonl(path):
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def _cmd_score(args):
    rows = _read_jsonl(args.pred)
    if args.metric == "group-consistency":
        value = group_consistency(rows, subset=args.subset)
    elif args.metric == "top1-error":
        value = mean_top1_error(rows)
    elif args.metric == "precision-at-1":
        value = precision_at_1(rows)
    else:
        classes = ([c.strip() for c in args.classes.split(",")]
                   if args.classes else
                   sorted({r["gold"] for r in rows} | {r["predicted"] for r in rows}))
        value = macro_f1(rows, classes)
    print(json.dumps({"metric": args.metric, "value": value, "count": len(rows)},
                     ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def _cmd_report(args):
    from .report import render_report

    for path in render_report(args.dir, out_dir=args.out):
        print(path)
    return EXIT_OK


def _make_parser():
    from . import __version__

    parser = _Parser(prog="negata",
                     description="Negation polarity reversal and NSPP/NSP "
                                 "dataset construction over CoNLL-U input.")
    parser.add_argument("--version", action="version",
                        version=f"negata {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="run the full dataset pipeline")
    p_build.add_argument("--input", nargs="+", required=True,
                         metavar="CONLLU", help="input CoNLL-U files")
    p_build.add_argument("--out", required=True, help="output directory")
    p_build.add_argument("--tasks", help="comma list: nspp,nsp")
    p_build.add_argument("--subset", choices=["both", "add-only", "remove-only"])
    p_build.add_argument("--val-pairs", dest="val_pairs", type=int)
    p_build.add_argument("--seed", type=int)
    p_build.add_argument("--lexicon", help="extended cue lexicon file")
    p_build.add_argument("--no-cue-matching", action="store_true",
                         help="add plain 'not' instead of matching per-article "
                              "cue distributions")
    p_build.add_argument("--jobs", type=int, help="document-level parallelism")
    p_build.add_argument("--tsv", action="store_true",
                         help="also mirror each split as TSV")
    p_build.add_argument("--config", help="key=value config file")

    p_rev = sub.add_parser("reverse", help="reverse one stdin CoNLL-U sentence")
    p_rev.add_argument("--cue", choices=sorted(CUE_BY_NAME), default="not")
    p_rev.add_argument("--seed", type=int, default=0)
    p_rev.add_argument("--lexicon")

    p_det = sub.add_parser("detect", help="print cues and eligibility for "
                                          "stdin sentences")
    p_det.add_argument("--lexicon")

    p_val = sub.add_parser("validate", help="re-check an emitted dataset tree")
    p_val.add_argument("dir")

    p_score = sub.add_parser("score", help="run a metric over a JSONL file")
    p_score.add_argument("--metric", required=True,
                         choices=["group-consistency", "top1-error",
                                  "precision-at-1", "macro-f1"])
    p_score.add_argument("--pred", required=True, help="JSONL prediction file")
    p_score.add_argument("--subset", default="all",
                         help="group-consistency subset: all or a variant name")
    p_score.add_argument("--classes", help="comma list of classes for macro-f1")

    p_rep = sub.add_parser("report", help="render figures and TSV summary "
                                          "for a built dataset")
    p_rep.add_argument("dir")
    p_rep.add_argument("--out", help="directory for report files "
                                     "(default: the dataset directory)")
    return parser


_HANDLERS = {
    "build": _cmd_build,
    "reverse": _cmd_reverse,
    "detect": _cmd_detect,
    "validate": _cmd_validate,
    "score": _cmd_score,
    "report": _cmd_report,
}


def main(argv=None):
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, MetricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"data error: {exc!r}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
