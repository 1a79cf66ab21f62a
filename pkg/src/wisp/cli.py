"""Command-line entry point for every pipeline stage.

Exit codes: 0 success, 1 data error, 2 usage error (stable for CI).
Config file values are overridden by flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench as bench_mod
from . import stats as stats_mod
from .annotate import annotate
from .config import load_config
from .linearize import UnsupportedLayout, linearize
from .model import (
    ModelError,
    annotation_to_dict,
    load_annotations,
    load_corpus,
)
from .syntax import AlignmentError, ConlluError, parse_conllu

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


def _cmd_linearize(args) -> int:
    cfg = load_config(args.config)
    os.makedirs(args.out_dir, exist_ok=True)
    failed = False
    for path in args.inputs:
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            with open(path, encoding="utf-8") as fh:
                html = fh.read()
            result = linearize(html, cfg.indent_rule)
        except (OSError, UnicodeDecodeError, UnsupportedLayout) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            failed = True
            continue
        out_path = os.path.join(args.out_dir, name + ".txt")
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(result.text)
        sidecar = {
            "input": path,
            "layout_style": result.style.value,
            "warnings": result.warnings,
            "config": cfg.provenance(),
        }
        with open(os.path.join(args.out_dir, name + ".provenance.json"), "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2)
    return EXIT_DATA if failed else EXIT_OK


def _cmd_annotate(args) -> int:
    cfg = load_config(args.config)
    try:
        poems = load_corpus(args.corpus)
    except (OSError, ModelError) as exc:
        print(f"error: {args.corpus}: {exc}", file=sys.stderr)
        return EXIT_DATA

    syntax_by_poem = {}
    if args.syntax_dir:
        for fname in sorted(os.listdir(args.syntax_dir)):
            if fname.endswith(".conllu"):
                poem_id = fname[: -len(".conllu")]
                try:
                    syntax_by_poem[poem_id] = parse_conllu(
                        os.path.join(args.syntax_dir, fname), poem_id
                    )
                except ConlluError as exc:
                    print(f"error: {exc}", file=sys.stderr)
                    return EXIT_DATA
    else:
        print("notice: no syntax directory; enjambed breaks will be enjambed_unknown", file=sys.stderr)

    with open(args.out, "w", encoding="utf-8") as fh:
        for poem in poems:
            try:
                ann = annotate(poem, syntax_by_poem.get(poem.id), cfg.annotator)
            except AlignmentError as exc:
                print(f"error: poem {poem.id}: {exc}", file=sys.stderr)
                return EXIT_DATA
            fh.write(json.dumps(annotation_to_dict(ann), ensure_ascii=False) + "\n")
    return EXIT_OK


def _cmd_bench(args) -> int:
    sets = {}
    if args.mode == "auto":
        if not args.truth_dir or not args.candidates_dir:
            print("error: auto mode requires --truth-dir and --candidates-dir", file=sys.stderr)
            return EXIT_USAGE
        if args.verdicts:
            print("error: --verdicts cannot be combined with auto mode", file=sys.stderr)
            return EXIT_USAGE
        truths = {}
        for fname in sorted(os.listdir(args.truth_dir)):
            if fname.endswith(".txt"):
                with open(os.path.join(args.truth_dir, fname), encoding="utf-8") as fh:
                    truths[fname[:-4]] = fh.read()
        if not truths:
            print(f"error: no .txt truths in {args.truth_dir}", file=sys.stderr)
            return EXIT_DATA
        for method in sorted(os.listdir(args.candidates_dir)):
            mdir = os.path.join(args.candidates_dir, method)
            if not os.path.isdir(mdir):
                continue
            records = []
            for poem_id, truth in truths.items():
                cand_path = os.path.join(mdir, poem_id + ".txt")
                if not os.path.exists(cand_path):
                    continue
                with open(cand_path, encoding="utf-8") as fh:
                    candidate = fh.read()
                records.append(bench_mod.auto_verdict(poem_id, method, truth, candidate))
            if records:
                sets[method] = bench_mod.AnnotationSet(records)
    else:  # human
        if not args.verdicts:
            print("error: human mode requires --verdicts", file=sys.stderr)
            return EXIT_USAGE
        if args.truth_dir or args.candidates_dir:
            print("error: truth/candidate dirs cannot be combined with human mode", file=sys.stderr)
            return EXIT_USAGE
        try:
            records = bench_mod.load_verdicts(args.verdicts)
        except (OSError, bench_mod.VerdictError) as exc:
            print(f"error: {args.verdicts}: {exc}", file=sys.stderr)
            return EXIT_DATA
        by_method = {}
        for r in records:
            by_method.setdefault(r.method_id, []).append(r)
        for method, recs in by_method.items():
            adjudicated = bench_mod.adjudicate_all(recs, args.policy)
            sets[method] = bench_mod.AnnotationSet(adjudicated)

    if not sets:
        print("error: no annotation sets to score", file=sys.stderr)
        return EXIT_DATA
    try:
        reports = bench_mod.bench_report(sets)
    except bench_mod.ScoringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    table = bench_mod.report_table(reports)
    print(table, end="")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "bench_report.txt"), "w", encoding="utf-8") as fh:
            fh.write(table)
        with open(os.path.join(args.out_dir, "bench_report.json"), "w", encoding="utf-8") as fh:
            fh.write(bench_mod.report_json(reports))
    return EXIT_OK


def _cmd_stats(args) -> int:
    try:
        poems = load_corpus(args.corpus)
        annotations = load_annotations(args.annotations) if args.annotations else []
    except (OSError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    try:
        if args.analysis == "group_means":
            if not args.mode:
                print("error: group_means requires --mode", file=sys.stderr)
                return EXIT_USAGE
            rows = stats_mod.mean_whitespace_by_group(annotations, poems, args.dimension, args.mode)
            if not rows:
                print(f"warning: no poems carry dimension {args.dimension!r}", file=sys.stderr)
            print(stats_mod.rows_to_table(rows), end="")
            payload = [r.to_dict() for r in rows]
        elif args.analysis == "temporal":
            rows, coverage = stats_mod.temporal_trend(annotations, poems)
            if coverage["with_birth_year"] == 0:
                print("warning: no poems carry a poet birth year", file=sys.stderr)
            print(stats_mod.rows_to_table(rows), end="")
            payload = {"coverage": coverage, "rows": [r.to_dict() for r in rows]}
        elif args.analysis == "punctuation":
            payload = stats_mod.punctuation_line_end_table(
                poems, punct_min_count=args.punct_min_count
            )
            for form, tables in payload.items():
                tops = " ".join(f"{tok!r} {frac:.1%}" for tok, frac in tables["per_total_lines"][:4])
                print(f"{form}: {tops}")
        else:  # tags
            payload = stats_mod.high_usage_tags(
                annotations, poems, args.ws_type, tag_min=args.tag_min
            )
            for row in payload["descending"]:
                print(f"{row['tag']}: n={row['n']} proportion={row['proportion']:.3f}")
    except stats_mod.StatsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, ensure_ascii=False)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ReviewState, create_app, load_tasks

    cfg = load_config(args.config)
    svc = dict(cfg.service)
    tasks_path = args.tasks or svc.get("tasks")
    log_path = args.log or svc.get("log")
    if not tasks_path or not log_path:
        print("error: serve requires --tasks and --log (or config values)", file=sys.stderr)
        return EXIT_USAGE
    try:
        tasks = load_tasks(tasks_path)
    except (OSError, ValueError) as exc:
        print(f"error: {tasks_path}: {exc}", file=sys.stderr)
        return EXIT_DATA
    state = ReviewState.create(tasks, log_path)
    app = create_app(state, image_dir=args.image_dir or svc.get("image_dir"), ui_dir=args.ui_dir or svc.get("ui_dir"))
    uvicorn.run(app, host=args.host or svc.get("host", "127.0.0.1"), port=args.port or int(svc.get("port", 8000)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wisp", description="Poem whitespace toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("linearize", help="convert poem HTML files to whitespace-faithful text")
    p.add_argument("inputs", nargs="+", help="HTML files")
    p.add_argument("--config")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_linearize)

    p = sub.add_parser("annotate", help="classify whitespace events in a corpus")
    p.add_argument("--corpus", required=True, help="JSON Lines corpus file")
    p.add_argument("--syntax-dir", help="directory of <poem_id>.conllu parses")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output annotations JSON Lines")
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("bench", help="score linearization methods")
    p.add_argument("--mode", choices=["auto", "human"], required=True)
    p.add_argument("--truth-dir", help="auto mode: ground-truth .txt files")
    p.add_argument("--candidates-dir", help="auto mode: <method>/<poem_id>.txt candidates")
    p.add_argument("--verdicts", help="human mode: verdict JSON Lines file")
    p.add_argument("--policy", default="prefer_mistakes", choices=["prefer_mistakes", "majority"])
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stats", help="corpus whitespace statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations")
    p.add_argument("--analysis", choices=["group_means", "punctuation", "temporal", "tags"], required=True)
    p.add_argument("--dimension", choices=["source", "form", "tag", "birth_decade"], default="source")
    p.add_argument("--mode", choices=["per_line", "per_nonstandard_event"])
    p.add_argument("--ws-type", choices=["PREFIX", "INTERNAL"], default="PREFIX")
    p.add_argument("--tag-min", type=int, default=100)
    p.add_argument("--punct-min-count", type=int, default=100)
    p.add_argument("--out", help="write result JSON here")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("serve", help="run the review service")
    p.add_argument("--config")
    p.add_argument("--tasks", help="task manifest JSON Lines")
    p.add_argument("--log", help="verdict log path")
    p.add_argument("--image-dir")
    p.add_argument("--ui-dir")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
