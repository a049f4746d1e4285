"""Command line interface.

Subcommands: ``index build`` (corpus -> index cache), ``classify``
(label document or image -> code report), ``recommend`` (codes ->
per-method corpus hits), ``pipeline`` (classify + recommend).  Results
are JSON on stdout, warnings go to stderr.  Exit codes: 0 success,
1 usage error, 2 data error, 3 external-command failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .corpus import (
    METHODS,
    build_index,
    ingest_corpus,
    load_index,
    recommend,
    recommend_all,
    split_code_list,
)
from .errors import (
    DetectorFailure,
    ExternalCommandFailure,
    IconorecError,
    PipelineStageFailure,
)
from .matcher import LabelDocument
from .notation import parse
from .pipeline import (
    CONFIG_FIELDS,
    REDUCERS,
    Pipeline,
    PipelineConfig,
    load_config,
)

CONFIG_ENV_VAR = "ICONOREC_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EXTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iconorec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_index = sub.add_parser("index", help="corpus index maintenance")
    index_sub = p_index.add_subparsers(
        dest="index_command", required=True, parser_class=_Parser
    )
    p_build = index_sub.add_parser("build", help="build an index cache from a corpus")
    p_build.add_argument("--corpus", required=True, help="corpus annotation file")
    p_build.add_argument(
        "--format", choices=("json-map", "tsv"), default="json-map",
        help="corpus file format (default: json-map)",
    )
    p_build.add_argument("--out", required=True, help="index cache file to write")

    p_classify = sub.add_parser("classify", help="map an image's labels to codes")
    _add_input_arguments(p_classify)
    _add_config_arguments(p_classify)

    p_recommend = sub.add_parser("recommend", help="recommend corpus images for codes")
    p_recommend.add_argument(
        "--codes", required=True,
        help="comma-separated code list (commas inside brackets are kept)",
    )
    p_recommend.add_argument("--index", required=True, help="index cache file")
    p_recommend.add_argument(
        "--method", choices=("all",) + METHODS, default="all",
        help="recommender to run (default: all, top-1 per method)",
    )
    p_recommend.add_argument("--top-k", type=int, default=1)
    p_recommend.add_argument("--idf-impact", type=float, default=1.0)
    p_recommend.add_argument("--exclude", help="image id to exclude (querying from inside the corpus)")

    p_pipeline = sub.add_parser(
        "pipeline", help="classify, then recommend from the final codes"
    )
    _add_input_arguments(p_pipeline)
    _add_config_arguments(p_pipeline)

    return parser


def _add_input_arguments(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--labels", help="LabelDocument JSON file")
    group.add_argument("--image", help="image file, handled via --detector-cmd")
    p.add_argument("--detector-cmd", help="command emitting LabelDocument JSON for an image")


def _add_config_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")
    p.add_argument("--vocab", help="vocabulary file (JSONL)")
    p.add_argument("--rules", help="rule file (JSON array)")
    p.add_argument("--alias-map", help="label alias map (JSON object)")
    p.add_argument("--index", help="corpus index cache file")
    p.add_argument(
        "--singleton", action="store_true", default=None,
        help="also run the per-label singleton search (off by default)",
    )
    p.add_argument("--reducer", choices=REDUCERS, help="code reducer (default: none)")
    p.add_argument("--external-cmd", help="selector command for --reducer external")
    p.add_argument("--idf-impact", type=float, help="IDF exponent (default: 1.0)")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    try:
        if args.command == "index":
            return _cmd_index_build(args)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "recommend":
            return _cmd_recommend(args)
        return _cmd_pipeline(args)
    except PipelineStageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, (ExternalCommandFailure, DetectorFailure)):
            return EXIT_EXTERNAL
        return EXIT_DATA
    except (ExternalCommandFailure, DetectorFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except (IconorecError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _emit(obj: dict) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_index_build(args) -> int:
    docs = ingest_corpus(args.corpus, format=args.format)
    idx = build_index(docs)
    idx.save(args.out)
    _emit(
        {
            "documents": len(idx),
            "distinct_codes": len(idx.postings),
            "out": args.out,
        }
    )
    return EXIT_OK


def _build_pipeline_config(args, require_index: bool) -> PipelineConfig:
    settings: dict = {}
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        file_cfg = load_config(config_path)
        settings = {name: getattr(file_cfg, name) for name in CONFIG_FIELDS}

    overrides = {
        "vocab_path": args.vocab,
        "rules_path": args.rules,
        "alias_map_path": args.alias_map,
        "corpus_index_path": args.index,
        "run_singleton": args.singleton,
        "reducer": args.reducer,
        "external_cmd": args.external_cmd,
        "idf_impact": args.idf_impact,
        "detector_cmd": args.detector_cmd,
    }
    for name, value in overrides.items():
        if value is not None:
            settings[name] = value
    settings.setdefault("run_singleton", False)

    if not settings.get("vocab_path"):
        raise ValueError("a vocabulary is required (--vocab or config file)")
    if require_index and not settings.get("corpus_index_path"):
        raise ValueError("an index is required (--index or config file)")
    return PipelineConfig(**settings)


def _load_label_document(path: str) -> LabelDocument:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IconorecError(f"invalid label document JSON: {exc}") from exc
    return LabelDocument.from_json(obj)


def _pipeline_input(args):
    if args.labels:
        return _load_label_document(args.labels)
    return args.image


def _cmd_classify(args) -> int:
    cfg = _build_pipeline_config(args, require_index=False)
    report = Pipeline(cfg).classify(_pipeline_input(args))
    _emit(report.to_json())
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    cfg = _build_pipeline_config(args, require_index=True)
    report = Pipeline(cfg).classify_and_recommend(_pipeline_input(args))
    _emit(report.to_json())
    return EXIT_OK


def _cmd_recommend(args) -> int:
    codes = set(split_code_list(args.codes, separators=","))
    if not codes:
        raise ValueError("--codes is empty")
    for code in sorted(codes):
        parse(code)  # surface bad codes as a data error before querying
    idx = load_index(args.index)
    if args.method == "all":
        recs = recommend_all(
            codes, idx, impact=args.idf_impact, exclude=args.exclude
        )
        _emit(
            {
                "query": sorted(codes),
                "method": "all",
                "recommendations": {
                    method: (rec.to_json() if rec else None)
                    for method, rec in sorted(recs.items())
                },
            }
        )
    else:
        hits = recommend(
            codes,
            idx,
            args.method,
            k=args.top_k,
            impact=args.idf_impact,
            exclude=args.exclude,
        )
        _emit(
            {
                "query": sorted(codes),
                "method": args.method,
                "results": [rec.to_json() for rec in hits],
            }
        )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
