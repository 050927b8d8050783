"""Command-line front end.

Subcommands: analyze (the default), build-dict, bench and dict-info.
`analyze` reads lines from files or stdin and prints one token per line
followed by EOS, wakati output, or a custom node format.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from kotowari.compiler import DictionaryMeta, compile_dictionary, save
from kotowari.errors import KotowariError, TemplateError
from kotowari.features import FeatureSchema, render_feature
from kotowari.report import BenchReport, format_bench_text, write_bench_report
from kotowari.source import (
    parse_char_def,
    parse_lexicon,
    parse_matrix,
    parse_unk_def,
    validate_context_ids,
)
from kotowari.tagger import Diagnostic, Tagger, compile_template, new_tagger, render_template

__all__ = ["main"]

_SUBCOMMANDS = ("analyze", "build-dict", "bench", "dict-info")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kotowari", description="Japanese morphological analyzer"
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", help="tokenize text, one token per output line")
    p.add_argument("-d", "--dicdir", default=None, help="dictionary file or directory")
    p.add_argument(
        "-O",
        "--output-format-type",
        dest="output_mode",
        choices=["wakati"],
        default=None,
        help="wakati: print surfaces separated by spaces",
    )
    p.add_argument("-F", "--node-format", dest="template", default=None,
                   help="custom per-token format template")
    p.add_argument("-o", "--output", default=None, help="write output to this file")
    p.add_argument("inputs", nargs="*", help="input files (default: stdin)")

    p = sub.add_parser("build-dict", help="compile dictionary sources to a .ktd file")
    p.add_argument("source_dir", help="directory with *.csv, matrix.def, char.def, unk.def, schema.json")
    p.add_argument("-o", "--output", required=True, help="output .ktd path")
    p.add_argument("--name", default=None, help="override dictionary name")
    p.add_argument("--dict-version", default=None, help="override dictionary version")
    p.add_argument("--source-note", default=None, help="override provenance note")

    p = sub.add_parser("bench", help="benchmark tokenization over a corpus")
    p.add_argument("corpus", help="UTF-8 text corpus")
    p.add_argument("-d", "--dicdir", default=None)
    p.add_argument("-n", "--runs", type=int, default=10)
    p.add_argument("--report-dir", default=None,
                   help="also write bench.tsv and bench.png here")

    p = sub.add_parser("dict-info", help="print dictionary metadata and schema")
    p.add_argument("-d", "--dicdir", default=None)
    p.add_argument("--json", action="store_true", dest="as_json")

    return parser


def _make_tagger(dicdir, template=None):
    result = new_tagger(dicdir, format_template=template)
    if isinstance(result, Diagnostic):
        print(result.render(), file=sys.stderr)
        return None
    return result


def _default_renderer(tagger: Tagger):
    """Per-token renderer for default mode.

    Dictionaries may ship their own display layout in meta.default_template
    (the bundled toy dictionary does); otherwise fall back to the classic
    surface TAB comma-joined-features form.
    """
    template = tagger.dictionary.meta.default_template
    if template:
        ops = compile_template(template)
        return lambda tok: render_template(ops, tok)
    return lambda tok: tok.surface + "\t" + render_feature(tok.feature, absent="*")


def run_analyze(args) -> int:
    tagger = _make_tagger(args.dicdir, args.template)
    if tagger is None:
        return 1

    wakati = args.output_mode == "wakati"
    if args.template is not None:
        ops = compile_template(args.template)
        render = lambda tok: render_template(ops, tok)
    elif not wakati:
        render = _default_renderer(tagger)

    out = sys.stdout
    close = False
    if args.output:
        out = open(args.output, "w", encoding="utf-8")
        close = True
    try:
        for stream, name in _input_streams(args.inputs):
            if stream is None:
                print(f"cannot read input file: {name}", file=sys.stderr)
                return 2
            with stream:
                for raw in stream:
                    line = raw.rstrip("\n").rstrip("\r")
                    if wakati:
                        out.write(tagger.wakati(line) + "\n")
                    else:
                        for tok in tagger.tag_line(line):
                            out.write(render(tok) + "\n")
                        out.write("EOS\n")
                    out.flush()
    finally:
        if close:
            out.close()
    return 0


def _input_streams(inputs):
    if not inputs:
        yield sys.stdin, "<stdin>"
        return
    for name in inputs:
        try:
            yield open(name, "r", encoding="utf-8"), name
        except OSError:
            yield None, name


def load_sources(source_dir: Path):
    """Read and parse all dictionary sources in a directory."""
    csvs = sorted(source_dir.glob("*.csv"))
    if not csvs:
        raise KotowariError(f"no lexicon *.csv files in {source_dir}")
    for required in ("matrix.def", "char.def", "unk.def", "schema.json"):
        if not (source_dir / required).exists():
            raise KotowariError(f"missing required source file: {source_dir / required}")

    matrix = parse_matrix((source_dir / "matrix.def").read_text(encoding="utf-8"),
                          source="matrix.def")
    chars = parse_char_def((source_dir / "char.def").read_text(encoding="utf-8"),
                           source="char.def")
    unk = parse_unk_def((source_dir / "unk.def").read_text(encoding="utf-8"),
                        source="unk.def")
    lexicon = []
    for path in csvs:
        entries = parse_lexicon(path.read_text(encoding="utf-8"), source=path.name)
        validate_context_ids(entries, matrix, source=path.name)
        lexicon.extend(entries)

    manifest = json.loads((source_dir / "schema.json").read_text(encoding="utf-8"))
    schema = FeatureSchema(
        manifest["name"],
        tuple(manifest["fields"]),
        dict(manifest["roles"]),
        bool(manifest.get("pos_joined", False)),
    )
    meta = DictionaryMeta(
        dictionary_name=manifest.get("dictionary_name", source_dir.name),
        dictionary_version=manifest.get("dictionary_version", "0"),
        entry_count=0,
        source_note=manifest.get("source_note", ""),
        default_template=manifest.get("default_template", ""),
    )
    return lexicon, matrix, chars, unk, schema, meta


def run_build_dict(args) -> int:
    source_dir = Path(args.source_dir)
    try:
        lexicon, matrix, chars, unk, schema, meta = load_sources(source_dir)
        if args.name or args.dict_version or args.source_note is not None:
            meta = DictionaryMeta(
                dictionary_name=args.name or meta.dictionary_name,
                dictionary_version=args.dict_version or meta.dictionary_version,
                entry_count=0,
                source_note=meta.source_note if args.source_note is None else args.source_note,
                default_template=meta.default_template,
            )
        dictionary = compile_dictionary(
            lexicon, matrix, chars, unk, schema, meta, lexicon_source="lexicon"
        )
        data = save(dictionary)
    except KotowariError as exc:
        print(f"build-dict failed: {exc}", file=sys.stderr)
        return 1
    Path(args.output).write_bytes(data)
    m = dictionary.meta
    print(
        f"wrote {args.output}: name={m.dictionary_name} "
        f"entries={m.entry_count} version={m.dictionary_version}"
    )
    return 0


def run_bench(args) -> int:
    try:
        text = Path(args.corpus).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read corpus: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    tagger = _make_tagger(args.dicdir)
    construction_ms = (time.perf_counter() - t0) * 1000.0
    if tagger is None:
        return 1

    lines = text.split("\n")
    runs_ms = []
    counts = set()
    for _ in range(max(1, args.runs)):
        t0 = time.perf_counter()
        count = 0
        for line in lines:
            count += len(tagger.tag_line(line))
        runs_ms.append((time.perf_counter() - t0) * 1000.0)
        counts.add(count)
    if len(counts) != 1:
        print(f"bench determinism check failed: token counts {sorted(counts)}",
              file=sys.stderr)
        return 1

    report = BenchReport(
        corpus=args.corpus,
        runs_ms=tuple(runs_ms),
        construction_ms=construction_ms,
        token_count=counts.pop(),
        char_count=len(text),
    )
    print(format_bench_text(report))
    if args.report_dir:
        for path in write_bench_report(report, args.report_dir):
            print(f"wrote {path}")
    return 0


def run_dict_info(args) -> int:
    tagger = _make_tagger(args.dicdir)
    if tagger is None:
        return 1
    meta = tagger.dictionary.meta
    schema = tagger.dictionary.schema
    if args.as_json:
        print(
            json.dumps(
                {
                    "dictionary_name": meta.dictionary_name,
                    "dictionary_version": meta.dictionary_version,
                    "entry_count": meta.entry_count,
                    "format_version": meta.format_version,
                    "source_note": meta.source_note,
                    "default_template": meta.default_template,
                    "schema": {
                        "name": schema.name,
                        "fields": list(schema.field_names),
                        "roles": dict(schema.named_roles),
                    },
                },
                ensure_ascii=False,
            )
        )
    else:
        print(f"name: {meta.dictionary_name}")
        print(f"version: {meta.dictionary_version}")
        print(f"entries: {meta.entry_count}")
        print(f"format_version: {meta.format_version}")
        if meta.source_note:
            print(f"source_note: {meta.source_note}")
        print(f"schema: {schema.name} ({len(schema.field_names)} fields)")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # bare `kotowari ...` defaults to the analyze subcommand
    if not argv or argv[0] not in _SUBCOMMANDS and argv[0] not in ("-h", "--help"):
        argv.insert(0, "analyze")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return run_analyze(args)
        if args.command == "build-dict":
            return run_build_dict(args)
        if args.command == "bench":
            return run_bench(args)
        if args.command == "dict-info":
            return run_dict_info(args)
    except TemplateError as exc:
        print(f"bad format template: {exc}", file=sys.stderr)
        return 1
    parser.print_help()
    return 0


if __name__ == "__main__":
    sys.exit(main())
