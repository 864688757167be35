"""emailnet command line: scan, analyze, run, gen.

Exit status: 0 success, 1 analysis error, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__, synth_corpus
from .classifier import load_policy, load_stoplist
from .export import EXTENSIONS, FORMATS, export_graph
from .extractor import ScanConfig, ScanIOError, scan_image
from .feature_io import FeatureFileError, read_feature_file, write_feature_file
from .graph_builder import DEFAULT_WINDOW
from .graph_metrics import EigenvectorConvergenceError
from .report import analyze_records

EXIT_OK, EXIT_ANALYSIS, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("emailnet")


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _scan(image: str, output: str | None) -> list:
    if not Path(image).is_file():
        raise CliError(f"cannot read image {image!r}: no such file")
    t0 = time.perf_counter()
    try:
        records = scan_image(image, ScanConfig())
    except (OSError, ScanIOError) as exc:
        raise CliError(f"reading {image}: {exc}") from exc
    elapsed = time.perf_counter() - t0
    try:
        if output in (None, "-"):
            write_feature_file(records, sys.stdout.buffer)
        else:
            with open(output, "wb") as fh:
                write_feature_file(records, fh)
    except OSError as exc:
        raise CliError(f"writing {output}: {exc}") from exc
    print(f"{len(records)} records in {elapsed:.2f}s", file=sys.stderr)
    return records


def _analyze(records, args, outdir: Path) -> None:
    try:
        policy = load_policy(args.policy)
        stoplist = load_stoplist(args.stoplist)
    except (OSError, ValueError) as exc:
        raise CliError(f"loading configuration: {exc}") from exc
    try:
        report = analyze_records(
            records, window=args.window, k=args.top_k, policy=policy, stoplist=stoplist,
            drive_id=args.drive_id, include_singletons=args.include_singletons,
        )
    except (EigenvectorConvergenceError, ValueError) as exc:
        raise CliError(f"analysis failed: {exc}", EXIT_ANALYSIS) from exc
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.txt").write_text(report.to_text())
        (outdir / "report.json").write_text(report.to_json())
        (outdir / "metrics.csv").write_text(report.metrics_csv())
        gdir = outdir / "components"
        gdir.mkdir(exist_ok=True)
        for entry in report.components:
            text = export_graph(entry.component, args.format, entry.communities, entry.full_centrality)
            (gdir / (entry.id + EXTENSIONS[args.format])).write_text(text)
    except OSError as exc:
        raise CliError(f"writing results to {outdir}: {exc}") from exc
    sys.stdout.write(report.to_text())


def cmd_scan(args) -> int:
    _scan(args.image, args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        with open(args.features, "rb") as fh:
            parsed = read_feature_file(fh)
    except OSError as exc:
        raise CliError(f"cannot read feature file {args.features!r}: {exc}") from exc
    except FeatureFileError as exc:
        raise CliError(str(exc), EXIT_ANALYSIS) from exc
    _analyze(parsed.records, args, Path(args.output))
    return EXIT_OK


def cmd_run(args) -> int:
    outdir = Path(args.output)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {outdir}: {exc}") from exc
    records = _scan(args.image, str(outdir / "features.txt"))
    _analyze(records, args, outdir)
    return EXIT_OK


def _preset(args) -> synth_corpus.ScenarioSpec:
    p = args.preset
    if p == "two-cluster":
        return synth_corpus.two_cluster_scenario(args.seed)
    if p == "owner":
        return synth_corpus.owner_drive_scenario(args.seed)
    if p == "server":
        return synth_corpus.server_drive_scenario(args.seed, args.accounts)
    return synth_corpus.shape_scenario(args.seed, p)


def cmd_gen(args) -> int:
    try:
        if args.scenario:
            spec = synth_corpus.ScenarioSpec.load(args.scenario)
            if args.seed is not None:
                spec.rng_seed = args.seed
        else:
            args.seed = 0 if args.seed is None else args.seed
            spec = _preset(args)
        if args.size:
            spec.image_size = args.size
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise CliError(f"bad scenario: {exc}") from exc
    manifest_path = args.manifest or args.output + ".manifest.tsv"
    try:
        with open(args.output, "wb") as fh:
            manifest = synth_corpus.write_image(spec, fh)
        Path(manifest_path).write_text(manifest.to_text())
    except synth_corpus.SpecOverflowError as exc:
        raise CliError(str(exc)) from exc
    except OSError as exc:
        raise CliError(f"writing image: {exc}") from exc
    print(f"wrote {spec.image_size} bytes, {len(manifest)} planted occurrences", file=sys.stderr)
    return EXIT_OK


def _analysis_flags(p):
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--window", type=_positive, default=DEFAULT_WINDOW, help="co-reference window in bytes")
    p.add_argument("--top-k", type=_positive, default=20, help="number of components analysed")
    p.add_argument("--stoplist", help="domain stop-list file (default: packaged list)")
    p.add_argument("--policy", help="classifier policy file (key = value)")
    p.add_argument("--format", choices=FORMATS, default="graphml", help="component graph export format")
    p.add_argument("--drive-id", default="d1")
    p.add_argument("--include-singletons", action="store_true", help="list singleton addresses in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emailnet", description="Email co-reference networks from disk images.")
    parser.add_argument("--version", action="version", version=f"emailnet {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="extract email features from an image")
    p.add_argument("image")
    p.add_argument("-o", "--output", help="feature file (default: stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("analyze", help="build and analyse the network from a feature file")
    p.add_argument("features")
    _analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="scan then analyze")
    p.add_argument("image")
    _analysis_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="write a synthetic image and its manifest")
    p.add_argument("-o", "--output", required=True, help="image path")
    p.add_argument("--manifest", help="manifest path (default: <image>.manifest.tsv)")
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--preset", default="owner",
                   choices=["two-cluster", "owner", "server", *synth_corpus.SHAPES])
    p.add_argument("--accounts", type=_positive, default=3, help="accounts for the server preset")
    p.add_argument("--seed", type=int)
    p.add_argument("--size", type=_positive, help="override image size in bytes")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"emailnet: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
