#!/usr/bin/env python3
"""
Command-line entry point for trendbias.

Subcommands:

    bias      per-bin bias verdicts of hashtags in a filtered stream
    rankcorr  Kendall tau-b of two streams' top-k hashtag lists
    zeros     known-zero counts of the most popular hashtags
    overlap   windowed Jaccard overlap between sources or between times
    synth     generate a synthetic full stream and sampled streams
    baseline  tau-b of random samples of a full stream
    series    binned (and optionally normalized) series of one hashtag

Reports are CSV, written to ``--output`` or to stdout. Logging goes to stderr.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from trendbias import __version__
from trendbias.batch import DEFAULT_WORKERS, detect_bias_many, parse_streams
from trendbias.formatter import (
    BASELINE_HEADER,
    BASELINE_SAMPLE_HEADER,
    BIAS_HEADER,
    GROUND_TRUTH_HEADER,
    OVERLAP_HEADER,
    PERIODS_HEADER,
    RANKCORR_HEADER,
    REPLICATES_HEADER,
    SERIES_HEADER,
    ZEROS_HEADER,
    baseline_rows,
    bias_rows,
    ground_truth_rows,
    overlap_rows,
    periods_rows,
    rankcorr_rows,
    render_csv,
    replicates_rows,
    series_rows,
    write_csv,
    zeros_rows,
)
from trendbias.ingest import (
    Source,
    TweetRecord,
    build_index,
    filter_by_hashtag,
    normalize_hashtag,
    timestamp_span,
    top_k_hashtags,
    write_stream,
)
from trendbias.overlap import (
    DEFAULT_DURATION,
    DEFAULT_PERIOD,
    JaccardSummary,
    WindowScheme,
    between_source_summary,
    between_time_summary,
)
from trendbias.stats import (
    DEFAULT_REPLICATES,
    DEFAULT_SIGMA_MULTIPLIER,
    BandParams,
    BiasReport,
    RankCorrelationError,
    RankCorrelationResult,
    biased_periods,
    detect_bias,
    k_grid,
    kendall_tau_b,
    random_sample_baseline,
    rank_correlation_grid,
)
from trendbias.synth import Scenario, run_scenario
from trendbias.timeseries import (
    DEFAULT_BIN_WIDTH,
    BinGeometry,
    GeometryError,
    bin_counts,
    known_zero_profile,
    standard_score,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
COMMANDS = ("bias", "rankcorr", "zeros", "overlap", "synth", "baseline", "series")

DEFAULT_SEED = 0
DEFAULT_K_MAX = 50
DEFAULT_K_STEP = 10
DEFAULT_TOP_N = 100
DEFAULT_DRAWS = 100


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one command invocation."""

    command: str
    streaming: Optional[str] = None
    sample: Optional[str] = None
    a: Optional[str] = None
    b: Optional[str] = None
    firehose: Optional[str] = None
    input: Optional[str] = None
    scenario: Optional[str] = None
    window_files: Tuple[str, ...] = ()
    hashtags: Tuple[str, ...] = ()
    top_k: Optional[int] = None
    keyword: Optional[str] = None
    bin_width: int = DEFAULT_BIN_WIDTH
    bin_start: Optional[int] = None
    n_bins: Optional[int] = None
    replicates: int = DEFAULT_REPLICATES
    sigma: float = DEFAULT_SIGMA_MULTIPLIER
    seed: Optional[int] = DEFAULT_SEED
    k_max: int = DEFAULT_K_MAX
    k_step: int = DEFAULT_K_STEP
    top_n: int = DEFAULT_TOP_N
    period: int = DEFAULT_PERIOD
    duration: int = DEFAULT_DURATION
    start_ts: Optional[int] = None
    n_windows: Optional[int] = None
    workers: int = DEFAULT_WORKERS
    draws: int = DEFAULT_DRAWS
    sample_size: Optional[int] = None
    normalize: bool = False
    compress: bool = False
    output: Optional[str] = None
    out_dir: Optional[str] = None
    periods_output: Optional[str] = None
    replicates_output: Optional[str] = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command '{self.command}'")
        if self.bin_width < 1:
            raise ValueError(f"--bin-width must be at least 1, got {self.bin_width}")
        if self.n_bins is not None and self.n_bins < 1:
            raise ValueError(f"--n-bins must be at least 1, got {self.n_bins}")
        if self.command == "bias" and self.replicates < 2:
            raise ValueError(f"--replicates must be at least 2, got {self.replicates}")
        if self.sigma <= 0:
            raise ValueError(f"--sigma must be positive, got {self.sigma}")
        if self.k_step < 1 or self.k_max < self.k_step:
            raise ValueError(
                f"--k-max ({self.k_max}) must be at least --k-step ({self.k_step}) >= 1"
            )
        for name in ("top_k", "top_n", "workers", "draws", "sample_size"):
            value = getattr(self, name)
            if value is not None and value < 1:
                flag = "--" + name.replace("_", "-")
                raise ValueError(f"{flag} must be at least 1, got {value}")
        if self.period < 1 or self.duration < 1:
            raise ValueError("--period and --duration must be positive")
        if self.command == "overlap":
            if (self.a is None) != (self.b is None):
                raise ValueError("--a and --b must be given together")
            if self.a is None and not self.window_files:
                raise ValueError("overlap needs --a and --b, or --window-files")
            if self.window_files and self.start_ts is None:
                raise ValueError("--window-files needs --start-ts")
        if self.command == "bias" and not self.hashtags and self.top_k is None:
            raise ValueError("bias needs --hashtag or --top-k")
        if self.command == "series" and len(self.hashtags) != 1:
            raise ValueError("series exports exactly one --hashtag")

    @property
    def multi_hashtag(self) -> bool:
        return self.top_k is not None or len(self.hashtags) > 1

    @property
    def band_params(self) -> BandParams:
        return BandParams(
            n_replicates=self.replicates,
            sigma_multiplier=self.sigma,
            seed=self.seed_or_default,
        )

    @property
    def seed_or_default(self) -> int:
        return DEFAULT_SEED if self.seed is None else self.seed

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Collect the flags a subcommand defines; the rest keep their defaults."""
        values: Dict[str, Any] = {}
        for f in fields(cls):
            if hasattr(args, f.name):
                value = getattr(args, f.name)
                if f.name in ("window_files", "hashtags"):
                    value = tuple(value or ())
                values[f.name] = value
        return cls(**values)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _emit(
    path: Optional[str], header: Sequence[str], rows: List[Tuple[Any, ...]]
) -> None:
    if path is None:
        sys.stdout.write(render_csv(header, rows))
    else:
        write_csv(path, header, rows)
        logger.info(f"Wrote {len(rows)} rows to {path}")


def _load(
    jobs: Sequence[Tuple[str, Source]], config: RunConfig
) -> List[Tuple[TweetRecord, ...]]:
    streams = parse_streams(jobs, config.workers)
    if config.keyword:
        streams = [filter_by_hashtag(stream, config.keyword) for stream in streams]
        logger.info(
            f"Kept records tagged '{normalize_hashtag(config.keyword)}': "
            + ", ".join(str(len(s)) for s in streams)
        )
    return streams


def resolve_geometry(
    config: RunConfig, streams: Sequence[Sequence[TweetRecord]]
) -> BinGeometry:
    """
    Bin geometry from --bin-start/--n-bins, filling gaps from the data span.

    Without --bin-start the first bin starts at the earliest timestamp aligned
    down to a multiple of the bin width; without --n-bins the bins cover the
    latest timestamp.
    """
    width = config.bin_width
    if config.bin_start is not None and config.n_bins is not None:
        return BinGeometry(config.bin_start, width, config.n_bins)

    first, last = timestamp_span(streams)
    if config.bin_start is None:
        geometry = BinGeometry.covering(first, last, width)
    else:
        if last < config.bin_start:
            raise GeometryError(
                f"every timestamp precedes --bin-start {config.bin_start}"
            )
        n_bins = (last - config.bin_start) // width + 1
        geometry = BinGeometry(config.bin_start, width, n_bins)
    if config.n_bins is not None:
        geometry = BinGeometry(geometry.bin_start, width, config.n_bins)
    logger.info(
        f"Using {geometry.n_bins} bins of {width}s starting at {geometry.bin_start}"
    )
    return geometry


def _file_stem(hashtag: str) -> str:
    return hashtag.replace(os.sep, "_") or "_"


def _join(directory: Optional[str], name: str) -> Optional[str]:
    return None if directory is None else os.path.join(directory, name)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _write_bias(
    report: BiasReport,
    geometry: BinGeometry,
    output: Optional[str],
    periods: Optional[str] = None,
    replicates: Optional[str] = None,
) -> None:
    _emit(output, BIAS_HEADER, bias_rows(report))
    if periods is not None:
        rows = periods_rows(biased_periods(report, geometry))
        write_csv(periods, PERIODS_HEADER, rows)
    if replicates is not None:
        write_csv(replicates, REPLICATES_HEADER, replicates_rows(report))
    counts = report.verdict_counts()
    logger.info(
        f"'{report.hashtag}': "
        + ", ".join(f"{v.value} {n}" for v, n in counts.items())
    )


def run_bias(config: RunConfig) -> None:
    """Bootstrap band test of one or more hashtags."""
    assert config.streaming is not None and config.sample is not None
    streaming, sample = _load(
        [(config.streaming, Source.STREAMING), (config.sample, Source.SAMPLE)], config
    )
    geometry = resolve_geometry(config, [streaming, sample])
    streaming_index = build_index(streaming)
    sample_index = build_index(sample)

    if config.top_k is not None:
        hashtags = [tag for tag, _ in top_k_hashtags(streaming_index, config.top_k)]
    else:
        hashtags = list(dict.fromkeys(normalize_hashtag(t) for t in config.hashtags))

    if not config.multi_hashtag:
        tag = hashtags[0]
        report = detect_bias(
            bin_counts(streaming_index, tag, geometry),
            bin_counts(sample_index, tag, geometry),
            config.band_params,
        )
        _write_bias(
            report,
            geometry,
            config.output,
            config.periods_output,
            config.replicates_output,
        )
        return

    if config.output is None:
        raise ValueError("--output must name a directory when testing several hashtags")
    results = detect_bias_many(
        streaming_index,
        sample_index,
        hashtags,
        geometry,
        config.band_params,
        config.workers,
    )
    failed = [r for r in results if not r.success]
    for result in results:
        if result.report is None:
            continue
        stem = _file_stem(result.hashtag) + ".csv"
        _write_bias(
            result.report,
            geometry,
            os.path.join(config.output, stem),
            _join(config.periods_output, stem),
            _join(config.replicates_output, stem),
        )
    if failed:
        raise ValueError(
            f"bias test failed for {len(failed)} hashtag(s); first: "
            f"'{failed[0].hashtag}': {failed[0].error}"
        )


def run_rankcorr(config: RunConfig) -> None:
    """tau-b of the two streams' top-k lists over the k grid."""
    assert config.a is not None and config.b is not None
    stream_a, stream_b = _load(
        [(config.a, Source.SAMPLE), (config.b, Source.SAMPLE)], config
    )
    results = rank_correlation_grid(
        build_index(stream_a),
        build_index(stream_b),
        k_grid(config.k_max, config.k_step),
    )
    _emit(config.output, RANKCORR_HEADER, rankcorr_rows(results))


def run_zeros(config: RunConfig) -> None:
    """Known zeros of the top-n streaming hashtags."""
    assert config.streaming is not None and config.sample is not None
    streaming, sample = _load(
        [(config.streaming, Source.STREAMING), (config.sample, Source.SAMPLE)], config
    )
    geometry = resolve_geometry(config, [streaming, sample])
    rows = known_zero_profile(
        build_index(streaming), build_index(sample), config.top_n, geometry
    )
    _emit(config.output, ZEROS_HEADER, zeros_rows(rows))


def _scheme_start(config: RunConfig, streams: Sequence[Sequence[TweetRecord]]) -> int:
    if config.start_ts is not None:
        return config.start_ts
    return timestamp_span(streams)[0]


def run_overlap(config: RunConfig) -> None:
    """Between-source and/or between-time Jaccard summaries."""
    summaries: Dict[str, JaccardSummary] = {}

    if config.a is not None and config.b is not None:
        stream_a, stream_b = _load(
            [(config.a, Source.STREAMING), (config.b, Source.STREAMING)], config
        )
        start = _scheme_start(config, [stream_a, stream_b])
        if config.n_windows is not None:
            scheme = WindowScheme(
                start, config.period, config.duration, config.n_windows
            )
        else:
            last = timestamp_span([stream_a, stream_b])[1]
            scheme = WindowScheme.fitting(start, last, config.period, config.duration)
        summaries["between_source"] = between_source_summary(stream_a, stream_b, scheme)

    if config.window_files:
        jobs = [(path, Source.STREAMING) for path in config.window_files]
        windows = _load(jobs, config)
        assert config.start_ts is not None
        scheme = WindowScheme(
            config.start_ts, config.period, config.duration, len(windows)
        )
        summaries["between_time"] = between_time_summary(windows, scheme)

    _emit(config.output, OVERLAP_HEADER, overlap_rows(summaries))


def run_synth(config: RunConfig) -> None:
    """Generate a scenario's streams and ground truth into --out-dir."""
    assert config.scenario is not None and config.out_dir is not None
    scenario = Scenario.load(config.scenario)
    truth = run_scenario(scenario, seed=config.seed)
    ext = "ndjson.gz" if config.compress else "ndjson"
    out_dir = config.out_dir

    write_stream(truth.firehose, os.path.join(out_dir, f"firehose.{ext}"))
    for name, stream in truth.streams.items():
        write_stream(stream, os.path.join(out_dir, f"{name}.{ext}"))
    for name, windows in truth.window_streams.items():
        for w, window in enumerate(windows):
            path = os.path.join(out_dir, "windows", name, f"window_{w:04d}.{ext}")
            write_stream(window, path)
    write_csv(
        os.path.join(out_dir, "ground_truth.csv"),
        GROUND_TRUTH_HEADER,
        ground_truth_rows(truth.biased_bins),
    )
    logger.info(f"Wrote scenario outputs to {out_dir}")


def run_baseline(config: RunConfig) -> None:
    """Random-sample tau-b band, optionally with an observed sample's tau-b."""
    assert config.firehose is not None
    jobs = [(config.firehose, Source.FIREHOSE)]
    if config.sample is not None:
        jobs.append((config.sample, Source.SAMPLE))
    streams = _load(jobs, config)
    firehose = streams[0]
    sample = streams[1] if len(streams) > 1 else None

    sample_size = config.sample_size
    if sample_size is None:
        if sample is None:
            raise ValueError("baseline needs --sample-size or --sample")
        sample_size = len(sample)

    grid = k_grid(config.k_max, config.k_step)
    points = random_sample_baseline(
        firehose, sample_size, config.draws, grid, config.seed_or_default
    )

    if sample is None:
        _emit(config.output, BASELINE_HEADER, baseline_rows(points))
        return

    firehose_index = build_index(firehose)
    sample_index = build_index(sample)
    observed: List[RankCorrelationResult] = []
    for k in grid:
        try:
            result = kendall_tau_b(
                top_k_hashtags(firehose_index, k), top_k_hashtags(sample_index, k)
            )
        except RankCorrelationError as e:
            logger.warning(f"Sample tau-b undefined at k={k}: {e}")
            continue
        observed.append(replace(result, k=k))
    _emit(config.output, BASELINE_SAMPLE_HEADER, baseline_rows(points, observed))


def run_series(config: RunConfig) -> None:
    """Export one hashtag's binned series."""
    assert config.input is not None
    (stream,) = _load([(config.input, Source.SAMPLE)], config)
    geometry = resolve_geometry(config, [stream])
    hashtag = normalize_hashtag(config.hashtags[0])
    series = bin_counts(build_index(stream), hashtag, geometry)
    normalized = standard_score(series) if config.normalize else None
    _emit(config.output, SERIES_HEADER, series_rows(series, normalized))


RUNNERS = {
    "bias": run_bias,
    "rankcorr": run_rankcorr,
    "zeros": run_zeros,
    "overlap": run_overlap,
    "synth": run_synth,
    "baseline": run_baseline,
    "series": run_series,
}


def run(config: RunConfig) -> int:
    """Dispatch a validated configuration; returns the exit status."""
    RUNNERS[config.command](config)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_binning(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--bin-width", type=int, default=DEFAULT_BIN_WIDTH, help="Bin width in seconds"
    )
    parser.add_argument(
        "--bin-start",
        type=int,
        help="Start of the first bin (epoch seconds); derived from the data if omitted",
    )
    parser.add_argument(
        "--n-bins", type=int, help="Number of bins; derived from the data if omitted"
    )


def _add_keyword(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--keyword", help="Keep only records carrying this hashtag before analysis"
    )


def _add_output(parser: argparse.ArgumentParser, help_text: str) -> None:
    parser.add_argument("-o", "--output", help=help_text)


def _add_workers(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--workers",
        type=int,
        default=DEFAULT_WORKERS,
        help="Maximum number of parallel workers",
    )


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--k-max", type=int, default=DEFAULT_K_MAX, help="Longest top-k list"
    )
    parser.add_argument(
        "--k-step", type=int, default=DEFAULT_K_STEP, help="Step of the k grid"
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    formatter = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="trendbias",
        description="Detect sample bias in hashtag trends of filtered streams.",
        formatter_class=formatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug detail"
    )
    verbosity.add_argument(
        "-q", "--quiet", action="store_true", help="Log warnings and errors only"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    # bias
    p = sub.add_parser(
        "bias",
        help="Flag bins where a filtered stream misrepresents a hashtag's trend",
        formatter_class=formatter,
    )
    p.add_argument("--streaming", required=True, help="Filtered stream file")
    p.add_argument("--sample", required=True, help="Uniform reference sample file")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument(
        "--hashtag",
        dest="hashtags",
        action="append",
        help="Hashtag to test (repeatable)",
    )
    which.add_argument(
        "--top-k", type=int, help="Test the k most frequent streaming hashtags"
    )
    _add_binning(p)
    p.add_argument(
        "--replicates",
        type=int,
        default=DEFAULT_REPLICATES,
        help="Bootstrap replicates",
    )
    p.add_argument(
        "--sigma",
        type=float,
        default=DEFAULT_SIGMA_MULTIPLIER,
        help="Band half-width in replicate standard deviations",
    )
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    _add_keyword(p)
    _add_workers(p)
    _add_output(
        p, "Report file (one hashtag) or directory (several); stdout if omitted"
    )
    p.add_argument(
        "--periods-output",
        help="Write merged OVER/UNDER periods here (directory for several hashtags)",
    )
    p.add_argument(
        "--replicates-output",
        help="Write bootstrap replicate scores here (directory for several hashtags)",
    )

    # rankcorr
    p = sub.add_parser(
        "rankcorr",
        help="Kendall tau-b between the top-k hashtags of two streams",
        formatter_class=formatter,
    )
    p.add_argument("--a", required=True, help="First stream file")
    p.add_argument("--b", required=True, help="Second stream file")
    _add_grid(p)
    _add_keyword(p)
    _add_workers(p)
    _add_output(p, "Report file; stdout if omitted")

    # zeros
    p = sub.add_parser(
        "zeros",
        help="Known zeros of the most popular streaming hashtags",
        formatter_class=formatter,
    )
    p.add_argument("--streaming", required=True, help="Filtered stream file")
    p.add_argument("--sample", required=True, help="Uniform reference sample file")
    p.add_argument(
        "--top-n", type=int, default=DEFAULT_TOP_N, help="Number of hashtags"
    )
    _add_binning(p)
    _add_keyword(p)
    _add_workers(p)
    _add_output(p, "Report file; stdout if omitted")

    # overlap
    p = sub.add_parser(
        "overlap",
        help="Windowed Jaccard overlap of record ids",
        formatter_class=formatter,
    )
    p.add_argument("--a", help="First source's stream file")
    p.add_argument("--b", help="Second source's stream file")
    p.add_argument(
        "--window-files",
        nargs="+",
        help="One stream file per consecutive query window, in order",
    )
    p.add_argument(
        "--period",
        type=int,
        default=DEFAULT_PERIOD,
        help="Seconds between window starts",
    )
    p.add_argument(
        "--duration",
        type=int,
        default=DEFAULT_DURATION,
        help="Window length in seconds",
    )
    p.add_argument(
        "--start-ts",
        type=int,
        help=(
            "Start of the first window; required with --window-files, "
            "the earliest timestamp of --a/--b if omitted"
        ),
    )
    p.add_argument(
        "--n-windows",
        type=int,
        help="Number of windows for --a/--b; as many as fit if omitted",
    )
    _add_keyword(p)
    _add_workers(p)
    _add_output(p, "Report file; stdout if omitted")

    # synth
    p = sub.add_parser(
        "synth",
        help="Generate a synthetic full stream, sampled streams and ground truth",
        formatter_class=formatter,
    )
    p.add_argument("--scenario", required=True, help="Scenario JSON file")
    p.add_argument("--out-dir", required=True, help="Output directory")
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Random seed; the scenario's seed if omitted",
    )
    p.add_argument(
        "--compress", action="store_true", help="Write gzip-compressed record files"
    )

    # baseline
    p = sub.add_parser(
        "baseline",
        help="tau-b of random samples of a full stream against the full stream",
        formatter_class=formatter,
    )
    p.add_argument("--firehose", required=True, help="Full stream file")
    p.add_argument(
        "--sample", help="Observed sample to compare against the baseline band"
    )
    p.add_argument(
        "--sample-size",
        type=int,
        help="Records per random sample; the size of --sample if omitted",
    )
    p.add_argument(
        "--draws", type=int, default=DEFAULT_DRAWS, help="Number of random samples"
    )
    _add_grid(p)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    _add_keyword(p)
    _add_workers(p)
    _add_output(p, "Report file; stdout if omitted")

    # series
    p = sub.add_parser(
        "series",
        help="Binned occurrence counts of one hashtag",
        formatter_class=formatter,
    )
    p.add_argument("--input", required=True, help="Stream file")
    p.add_argument(
        "--hashtag",
        dest="hashtags",
        action="append",
        required=True,
        help="Hashtag to export",
    )
    p.add_argument(
        "--normalize",
        action="store_true",
        help="Fill the z column with standard scores",
    )
    _add_binning(p)
    _add_keyword(p)
    _add_output(p, "Report file; stdout if omitted")

    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Command-line entry point; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        config = RunConfig.from_args(args)
    except ValueError as e:
        parser.error(str(e))

    try:
        return run(config)
    except (ValueError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"trendbias: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
