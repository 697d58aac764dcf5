"""
CSV writers for analysis results.

Every writer emits a header row followed by one row per item, in a fixed
order, with floats written by ``repr`` so identical results give
byte-identical files.
"""

import csv
import io
import logging
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from trendbias.overlap import JaccardSummary
from trendbias.stats import (
    BaselinePoint,
    BiasPeriod,
    BiasReport,
    RankCorrelationResult,
)
from trendbias.timeseries import KnownZeroRow, NormalizedSeries, TimeSeries

logger = logging.getLogger(__name__)

BIAS_HEADER = ["bin_index", "streaming_z", "band_mu", "band_sigma", "verdict"]
RANKCORR_HEADER = ["k", "tau_b", "p_value"]
SERIES_HEADER = ["bin_index", "bin_start_ts", "count", "z"]
OVERLAP_HEADER = ["comparison", "n", "median", "mean", "std"]
ZEROS_HEADER = ["rank", "hashtag", "known_zeros", "cumulative_known_zeros"]
BASELINE_HEADER = ["k", "mean_tau_b", "std_tau_b"]
BASELINE_SAMPLE_HEADER = BASELINE_HEADER + ["sample_tau_b"]
PERIODS_HEADER = ["first_bin", "last_bin", "start_ts", "end_ts", "verdict"]
REPLICATES_HEADER = ["replicate", "bin_index", "z"]
GROUND_TRUTH_HEADER = ["sampler", "hashtag", "bin_index"]


def format_value(value: Any) -> str:
    """Render one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):  # enums
        return str(value.value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render a header and rows as CSV text with '\\n' line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    return buffer.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    Write rows to a CSV file, creating parent directories.

    Returns:
        The path written
    """
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(render_csv(header, rows))
    logger.debug(f"Wrote {path}")
    return path


def bias_rows(report: BiasReport) -> List[Tuple[Any, ...]]:
    z = report.streaming_z.z
    return [
        (
            i,
            float(z[i]),
            float(report.band.mu_b[i]),
            float(report.band.sigma_b[i]),
            verdict,
        )
        for i, verdict in enumerate(report.verdicts)
    ]


def rankcorr_rows(results: Sequence[RankCorrelationResult]) -> List[Tuple[Any, ...]]:
    return [(r.k, float(r.tau_b), float(r.p_value)) for r in results]


def series_rows(
    series: TimeSeries, normalized: Optional[NormalizedSeries] = None
) -> List[Tuple[Any, ...]]:
    """Per-bin rows; the z column is empty unless a normalization is given."""
    geometry = series.geometry
    rows = []
    for i, count in enumerate(series.counts.tolist()):
        z = float(normalized.z[i]) if normalized is not None else None
        rows.append((i, geometry.bin_start_ts(i), int(count), z))
    return rows


def overlap_rows(summaries: Mapping[str, JaccardSummary]) -> List[Tuple[Any, ...]]:
    return [
        (name, s.n_comparisons, float(s.median), float(s.mean), float(s.std))
        for name, s in summaries.items()
    ]


def zeros_rows(rows: Sequence[KnownZeroRow]) -> List[Tuple[Any, ...]]:
    return [(r.rank, r.hashtag, r.known_zeros, r.cumulative) for r in rows]


def baseline_rows(
    points: Sequence[BaselinePoint],
    sample: Optional[Sequence[RankCorrelationResult]] = None,
) -> List[Tuple[Any, ...]]:
    """Baseline rows, with the observed sample's tau-b appended when given."""
    observed: Dict[int, float] = {}
    if sample is not None:
        observed = {r.k: float(r.tau_b) for r in sample}
    rows = []
    for point in points:
        row: Tuple[Any, ...] = (point.k, point.mean_tau_b, point.std_tau_b)
        if sample is not None:
            row += (observed.get(point.k, float("nan")),)
        rows.append(row)
    return rows


def periods_rows(periods: Sequence[BiasPeriod]) -> List[Tuple[Any, ...]]:
    return [
        (p.first_bin, p.last_bin, p.start_ts, p.end_ts, p.verdict) for p in periods
    ]


def replicates_rows(report: BiasReport) -> List[Tuple[Any, ...]]:
    return [
        (r, i, float(z))
        for r, replicate in enumerate(report.replicates)
        for i, z in enumerate(replicate.z.tolist())
    ]


def ground_truth_rows(
    biased_bins: Mapping[str, Mapping[str, Iterable[int]]]
) -> List[Tuple[Any, ...]]:
    """Rows sorted by sampler, hashtag and bin."""
    return [
        (sampler, tag, b)
        for sampler in sorted(biased_bins)
        for tag in sorted(biased_bins[sampler])
        for b in sorted(biased_bins[sampler][tag])
    ]
