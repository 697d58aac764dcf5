"""
Binned hashtag time series and their standard-score normalization.

Bins are half-open, ``[bin_start + i*bin_width, bin_start + (i+1)*bin_width)``,
on UTC epoch seconds. Normalization uses the population standard deviation so
a normalized series has mean 0 and variance 1 exactly.
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, List, NamedTuple, Optional, Tuple

import numpy as np

from trendbias.ingest import HashtagIndex, rank_hashtags

logger = logging.getLogger(__name__)

DEFAULT_BIN_WIDTH = 3600


class GeometryError(ValueError):
    """Invalid or mismatched bin geometry."""


@dataclass(frozen=True)
class BinGeometry:
    """Start, width and number of the fixed-width bins of a series."""

    bin_start: int
    bin_width: int = DEFAULT_BIN_WIDTH
    n_bins: int = 1

    def __post_init__(self) -> None:
        if self.bin_width < 1:
            raise GeometryError(f"bin_width must be at least 1, got {self.bin_width}")
        if self.n_bins < 1:
            raise GeometryError(f"n_bins must be at least 1, got {self.n_bins}")

    @property
    def end(self) -> int:
        """First timestamp past the last bin."""
        return self.bin_start + self.n_bins * self.bin_width

    def bin_start_ts(self, i: int) -> int:
        return self.bin_start + i * self.bin_width

    def bin_indices(self, timestamps: np.ndarray) -> np.ndarray:
        """Bin index of each timestamp, -1 where it falls outside the window."""
        ts = np.asarray(timestamps, dtype=np.int64)
        idx = np.floor_divide(ts - self.bin_start, self.bin_width)
        return np.where((idx >= 0) & (idx < self.n_bins), idx, -1)

    def histogram(self, timestamps: np.ndarray) -> np.ndarray:
        """Count timestamps per bin; out-of-window timestamps are dropped."""
        idx = self.bin_indices(timestamps)
        return np.bincount(idx[idx >= 0], minlength=self.n_bins).astype(np.int64)

    @classmethod
    def covering(
        cls, first_ts: int, last_ts: int, bin_width: int = DEFAULT_BIN_WIDTH
    ) -> "BinGeometry":
        """
        Smallest aligned geometry containing ``[first_ts, last_ts]``.

        The start is ``first_ts`` rounded down to a multiple of ``bin_width``.
        """
        if bin_width < 1:
            raise GeometryError(f"bin_width must be at least 1, got {bin_width}")
        if last_ts < first_ts:
            raise GeometryError(f"empty span: {first_ts} > {last_ts}")
        start = (first_ts // bin_width) * bin_width
        n_bins = (last_ts - start) // bin_width + 1
        return cls(bin_start=start, bin_width=bin_width, n_bins=n_bins)


def _frozen_array(values: object, dtype: Optional[type] = None) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Occurrence counts of one hashtag per bin."""

    hashtag: str
    bin_start: int
    bin_width: int
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size < 1:
            raise GeometryError("a time series needs at least one bin")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValueError(f"counts of '{self.hashtag}' must be finite and >= 0")
        if self.bin_width < 1:
            raise GeometryError(f"bin_width must be at least 1, got {self.bin_width}")
        object.__setattr__(self, "counts", _frozen_array(counts))

    @property
    def n_bins(self) -> int:
        return int(self.counts.size)

    @property
    def geometry(self) -> BinGeometry:
        return BinGeometry(self.bin_start, self.bin_width, self.n_bins)

    def scaled(self, factor: float) -> "TimeSeries":
        """Same series with every count multiplied by ``factor``."""
        return TimeSeries(
            self.hashtag, self.bin_start, self.bin_width, self.counts * factor
        )


@dataclass(frozen=True, eq=False)
class NormalizedSeries:
    """Standard scores of a series, with the mean and deviation used."""

    z: np.ndarray
    mu: float
    sigma: float
    degenerate: bool


class KnownZeroRow(NamedTuple):
    rank: int
    hashtag: str
    known_zeros: int
    cumulative: int


def bin_counts(index: HashtagIndex, hashtag: str, geometry: BinGeometry) -> TimeSeries:
    """
    Bin one hashtag's occurrences.

    Args:
        index: Hashtag index of a stream
        hashtag: Hashtag to bin; an absent hashtag gives an all-zero series
        geometry: Bin start, width and count

    Returns:
        TimeSeries with counts[i] = occurrences in bin i
    """
    counts = geometry.histogram(index.timestamps(hashtag))
    return TimeSeries(hashtag, geometry.bin_start, geometry.bin_width, counts)


def zscore_values(values: np.ndarray) -> NormalizedSeries:
    """
    Standard-score a vector of per-bin values.

    A constant vector has zero spread: it yields all-zero scores with the
    degenerate flag set.
    """
    values = np.asarray(values, dtype=np.float64)
    mu = float(values.mean())
    # exact test for a constant vector; a tiny float std would inflate noise
    if np.all(values == values[0]):
        return NormalizedSeries(
            z=_frozen_array(np.zeros(values.size)), mu=mu, sigma=0.0, degenerate=True
        )
    sigma = float(values.std())
    z = (values - mu) / sigma
    return NormalizedSeries(z=_frozen_array(z), mu=mu, sigma=sigma, degenerate=False)


def standard_score(series: TimeSeries) -> NormalizedSeries:
    """Normalize a series: z_i = (t_i - mean) / population std."""
    return zscore_values(series.counts)


def check_same_geometry(a: TimeSeries, b: TimeSeries) -> None:
    """Raise GeometryError unless both series share start, width and length."""
    if a.geometry != b.geometry:
        raise GeometryError(
            f"bin geometry mismatch: '{a.hashtag}' {a.geometry} vs "
            f"'{b.hashtag}' {b.geometry}"
        )


def known_zero_bins(streaming: TimeSeries, sample: TimeSeries) -> FrozenSet[int]:
    """
    Bins where the streaming series has data and the sample has none.

    Raises:
        GeometryError: If the two series are binned differently
    """
    check_same_geometry(streaming, sample)
    mask = (streaming.counts > 0) & (sample.counts == 0)
    return frozenset(int(i) for i in np.flatnonzero(mask))


def known_zero_profile(
    streaming_index: HashtagIndex,
    sample_index: HashtagIndex,
    top_n: int,
    geometry: BinGeometry,
) -> List[KnownZeroRow]:
    """
    Known-zero counts of the most frequent streaming hashtags, in rank order.

    Args:
        streaming_index: Index of the filtered stream (defines the ranking)
        sample_index: Index of the uniform reference sample
        top_n: Number of hashtags to include (at least 1)
        geometry: Bin geometry shared by both streams

    Returns:
        One row per hashtag with its known-zero count and the running total
    """
    if top_n < 1:
        raise ValueError(f"top_n must be at least 1, got {top_n}")

    rows: List[KnownZeroRow] = []
    running = 0
    for rank, (tag, _) in enumerate(rank_hashtags(streaming_index)[:top_n], start=1):
        zeros = len(
            known_zero_bins(
                bin_counts(streaming_index, tag, geometry),
                bin_counts(sample_index, tag, geometry),
            )
        )
        running += zeros
        rows.append(KnownZeroRow(rank, tag, zeros, running))

    logger.debug(f"Known zeros over top {len(rows)} hashtags: {running}")
    return rows


def cumulative_known_zeros(
    streaming_index: HashtagIndex,
    sample_index: HashtagIndex,
    top_n: int,
    geometry: BinGeometry,
) -> List[Tuple[int, int]]:
    """(rank, cumulative known zeros) over the top_n streaming hashtags."""
    return [
        (row.rank, row.cumulative)
        for row in known_zero_profile(streaming_index, sample_index, top_n, geometry)
    ]
