"""
Windowed Jaccard overlap between record streams.

Queries are modelled as overlapping windows: a new window starts every
``period`` seconds and lasts ``duration`` seconds (defaults 1200 and 1800, so
consecutive windows share 600 seconds). Two comparisons are supported:

* between sources - the same window collected twice (e.g. from two regions),
  compared over the full window;
* between times - consecutive windows of one source, compared only over the
  interval they share.

Scores are Jaccard indices of record-id sets.
"""

import logging
from dataclasses import dataclass
from typing import AbstractSet, Hashable, Iterable, List, Sequence, Tuple

import numpy as np

from trendbias.ingest import TweetRecord

logger = logging.getLogger(__name__)

DEFAULT_PERIOD = 1200
DEFAULT_DURATION = 1800


class WindowSchemeError(ValueError):
    """A window scheme cannot support the requested comparison."""


@dataclass(frozen=True)
class WindowScheme:
    start_ts: int
    period: int = DEFAULT_PERIOD
    duration: int = DEFAULT_DURATION
    n_windows: int = 1

    def __post_init__(self) -> None:
        if self.period < 1 or self.duration < 1:
            raise WindowSchemeError("period and duration must be positive")
        if self.n_windows < 0:
            raise WindowSchemeError(f"n_windows must be >= 0, got {self.n_windows}")

    @property
    def overlap_seconds(self) -> int:
        return max(self.duration - self.period, 0)

    def window(self, i: int) -> Tuple[int, int]:
        """Half-open [start, end) of window i."""
        start = self.start_ts + i * self.period
        return start, start + self.duration

    def overlap(self, i: int) -> Tuple[int, int]:
        """Half-open interval shared by windows i and i+1."""
        return self.start_ts + (i + 1) * self.period, self.window(i)[1]

    @classmethod
    def fitting(
        cls,
        first_ts: int,
        last_ts: int,
        period: int = DEFAULT_PERIOD,
        duration: int = DEFAULT_DURATION,
    ) -> "WindowScheme":
        """Every complete window that starts at first_ts and ends by last_ts + 1."""
        span = last_ts + 1 - first_ts
        n_windows = 0 if span < duration else (span - duration) // period + 1
        return cls(first_ts, period, duration, n_windows)


@dataclass(frozen=True)
class JaccardSummary:
    n_comparisons: int
    median: float
    mean: float
    std: float


def jaccard(ids_a: AbstractSet[Hashable], ids_b: AbstractSet[Hashable]) -> float:
    """
    Jaccard index |A & B| / |A | B|.

    Two empty sets are identical and score 1.0.
    """
    union = len(ids_a | ids_b)
    if union == 0:
        return 1.0
    return len(ids_a & ids_b) / union


def ids_between(records: Iterable[TweetRecord], start: int, end: int) -> frozenset:
    """Ids of the records with start <= ts < end."""
    return frozenset(record.id for record in records if start <= record.ts < end)


class _Timeline:
    """Records sorted by timestamp, for repeated interval lookups."""

    def __init__(self, records: Sequence[TweetRecord]) -> None:
        n = len(records)
        ts = np.fromiter((r.ts for r in records), dtype=np.int64, count=n)
        ids = np.fromiter((r.id for r in records), dtype=np.int64, count=n)
        order = np.argsort(ts, kind="stable")
        self._ts = ts[order]
        self._ids = ids[order]

    def ids_between(self, start: int, end: int) -> frozenset:
        lo = int(np.searchsorted(self._ts, start, side="left"))
        hi = int(np.searchsorted(self._ts, end, side="left"))
        return frozenset(self._ids[lo:hi].tolist())


def summarize(scores: Sequence[float]) -> JaccardSummary:
    """Median, mean and population standard deviation of Jaccard scores."""
    if not scores:
        raise WindowSchemeError("no comparisons to summarize")
    values = np.asarray(scores, dtype=np.float64)
    return JaccardSummary(
        n_comparisons=int(values.size),
        median=float(np.median(values)),
        mean=float(values.mean()),
        std=float(values.std()),
    )


def cut_windows(
    stream: Sequence[TweetRecord], scheme: WindowScheme
) -> List[Tuple[TweetRecord, ...]]:
    """Slice one stream into the scheme's windows."""
    ordered = sorted(stream, key=lambda r: (r.ts, r.id))
    ts = np.fromiter((r.ts for r in ordered), dtype=np.int64, count=len(ordered))
    windows = []
    for i in range(scheme.n_windows):
        start, end = scheme.window(i)
        lo = int(np.searchsorted(ts, start, side="left"))
        hi = int(np.searchsorted(ts, end, side="left"))
        windows.append(tuple(ordered[lo:hi]))
    return windows


def between_source_scores(
    stream_a: Sequence[TweetRecord],
    stream_b: Sequence[TweetRecord],
    scheme: WindowScheme,
) -> List[float]:
    """Per-window Jaccard of the full-window id sets of two streams."""
    if scheme.n_windows == 0:
        raise WindowSchemeError("the window scheme has no windows")
    timeline_a, timeline_b = _Timeline(stream_a), _Timeline(stream_b)
    scores = []
    for i in range(scheme.n_windows):
        start, end = scheme.window(i)
        scores.append(
            jaccard(
                timeline_a.ids_between(start, end),
                timeline_b.ids_between(start, end),
            )
        )
    return scores


def between_source_summary(
    stream_a: Sequence[TweetRecord],
    stream_b: Sequence[TweetRecord],
    scheme: WindowScheme,
) -> JaccardSummary:
    """
    Compare two streams window by window over the whole window.

    Raises:
        WindowSchemeError: If the scheme has no windows
    """
    summary = summarize(between_source_scores(stream_a, stream_b, scheme))
    logger.info(
        f"Between-source overlap over {summary.n_comparisons} windows: "
        f"median {summary.median:.3f}, mean {summary.mean:.3f}"
    )
    return summary


def between_time_scores(
    windows: Sequence[Sequence[TweetRecord]], scheme: WindowScheme
) -> List[float]:
    """Jaccard of consecutive windows, restricted to their shared interval."""
    if scheme.duration <= scheme.period:
        raise WindowSchemeError(
            f"windows do not overlap (duration {scheme.duration} <= "
            f"period {scheme.period})"
        )
    if len(windows) < 2:
        raise WindowSchemeError(f"need at least 2 windows, got {len(windows)}")
    if len(windows) != scheme.n_windows:
        raise WindowSchemeError(
            f"got {len(windows)} window streams for a scheme of {scheme.n_windows}"
        )

    timelines = [_Timeline(window) for window in windows]
    scores = []
    for i in range(len(windows) - 1):
        start, end = scheme.overlap(i)
        scores.append(
            jaccard(
                timelines[i].ids_between(start, end),
                timelines[i + 1].ids_between(start, end),
            )
        )
    return scores


def between_time_summary(
    windows: Sequence[Sequence[TweetRecord]], scheme: WindowScheme
) -> JaccardSummary:
    """
    Compare each window with the next over their overlap.

    Args:
        windows: One record sequence per window (the output of each query)
        scheme: The window scheme the queries followed

    Returns:
        Summary over n_windows - 1 comparisons

    Raises:
        WindowSchemeError: If windows do not overlap or there are fewer than 2
    """
    summary = summarize(between_time_scores(windows, scheme))
    logger.info(
        f"Between-time overlap over {summary.n_comparisons} window pairs: "
        f"median {summary.median:.3f}, mean {summary.mean:.3f}"
    )
    return summary
