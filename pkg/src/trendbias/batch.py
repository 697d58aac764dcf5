"""
Parallel execution of per-file and per-hashtag work.

Jobs run on a thread pool; results are always returned in input order, so
output does not depend on the number of workers or on completion order.
"""

import concurrent.futures
import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

from trendbias.ingest import HashtagIndex, Source, TweetRecord, parse_stream
from trendbias.stats import BandParams, BiasReport, detect_bias
from trendbias.timeseries import BinGeometry, bin_counts

logger = logging.getLogger(__name__)

DEFAULT_WORKERS = 4

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class BiasJobResult:
    """Outcome of the bias test for one hashtag."""

    hashtag: str
    report: Optional[BiasReport]
    error: Optional[str]
    elapsed: float

    @property
    def success(self) -> bool:
        return self.error is None


def run_ordered(
    func: Callable[[T], R], items: Sequence[T], max_workers: int = DEFAULT_WORKERS
) -> List[R]:
    """
    Apply ``func`` to every item on a thread pool.

    Returns:
        Results in the order of ``items``; the first exception is re-raised
    """
    if max_workers < 1:
        raise ValueError(f"max_workers must be at least 1, got {max_workers}")
    results: List[Optional[R]] = [None] * len(items)
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_position = {
            executor.submit(func, item): position for position, item in enumerate(items)
        }
        for future in concurrent.futures.as_completed(future_to_position):
            results[future_to_position[future]] = future.result()
    return results  # type: ignore[return-value]


def parse_streams(
    jobs: Sequence[Tuple[str, Source]], max_workers: int = DEFAULT_WORKERS
) -> List[Tuple[TweetRecord, ...]]:
    """Parse several (path, source) stream files in parallel, in input order."""
    return run_ordered(lambda job: parse_stream(*job), jobs, max_workers)


def _bias_job(
    hashtag: str,
    streaming_index: HashtagIndex,
    sample_index: HashtagIndex,
    geometry: BinGeometry,
    params: BandParams,
) -> BiasJobResult:
    start = time.time()
    try:
        report = detect_bias(
            bin_counts(streaming_index, hashtag, geometry),
            bin_counts(sample_index, hashtag, geometry),
            params,
        )
    except ValueError as e:
        return BiasJobResult(hashtag, None, str(e), time.time() - start)
    return BiasJobResult(hashtag, report, None, time.time() - start)


def detect_bias_many(
    streaming_index: HashtagIndex,
    sample_index: HashtagIndex,
    hashtags: Sequence[str],
    geometry: BinGeometry,
    params: BandParams = BandParams(),
    max_workers: int = DEFAULT_WORKERS,
) -> List[BiasJobResult]:
    """
    Run the bias test for many hashtags in parallel.

    Every hashtag uses the same bootstrap seed, so a hashtag's result is the
    same whether it runs alone or in a batch.

    Args:
        streaming_index: Index of the filtered stream
        sample_index: Index of the uniform reference sample
        hashtags: Hashtags to test
        geometry: Shared bin geometry
        params: Bootstrap settings
        max_workers: Thread pool size

    Returns:
        One result per hashtag, in input order; failures carry the error text
    """
    start_time = time.time()
    results = run_ordered(
        lambda tag: _bias_job(tag, streaming_index, sample_index, geometry, params),
        hashtags,
        max_workers,
    )

    failed = [r for r in results if not r.success]
    for result in failed:
        logger.warning(f"Bias test failed for '{result.hashtag}': {result.error}")
    logger.info(
        f"Tested {len(results)} hashtags with {max_workers} workers in "
        f"{time.time() - start_time:.2f} seconds ({len(failed)} failed)"
    )
    return results
