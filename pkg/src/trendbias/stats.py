"""
Rank-correlation tests, bootstrap bands and per-bin bias classification.

The bias test works on standard-scored series. The reference (uniform sample)
stream of a hashtag is bootstrapped: its occurrences are resampled with
replacement at their original size, re-binned and re-normalized, many times.
Each bin then has a distribution of reference scores with mean mu_b and sample
standard deviation sigma_b. A bin of the filtered stream whose score lies
outside ``mu_b +/- m * sigma_b`` (m = 3 by default, the control-chart limit) is
flagged as over- or under-represented.

All randomness comes from ``numpy.random.SeedSequence(seed, spawn_key=(r,))``
for replicate or draw r, so results do not depend on evaluation order.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from trendbias.ingest import HashtagIndex, Occurrence, TweetRecord, top_k_hashtags
from trendbias.timeseries import (
    BinGeometry,
    NormalizedSeries,
    TimeSeries,
    check_same_geometry,
    known_zero_bins,
    standard_score,
    zscore_values,
)

logger = logging.getLogger(__name__)

DEFAULT_REPLICATES = 100
DEFAULT_SIGMA_MULTIPLIER = 3.0
# lower bound on a bin's band deviation before the +/- m rule is applied
SIGMA_FLOOR = 1e-6

RankedList = Sequence[Tuple[str, int]]


class RankCorrelationError(ValueError):
    """Kendall's tau is undefined for the given rankings."""


class BootstrapError(ValueError):
    """Invalid input to the bootstrap."""


class Verdict(str, Enum):
    """Per-bin outcome of the bias test."""

    UNBIASED = "UNBIASED"
    OVER = "OVER"
    UNDER = "UNDER"
    NODATA = "NODATA"


@dataclass(frozen=True)
class RankCorrelationResult:
    k: int
    tau_b: float
    p_value: float
    n_concordant: int
    n_discordant: int
    n_items: int


@dataclass(frozen=True)
class BaselinePoint:
    """Mean and spread of tau-b over random samples, at one list length k."""

    k: int
    mean_tau_b: float
    std_tau_b: float
    n_draws: int


@dataclass(frozen=True, eq=False)
class BootstrapBand:
    n_replicates: int
    mu_b: np.ndarray
    sigma_b: np.ndarray
    sigma_multiplier: float = DEFAULT_SIGMA_MULTIPLIER

    def limits(self, sigma_floor: float = SIGMA_FLOOR) -> Tuple[np.ndarray, np.ndarray]:
        """(lower, upper) control limits per bin."""
        width = self.sigma_multiplier * np.maximum(self.sigma_b, sigma_floor)
        return self.mu_b - width, self.mu_b + width


@dataclass(frozen=True)
class BandParams:
    """Bootstrap settings for :func:`detect_bias`."""

    n_replicates: int = DEFAULT_REPLICATES
    sigma_multiplier: float = DEFAULT_SIGMA_MULTIPLIER
    seed: int = 0
    sigma_floor: float = SIGMA_FLOOR

    def __post_init__(self) -> None:
        if self.n_replicates < 2:
            raise BootstrapError(
                f"at least 2 replicates are needed, got {self.n_replicates}"
            )
        if self.sigma_multiplier <= 0:
            raise BootstrapError(
                f"sigma multiplier must be positive, got {self.sigma_multiplier}"
            )


@dataclass(frozen=True, eq=False)
class BiasReport:
    hashtag: str
    verdicts: Tuple[Verdict, ...]
    band: BootstrapBand
    streaming_z: NormalizedSeries
    known_zeros: FrozenSet[int] = frozenset()
    replicates: Tuple[NormalizedSeries, ...] = ()

    def verdict_counts(self) -> Dict[Verdict, int]:
        counts = {verdict: 0 for verdict in Verdict}
        for verdict in self.verdicts:
            counts[verdict] += 1
        return counts

    def flagged_bins(self) -> List[int]:
        return [
            i
            for i, verdict in enumerate(self.verdicts)
            if verdict in (Verdict.OVER, Verdict.UNDER)
        ]


@dataclass(frozen=True)
class BiasPeriod:
    """A run of consecutive bins sharing an OVER or UNDER verdict."""

    first_bin: int
    last_bin: int
    start_ts: int
    end_ts: int
    verdict: Verdict


# ---------------------------------------------------------------------------
# Kendall tau-b
# ---------------------------------------------------------------------------


def _tie_sums(values: np.ndarray) -> Tuple[int, int, int, int]:
    """Tie-group sums: sum t(t-1)/2, t(t-1), t(t-1)(t-2), t(t-1)(2t+5)."""
    _, sizes = np.unique(values, return_counts=True)
    pairs = two = three = five = 0
    for t in (int(s) for s in sizes):
        pairs += t * (t - 1) // 2
        two += t * (t - 1)
        three += t * (t - 1) * (t - 2)
        five += t * (t - 1) * (2 * t + 5)
    return pairs, two, three, five


def kendall_tau_b_scores(
    x: Sequence[float], y: Sequence[float], k: int = 0
) -> RankCorrelationResult:
    """
    Kendall tau-b between two paired score vectors (higher score = better rank).

    tau-b is computed from integer concordant, discordant and tie counts, which
    are reported in the result. The two-sided p-value uses the normal
    approximation with the tie-corrected variance of S = n_c - n_d, the same
    one as ``scipy.stats.kendalltau(..., method="asymptotic")``.

    Args:
        x: Scores of each item in the first ranking
        y: Scores of the same items in the second ranking
        k: List length to report in the result (defaults to the item count)

    Raises:
        RankCorrelationError: With fewer than 2 items or a constant ranking
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise RankCorrelationError("score vectors must be 1-D and of equal length")
    n = int(xa.size)
    if n < 2:
        raise RankCorrelationError(f"need at least 2 comparable items, got {n}")

    upper = np.triu_indices(n, 1)
    sx = np.sign(xa[:, None] - xa[None, :])[upper]
    sy = np.sign(ya[:, None] - ya[None, :])[upper]
    product = sx * sy
    n_concordant = int(np.count_nonzero(product > 0))
    n_discordant = int(np.count_nonzero(product < 0))

    n0 = n * (n - 1) // 2
    n1, x_two, x_three, x_five = _tie_sums(xa)
    n2, y_two, y_three, y_five = _tie_sums(ya)
    if n1 == n0 or n2 == n0:
        raise RankCorrelationError("tau-b is undefined for a constant ranking")

    s = n_concordant - n_discordant
    tau_b = s / math.sqrt((n0 - n1) * (n0 - n2))

    v0 = n * (n - 1) * (2 * n + 5)
    var_s = (v0 - x_five - y_five) / 18.0
    var_s += (x_two * y_two) / (2.0 * n * (n - 1))
    if n > 2:
        var_s += (x_three * y_three) / (9.0 * n * (n - 1) * (n - 2))

    if var_s <= 0:
        p_value = 1.0
    else:
        p_value = float(2.0 * norm.sf(abs(s) / math.sqrt(var_s)))
        p_value = min(max(p_value, 0.0), 1.0)

    return RankCorrelationResult(
        k=k or n,
        tau_b=tau_b,
        p_value=p_value,
        n_concordant=n_concordant,
        n_discordant=n_discordant,
        n_items=n,
    )


def align_ranked_lists(
    list_a: RankedList, list_b: RankedList
) -> Tuple[List[str], List[float], List[float]]:
    """
    Put two top-k lists on a common item universe.

    Items missing from a list are placed just past its last item, all tied.

    Returns:
        (items, scores in list_a, scores in list_b), items sorted
    """
    counts_a = dict(list_a)
    counts_b = dict(list_b)
    items = sorted(set(counts_a) | set(counts_b))
    missing_a = min(counts_a.values(), default=0) - 1
    missing_b = min(counts_b.values(), default=0) - 1
    scores_a = [float(counts_a.get(item, missing_a)) for item in items]
    scores_b = [float(counts_b.get(item, missing_b)) for item in items]
    return items, scores_a, scores_b


def kendall_tau_b(list_a: RankedList, list_b: RankedList) -> RankCorrelationResult:
    """
    Kendall tau-b between two ranked (hashtag, count) lists.

    Args:
        list_a: Ranked list, e.g. the top-k of the full population
        list_b: Ranked list, e.g. the top-k of a sample

    Returns:
        RankCorrelationResult with k = the longer list's length

    Raises:
        RankCorrelationError: If tau-b is undefined
    """
    _, scores_a, scores_b = align_ranked_lists(list_a, list_b)
    return kendall_tau_b_scores(
        scores_a, scores_b, k=max(len(list_a), len(list_b))
    )


def k_grid(k_max: int, k_step: int) -> List[int]:
    """List lengths k_step, 2*k_step, ... up to k_max."""
    if k_step < 1 or k_max < k_step:
        raise ValueError(f"invalid k grid: k_max={k_max}, k_step={k_step}")
    return list(range(k_step, k_max + 1, k_step))


def rank_correlation_grid(
    index_a: HashtagIndex, index_b: HashtagIndex, grid: Iterable[int]
) -> List[RankCorrelationResult]:
    """tau-b of the top-k lists of two streams, for each k in the grid."""
    results = []
    for k in grid:
        result = kendall_tau_b(top_k_hashtags(index_a, k), top_k_hashtags(index_b, k))
        results.append(
            RankCorrelationResult(
                k=k,
                tau_b=result.tau_b,
                p_value=result.p_value,
                n_concordant=result.n_concordant,
                n_discordant=result.n_discordant,
                n_items=result.n_items,
            )
        )
        logger.debug(f"k={k}: tau_b={result.tau_b:.6f} p={result.p_value:.3g}")
    return results


def _top_list(
    counts: np.ndarray, vocab: Sequence[str], k: int
) -> List[Tuple[str, int]]:
    # vocab is sorted, so index order is the lexicographic tie-break
    order = np.lexsort((np.arange(counts.size), -counts))
    present = order[counts[order] > 0][:k]
    return [(vocab[i], int(counts[i])) for i in present]


def random_sample_baseline(
    firehose: Sequence[TweetRecord],
    sample_size: int,
    n_draws: int,
    grid: Sequence[int],
    seed: int = 0,
) -> List[BaselinePoint]:
    """
    tau-b of perfectly random samples against the full population.

    Each draw takes ``sample_size`` records uniformly without replacement,
    ranks the sample's hashtags and compares its top-k with the population's
    top-k for every k in the grid.

    Args:
        firehose: The complete record population
        sample_size: Records per draw
        n_draws: Number of random samples
        grid: List lengths k
        seed: Root seed; draw d uses SeedSequence(seed, spawn_key=(d,))

    Returns:
        One BaselinePoint per k (population std across draws)

    Raises:
        ValueError: If sample_size exceeds the population or n_draws < 1
    """
    records = tuple(firehose)
    population = len(records)
    if sample_size > population:
        raise ValueError(
            f"sample size {sample_size} exceeds population of {population} records"
        )
    if sample_size < 1 or n_draws < 1:
        raise ValueError("sample_size and n_draws must be at least 1")

    vocab = sorted({tag for record in records for tag in record.tags})
    tag_id = {tag: i for i, tag in enumerate(vocab)}
    flat_record: List[int] = []
    flat_tag: List[int] = []
    for i, record in enumerate(records):
        for tag in record.tags:
            flat_record.append(i)
            flat_tag.append(tag_id[tag])
    rec_arr = np.asarray(flat_record, dtype=np.int64)
    tag_arr = np.asarray(flat_tag, dtype=np.int64)

    full_counts = np.bincount(tag_arr, minlength=len(vocab))
    full_lists = {k: _top_list(full_counts, vocab, k) for k in grid}

    taus: Dict[int, List[float]] = {k: [] for k in grid}
    for d in range(n_draws):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(d,)))
        chosen = np.zeros(population, dtype=bool)
        chosen[rng.choice(population, size=sample_size, replace=False)] = True
        counts = np.bincount(tag_arr[chosen[rec_arr]], minlength=len(vocab))
        for k in grid:
            try:
                result = kendall_tau_b(full_lists[k], _top_list(counts, vocab, k))
            except RankCorrelationError as e:
                logger.warning(f"Skipping draw {d} at k={k}: {e}")
                continue
            taus[k].append(result.tau_b)

    points = []
    for k in grid:
        values = np.asarray(taus[k])
        if values.size:
            points.append(
                BaselinePoint(k, float(values.mean()), float(values.std()), values.size)
            )
        else:
            points.append(BaselinePoint(k, float("nan"), float("nan"), 0))
    logger.info(f"Baseline: {n_draws} draws of {sample_size} over {len(grid)} k values")
    return points


# ---------------------------------------------------------------------------
# Bootstrap band and bias classification
# ---------------------------------------------------------------------------


def _bootstrap_bins(
    bins: np.ndarray, n_replicates: int, n_bins: int, seed: int
) -> List[NormalizedSeries]:
    """Resample bin assignments with replacement; -1 marks out-of-window items."""
    if bins.size == 0:
        raise BootstrapError("cannot bootstrap an empty occurrence list")
    if n_replicates < 1:
        raise BootstrapError(f"n_replicates must be at least 1, got {n_replicates}")

    n = bins.size
    replicates = []
    for r in range(n_replicates):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        picked = bins[rng.integers(0, n, size=n)]
        counts = np.bincount(picked[picked >= 0], minlength=n_bins)
        replicates.append(zscore_values(counts))
    return replicates


def bootstrap_replicates(
    occurrences: Sequence[Occurrence],
    n_replicates: int,
    geometry: BinGeometry,
    seed: int = 0,
) -> List[NormalizedSeries]:
    """
    Bootstrapped, normalized trendlines of one hashtag.

    Each replicate draws len(occurrences) occurrences with replacement, bins
    them and standard-scores the counts.

    Args:
        occurrences: (id, ts) pairs of the hashtag in the reference stream
        n_replicates: Number of replicates (at least 1)
        geometry: Bin geometry
        seed: Root seed; replicate r uses SeedSequence(seed, spawn_key=(r,))

    Raises:
        BootstrapError: If there are no occurrences
    """
    timestamps = np.fromiter(
        (ts for _, ts in occurrences), dtype=np.int64, count=len(occurrences)
    )
    return _bootstrap_bins(
        geometry.bin_indices(timestamps), n_replicates, geometry.n_bins, seed
    )


def build_band(
    replicates: Sequence[NormalizedSeries],
    sigma_multiplier: float = DEFAULT_SIGMA_MULTIPLIER,
) -> BootstrapBand:
    """
    Per-bin mean and sample standard deviation over replicates.

    Raises:
        BootstrapError: With fewer than 2 replicates or unequal lengths
    """
    if len(replicates) < 2:
        raise BootstrapError(f"need at least 2 replicates, got {len(replicates)}")
    if sigma_multiplier <= 0:
        raise BootstrapError(
            f"sigma multiplier must be positive, got {sigma_multiplier}"
        )
    lengths = {rep.z.size for rep in replicates}
    if len(lengths) != 1:
        raise BootstrapError(f"replicates differ in length: {sorted(lengths)}")

    matrix = np.vstack([rep.z for rep in replicates])
    return BootstrapBand(
        n_replicates=len(replicates),
        mu_b=matrix.mean(axis=0),
        sigma_b=matrix.std(axis=0, ddof=1),
        sigma_multiplier=sigma_multiplier,
    )


def _sample_bins(sample: TimeSeries) -> np.ndarray:
    counts = sample.counts
    if not np.array_equal(counts, np.round(counts)):
        raise BootstrapError(
            f"reference counts of '{sample.hashtag}' must be whole numbers"
        )
    return np.repeat(np.arange(sample.n_bins), counts.astype(np.int64))


def detect_bias(
    streaming: TimeSeries, sample: TimeSeries, params: BandParams = BandParams()
) -> BiasReport:
    """
    Classify each bin of a filtered-stream series against the reference band.

    A constant series on either side carries no trend, so all its bins are
    NODATA. A constant filtered-stream series still gets its band computed.

    Args:
        streaming: Series of the hashtag in the filtered stream
        sample: Series of the same hashtag in the uniform reference sample
        params: Bootstrap settings

    Returns:
        BiasReport; known-zero bins are NODATA as well

    Raises:
        GeometryError: If the two series are binned differently
    """
    check_same_geometry(streaming, sample)
    streaming_z = standard_score(streaming)
    zeros = known_zero_bins(streaming, sample)
    n_bins = sample.n_bins

    if standard_score(sample).degenerate:
        logger.info(f"'{sample.hashtag}': reference series is constant, no verdicts")
        empty = np.zeros(n_bins)
        band = BootstrapBand(0, empty, empty.copy(), params.sigma_multiplier)
        return BiasReport(
            hashtag=streaming.hashtag,
            verdicts=tuple(Verdict.NODATA for _ in range(n_bins)),
            band=band,
            streaming_z=streaming_z,
            known_zeros=zeros,
        )

    replicates = _bootstrap_bins(
        _sample_bins(sample), params.n_replicates, n_bins, params.seed
    )
    band = build_band(replicates, params.sigma_multiplier)
    lower, upper = band.limits(params.sigma_floor)

    if streaming_z.degenerate:
        logger.info(f"'{streaming.hashtag}': filtered series is constant, no verdicts")

    verdicts = []
    for i, z in enumerate(streaming_z.z):
        if streaming_z.degenerate or i in zeros:
            verdicts.append(Verdict.NODATA)
        elif z > upper[i]:
            verdicts.append(Verdict.OVER)
        elif z < lower[i]:
            verdicts.append(Verdict.UNDER)
        else:
            verdicts.append(Verdict.UNBIASED)

    report = BiasReport(
        hashtag=streaming.hashtag,
        verdicts=tuple(verdicts),
        band=band,
        streaming_z=streaming_z,
        known_zeros=zeros,
        replicates=tuple(replicates),
    )
    logger.debug(f"'{report.hashtag}': {len(report.flagged_bins())} bins flagged")
    return report


def biased_periods(report: BiasReport, geometry: BinGeometry) -> List[BiasPeriod]:
    """
    Merge consecutive OVER (or UNDER) bins into periods.

    Returns:
        Periods in time order; end_ts is exclusive
    """
    periods: List[BiasPeriod] = []
    run_start = None
    for i, verdict in enumerate(report.verdicts + (Verdict.NODATA,)):
        if run_start is not None and verdict != report.verdicts[run_start]:
            periods.append(
                BiasPeriod(
                    first_bin=run_start,
                    last_bin=i - 1,
                    start_ts=geometry.bin_start_ts(run_start),
                    end_ts=geometry.bin_start_ts(i),
                    verdict=report.verdicts[run_start],
                )
            )
            run_start = None
        if run_start is None and verdict in (Verdict.OVER, Verdict.UNDER):
            run_start = i
    return periods
