"""
Tests for Kendall tau-b, the random-sample baseline, the bootstrap band and
per-bin bias classification.
"""

import itertools
import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import kendalltau, norm

from trendbias.ingest import TweetRecord, build_index
from trendbias.stats import (
    BandParams,
    BiasReport,
    BootstrapBand,
    BootstrapError,
    RankCorrelationError,
    Verdict,
    biased_periods,
    bootstrap_replicates,
    build_band,
    detect_bias,
    k_grid,
    kendall_tau_b,
    kendall_tau_b_scores,
    random_sample_baseline,
    rank_correlation_grid,
)
from trendbias.synth import (
    SamplerConfig,
    SamplerKind,
    Scenario,
    ScheduleEntry,
    apply_sampler,
    generate_firehose,
    run_scenario,
)
from trendbias.timeseries import (
    BinGeometry,
    NormalizedSeries,
    TimeSeries,
    bin_counts,
)


# ---------------------------------------------------------------------------
# Kendall tau-b
# ---------------------------------------------------------------------------


def _brute_force(x, y):
    """Pairwise concordant/discordant enumeration."""
    n = len(x)
    nc = nd = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = (x[i] > x[j]) - (x[i] < x[j])
            dy = (y[i] > y[j]) - (y[i] < y[j])
            if dx == 0:
                tx += 1
            if dy == 0:
                ty += 1
            if dx * dy > 0:
                nc += 1
            elif dx * dy < 0:
                nd += 1
    n0 = n * (n - 1) // 2
    return nc, nd, n0, tx, ty


def _oracle_p_value(x, y, s):
    n = len(x)
    tx = Counter(x).values()
    ty = Counter(y).values()
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in ty)
    v1 = sum(t * (t - 1) for t in tx) * sum(u * (u - 1) for u in ty)
    v2 = sum(t * (t - 1) * (t - 2) for t in tx) * sum(
        u * (u - 1) * (u - 2) for u in ty
    )
    var = (v0 - vt - vu) / 18.0 + v1 / (2.0 * n * (n - 1))
    if n > 2:
        var += v2 / (9.0 * n * (n - 1) * (n - 2))
    if var <= 0:
        return 1.0
    return float(2.0 * norm.sf(abs(s) / math.sqrt(var)))


def _check_against_oracle(x, y):
    nc, nd, n0, tx, ty = _brute_force(x, y)
    if tx == n0 or ty == n0:
        with pytest.raises(RankCorrelationError):
            kendall_tau_b_scores(x, y)
        return
    result = kendall_tau_b_scores(x, y)
    expected = (nc - nd) / math.sqrt((n0 - tx) * (n0 - ty))
    assert result.n_concordant == nc
    assert result.n_discordant == nd
    assert result.tau_b == expected
    assert abs(result.p_value - _oracle_p_value(x, y, nc - nd)) <= 1e-12
    assert -1.0 <= result.tau_b <= 1.0
    assert 0.0 <= result.p_value <= 1.0


def test_tau_b_matches_brute_force_exhaustively_for_short_rankings():
    alphabet = (1, 2, 3, 4)
    for n in (2, 3):
        vectors = list(itertools.product(alphabet, repeat=n))
        for x in vectors:
            for y in vectors:
                _check_against_oracle(list(x), list(y))


def test_tau_b_matches_brute_force_on_random_rankings():
    rng = np.random.default_rng(7)
    for _ in range(3000):
        n = int(rng.integers(4, 8))
        x = [int(v) for v in rng.integers(1, 5, size=n)]
        y = [int(v) for v in rng.integers(1, 5, size=n)]
        _check_against_oracle(x, y)


def test_tau_b_agrees_with_scipy():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(5, 40))
        x = rng.integers(0, 6, size=n)
        y = rng.integers(0, 6, size=n)
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        expected = kendalltau(x, y)[0]
        assert kendall_tau_b_scores(x, y).tau_b == pytest.approx(expected, abs=1e-12)


def test_p_value_agrees_with_scipy_asymptotic():
    rng = np.random.default_rng(13)
    for _ in range(200):
        n = int(rng.integers(5, 40))
        x = rng.integers(0, 6, size=n)
        y = rng.integers(0, 6, size=n)
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        expected = kendalltau(x, y, variant="b", method="asymptotic")[1]
        result = kendall_tau_b_scores(x, y)
        assert result.p_value == pytest.approx(expected, rel=1e-6, abs=1e-12)


def _ranked(*names):
    """Ranked list with strictly decreasing counts."""
    return [(name, 100 - i) for i, name in enumerate(names)]


def test_identical_rankings_give_one():
    items = [f"h{i}" for i in range(10)]

    result = kendall_tau_b(_ranked(*items), _ranked(*items))

    assert result.tau_b == 1.0
    assert result.k == 10
    assert result.n_discordant == 0


def test_reversed_rankings_give_minus_one():
    items = [f"h{i}" for i in range(10)]

    result = kendall_tau_b(_ranked(*items), _ranked(*reversed(items)))

    assert result.tau_b == -1.0


def test_missing_items_tie_past_the_end():
    list_a = [("x", 5), ("y", 3)]
    list_b = [("y", 4), ("z", 2)]

    result = kendall_tau_b(list_a, list_b)

    # x,y discordant; x,z discordant; y,z concordant
    assert (result.n_concordant, result.n_discordant) == (1, 2)
    assert result.tau_b == pytest.approx(-1.0 / 3.0, abs=1e-15)
    assert result.n_items == 3


def test_tau_b_is_symmetric():
    rng = np.random.default_rng(5)
    names = [f"h{i}" for i in range(15)]
    for _ in range(50):
        a = sorted(
            ((n, int(c)) for n, c in zip(names, rng.integers(1, 6, 15))),
            key=lambda item: (-item[1], item[0]),
        )[:10]
        b = sorted(
            ((n, int(c)) for n, c in zip(names, rng.integers(1, 6, 15))),
            key=lambda item: (-item[1], item[0]),
        )[:10]
        try:
            forward = kendall_tau_b(a, b).tau_b
        except RankCorrelationError:
            continue
        assert kendall_tau_b(b, a).tau_b == forward


def test_tau_b_undefined_cases():
    with pytest.raises(RankCorrelationError):
        kendall_tau_b([("a", 1)], [("a", 1)])
    with pytest.raises(RankCorrelationError):
        kendall_tau_b_scores([1, 1, 1], [1, 2, 3])
    with pytest.raises(RankCorrelationError):
        kendall_tau_b_scores([1, 2], [1, 2, 3])


def test_k_grid():
    assert k_grid(50, 10) == [10, 20, 30, 40, 50]
    assert k_grid(45, 10) == [10, 20, 30, 40]
    with pytest.raises(ValueError):
        k_grid(5, 10)
    with pytest.raises(ValueError):
        k_grid(10, 0)


def _records_with_counts(counts, start_id=0):
    records = []
    next_id = start_id
    for tag, n in counts.items():
        for _ in range(n):
            records.append(TweetRecord(id=next_id, ts=next_id, tags=frozenset({tag})))
            next_id += 1
    return records


def test_rank_correlation_grid_reports_each_k():
    counts = {f"h{i:02d}": 60 - i for i in range(30)}
    index = build_index(_records_with_counts(counts))

    results = rank_correlation_grid(index, index, k_grid(30, 10))

    assert [r.k for r in results] == [10, 20, 30]
    assert all(r.tau_b == 1.0 for r in results)


# ---------------------------------------------------------------------------
# Random-sample baseline
# ---------------------------------------------------------------------------


def test_baseline_of_full_sample_is_exact():
    firehose = _records_with_counts({f"h{i}": 20 - i for i in range(12)})

    points = random_sample_baseline(
        firehose, len(firehose), n_draws=5, grid=[5, 10], seed=3
    )

    assert [(p.k, p.mean_tau_b, p.std_tau_b, p.n_draws) for p in points] == [
        (5, 1.0, 0.0, 5),
        (10, 1.0, 0.0, 5),
    ]


def test_baseline_single_draw_has_zero_spread():
    firehose = _records_with_counts({f"h{i}": 30 - 2 * i for i in range(10)})

    (point,) = random_sample_baseline(firehose, 60, n_draws=1, grid=[5])

    assert point.std_tau_b == 0.0
    assert point.n_draws == 1


def test_baseline_is_deterministic():
    firehose = _records_with_counts({f"h{i}": 40 - 3 * i for i in range(12)})

    first = random_sample_baseline(firehose, 50, n_draws=10, grid=[5, 10], seed=9)
    second = random_sample_baseline(firehose, 50, n_draws=10, grid=[5, 10], seed=9)

    assert first == second


def test_baseline_rejects_oversized_sample():
    firehose = _records_with_counts({"a": 3})

    with pytest.raises(ValueError):
        random_sample_baseline(firehose, 4, n_draws=1, grid=[1])


@pytest.mark.slow
def test_baseline_band_shape_on_zipf_firehose():
    scenario = Scenario(
        n_hashtags=1000, zipf_exponent=1.0, base_rate=5000.0, n_bins=24
    )
    firehose = generate_firehose(scenario)
    firehose_index = build_index(firehose)
    grid = list(range(10, 451, 40))
    sample_size = len(firehose) // 100

    points = random_sample_baseline(firehose, sample_size, n_draws=40, grid=grid)
    by_k = {p.k: p for p in points}
    assert by_k[10].mean_tau_b > by_k[450].mean_tau_b

    inside = total = 0
    config = SamplerConfig(SamplerKind.UNIFORM, p=0.01)
    for seed in range(5):
        sample, _ = apply_sampler(firehose, config, seed, scenario.geometry)
        observed = rank_correlation_grid(firehose_index, build_index(sample), grid)
        for result in observed:
            point = by_k[result.k]
            total += 1
            if abs(result.tau_b - point.mean_tau_b) <= 2 * point.std_tau_b:
                inside += 1
    assert inside / total >= 0.9


# ---------------------------------------------------------------------------
# Bootstrap band
# ---------------------------------------------------------------------------


def _z(values):
    z = np.asarray(values, dtype=float)
    return NormalizedSeries(z=z, mu=0.0, sigma=1.0, degenerate=False)


def test_bootstrap_singleton_is_degenerate():
    replicates = bootstrap_replicates([(1, 30)], 10, BinGeometry(0, 60, 1), seed=0)

    assert len(replicates) == 10
    assert all(rep.degenerate for rep in replicates)


def test_bootstrap_is_deterministic_for_a_seed():
    occurrences = [(i, (i * 37) % 600) for i in range(80)]
    geometry = BinGeometry(0, 60, 10)

    first = bootstrap_replicates(occurrences, 20, geometry, seed=4)
    second = bootstrap_replicates(occurrences, 20, geometry, seed=4)
    other = bootstrap_replicates(occurrences, 20, geometry, seed=5)

    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.z, b.z)
    assert any(not np.array_equal(a.z, c.z) for a, c in zip(first, other))


def test_bootstrap_requires_occurrences():
    with pytest.raises(BootstrapError):
        bootstrap_replicates([], 10, BinGeometry(0, 60, 2))


def test_band_of_two_replicates():
    band = build_band([_z([0.0, 1.0]), _z([0.0, -1.0])])

    np.testing.assert_array_equal(band.mu_b, [0.0, 0.0])
    np.testing.assert_allclose(band.sigma_b, [0.0, math.sqrt(2.0)], atol=1e-15)
    assert band.n_replicates == 2
    assert band.sigma_multiplier == 3.0


def test_band_of_identical_replicates_has_zero_spread():
    band = build_band([_z([1.0, -1.0, 0.0])] * 5)

    np.testing.assert_array_equal(band.sigma_b, [0.0, 0.0, 0.0])


def test_band_limits_apply_sigma_floor():
    band = BootstrapBand(2, np.array([0.0, 1.0]), np.array([0.0, 0.5]), 3.0)

    lower, upper = band.limits(sigma_floor=1e-6)

    np.testing.assert_allclose(lower, [-3e-6, -0.5])
    np.testing.assert_allclose(upper, [3e-6, 2.5])


def test_band_validation():
    with pytest.raises(BootstrapError):
        build_band([_z([0.0, 1.0])])
    with pytest.raises(BootstrapError):
        build_band([_z([0.0, 1.0]), _z([0.0, 1.0, 2.0])])
    with pytest.raises(BootstrapError):
        BandParams(n_replicates=1)


# ---------------------------------------------------------------------------
# Bias classification
# ---------------------------------------------------------------------------


def _series(counts, hashtag="h"):
    return TimeSeries(hashtag, 0, 3600, np.asarray(counts))


def test_identical_streams_are_unbiased():
    counts = [10, 20, 50, 100, 50, 20, 10, 5]

    report = detect_bias(_series(counts), _series(counts), BandParams(seed=0))

    assert report.verdicts == (Verdict.UNBIASED,) * len(counts)
    assert report.band.n_replicates == 100
    assert len(report.replicates) == 100


def test_zero_sample_gives_no_data():
    report = detect_bias(_series([3, 5, 2, 7]), _series([0, 0, 0, 0]))

    assert report.verdicts == (Verdict.NODATA,) * 4
    assert report.band.n_replicates == 0
    assert report.known_zeros == {0, 1, 2, 3}


def test_constant_sample_gives_no_data():
    report = detect_bias(_series([3, 5, 2]), _series([4, 4, 4]))

    assert report.verdicts == (Verdict.NODATA,) * 3


def test_constant_streaming_series_gives_no_data():
    report = detect_bias(_series([5, 5, 5, 5]), _series([2, 4, 6, 3]))

    assert report.streaming_z.degenerate
    assert report.verdicts == (Verdict.NODATA,) * 4
    assert report.band.n_replicates == 100
    assert report.known_zeros == frozenset()


def test_known_zero_bins_are_no_data():
    report = detect_bias(_series([50, 30, 80, 10]), _series([20, 0, 40, 5]))

    assert report.verdicts[1] is Verdict.NODATA
    assert report.known_zeros == {1}


def test_detect_bias_flags_clear_spikes():
    sample = [40, 42, 38, 41, 39, 40, 43, 37, 40, 41, 80, 82]
    streaming = [40, 42, 38, 41, 39, 400, 43, 37, 40, 41, 80, 5]

    report = detect_bias(_series(streaming), _series(sample))

    assert report.verdicts[5] is Verdict.OVER
    assert report.verdicts[11] is Verdict.UNDER
    assert set(report.flagged_bins()) >= {5, 11}
    counts = report.verdict_counts()
    assert sum(counts.values()) == len(sample)


def test_detect_bias_is_deterministic():
    rng = np.random.default_rng(2)
    streaming = rng.poisson(30, size=48)
    sample = rng.poisson(6, size=48)

    first = detect_bias(_series(streaming), _series(sample), BandParams(seed=12))
    second = detect_bias(_series(streaming), _series(sample), BandParams(seed=12))

    assert first.verdicts == second.verdicts
    np.testing.assert_array_equal(first.band.mu_b, second.band.mu_b)
    np.testing.assert_array_equal(first.band.sigma_b, second.band.sigma_b)


def test_verdicts_are_scale_invariant():
    rng = np.random.default_rng(21)
    params = BandParams(n_replicates=30)
    for _ in range(100):
        n_bins = int(rng.integers(6, 30))
        streaming = _series(rng.poisson(rng.uniform(1, 40), size=n_bins))
        sample = _series(rng.poisson(rng.uniform(1, 10), size=n_bins))
        base = detect_bias(streaming, sample, params).verdicts
        for c in (0.5, 2.0, 10.0):
            assert detect_bias(streaming.scaled(c), sample, params).verdicts == base


def test_detect_bias_rejects_mismatched_geometry():
    with pytest.raises(ValueError):
        detect_bias(_series([1, 2, 3]), _series([1, 2]))


def _report(verdicts):
    n = len(verdicts)
    band = BootstrapBand(2, np.zeros(n), np.ones(n))
    return BiasReport("h", tuple(verdicts), band, _z(np.zeros(n)))


def test_biased_periods_merge_runs():
    U, O, D, N = Verdict.UNBIASED, Verdict.OVER, Verdict.UNDER, Verdict.NODATA
    report = _report([U, O, O, U, U, D, D, N, O])
    geometry = BinGeometry(1000, 60, 9)

    periods = biased_periods(report, geometry)

    assert [(p.first_bin, p.last_bin, p.verdict) for p in periods] == [
        (1, 2, O),
        (5, 6, D),
        (8, 8, O),
    ]
    assert (periods[0].start_ts, periods[0].end_ts) == (1060, 1180)
    assert periods[-1].end_ts == geometry.end


def test_biased_periods_split_on_direction_change():
    O, D = Verdict.OVER, Verdict.UNDER

    periods = biased_periods(_report([O, D, D]), BinGeometry(0, 10, 3))

    assert [(p.first_bin, p.last_bin) for p in periods] == [(0, 0), (1, 2)]


# ---------------------------------------------------------------------------
# Acceptance on synthetic counts
# ---------------------------------------------------------------------------

# Counts are drawn per (hashtag, bin) instead of per record: a record-level
# Bernoulli(p) sampler of a Poisson stream has Binomial(F, p) bin counts.
STREAMING_P = 0.1
SAMPLE_P = 0.01
OVER_BINS = range(40, 45)  # evening trough of day two
UNDER_BINS = range(28, 33)  # morning peak of day two


def _acceptance_scenario(seed):
    return Scenario(
        n_hashtags=10,
        zipf_exponent=1.0,
        base_rate=88000.0,
        n_bins=168,
        diurnal_amplitude=0.6,
        seed=seed,
    )


def _draw_streams(scenario, inclusion):
    rng = np.random.default_rng(np.random.SeedSequence(scenario.seed, spawn_key=(9,)))
    firehose = rng.poisson(scenario.rate_matrix())
    sample = rng.binomial(firehose, SAMPLE_P)
    streaming = rng.binomial(firehose, STREAMING_P * inclusion)
    return streaming, sample


def _run_detection(scenario, streaming, sample):
    names = scenario.hashtag_names()
    reports = []
    for h, name in enumerate(names):
        reports.append(
            detect_bias(
                TimeSeries(name, 0, 3600, streaming[h]),
                TimeSeries(name, 0, 3600, sample[h]),
                BandParams(seed=scenario.seed),
            )
        )
    return reports


@pytest.mark.slow
def test_null_false_positive_rate():
    scenario = _acceptance_scenario(seed=0)
    streaming, sample = _draw_streams(scenario, np.ones((10, 168)))

    reports = _run_detection(scenario, streaming, sample)

    decided = flagged = 0
    for report in reports:
        counts = report.verdict_counts()
        decided += len(report.verdicts) - counts[Verdict.NODATA]
        flagged += counts[Verdict.OVER] + counts[Verdict.UNDER]
    assert decided > 0.9 * 10 * 168
    assert flagged / decided <= 0.02


@pytest.mark.slow
def test_injected_bias_is_recovered():
    inclusion = np.ones((10, 168))
    inclusion[0, list(OVER_BINS)] = 4.0
    inclusion[1, list(UNDER_BINS)] = 0.1
    truth = {(0, b): Verdict.OVER for b in OVER_BINS}
    truth.update({(1, b): Verdict.UNDER for b in UNDER_BINS})

    hits = false_flags = unbiased = 0
    for seed in range(10):
        scenario = _acceptance_scenario(seed)
        streaming, sample = _draw_streams(scenario, inclusion)
        reports = _run_detection(scenario, streaming, sample)
        for h, report in enumerate(reports):
            for b, verdict in enumerate(report.verdicts):
                expected = truth.get((h, b))
                if expected is not None:
                    hits += verdict is expected
                elif verdict is not Verdict.NODATA:
                    unbiased += 1
                    false_flags += verdict in (Verdict.OVER, Verdict.UNDER)

    assert hits / (10 * len(truth)) >= 0.8
    assert false_flags / unbiased <= 0.05


@pytest.mark.slow
def test_bias_schedule_sampler_is_caught_in_ground_truth_bins():
    # tag001 is doubled across an evening trough, tag002 cut to a fifth across
    # the next morning peak; the reference sample is a plain uniform sampler
    scenario = Scenario(
        n_hashtags=3,
        zipf_exponent=1.0,
        base_rate=4600.0,
        n_bins=96,
        diurnal_amplitude=0.6,
        seed=0,
        samplers=(
            SamplerConfig(SamplerKind.UNIFORM, p=0.1, name="sample"),
            SamplerConfig(
                SamplerKind.BIAS_SCHEDULE,
                p=0.5,
                schedule=(
                    ScheduleEntry("tag001", 40, 42, 2.0),
                    ScheduleEntry("tag002", 53, 55, 0.2),
                ),
                name="streaming",
            ),
        ),
    )

    truth = run_scenario(scenario)
    streaming = build_index(truth.streams["streaming"])
    sample = build_index(truth.streams["sample"])
    expected = truth.biased_bins["streaming"]
    assert expected == {
        "tag001": frozenset({40, 41, 42}),
        "tag002": frozenset({53, 54, 55}),
    }
    direction = {"tag001": Verdict.OVER, "tag002": Verdict.UNDER}

    decided = false_flags = 0
    for hashtag in scenario.hashtag_names():
        report = detect_bias(
            bin_counts(streaming, hashtag, scenario.geometry),
            bin_counts(sample, hashtag, scenario.geometry),
            BandParams(seed=scenario.seed),
        )
        biased = expected.get(hashtag, frozenset())
        for b in biased:
            assert report.verdicts[b] is direction[hashtag]
        for b, verdict in enumerate(report.verdicts):
            if b in biased or verdict is Verdict.NODATA:
                continue
            decided += 1
            false_flags += verdict in (Verdict.OVER, Verdict.UNDER)

    assert decided > 0.9 * (3 * 96 - 6)
    assert false_flags / decided <= 0.05
