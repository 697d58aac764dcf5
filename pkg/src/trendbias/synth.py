"""
Synthetic ground truth: a generated full stream and samplers over it.

The generator stands in for the complete stream. Hashtag popularity follows a
Zipf law; each hashtag's count in each bin is Poisson with mean
``base_rate * zipf_weight(h) * spike(h, i) * diurnal(i)``, and timestamps are
uniform inside the bin. Samplers then thin that stream:

* ``uniform`` keeps each record with probability p (the unbiased reference);
* ``bias_schedule`` keeps a record with probability p * g, where g is a
  per-hashtag, per-bin inclusion multiplier (the injected bias);
* ``rate_cap_head`` keeps the first ``cap`` records of every bin.

Every sampler reports the bins it biased, which is the oracle the bias test
is scored against.
"""

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from trendbias.ingest import Source, TweetRecord, normalize_hashtag
from trendbias.overlap import WindowScheme, cut_windows
from trendbias.timeseries import DEFAULT_BIN_WIDTH, BinGeometry

logger = logging.getLogger(__name__)

DEFAULT_BIAS_DELTA = 0.25
SECONDS_PER_DAY = 86400

SCENARIO_KEYS = frozenset(
    {
        "n_hashtags",
        "zipf_exponent",
        "base_rate",
        "n_bins",
        "bin_width",
        "spikes",
        "samplers",
        "seed",
        "start_ts",
        "bias_delta",
        "diurnal_amplitude",
        "untagged_rate",
        "windows",
    }
)

BiasedBins = Dict[str, FrozenSet[int]]


class ScenarioError(ValueError):
    """Invalid scenario or sampler configuration."""

    def __init__(self, field_name: str, message: str) -> None:
        self.field = field_name
        self.message = message
        super().__init__(f"scenario field '{field_name}': {message}")


class SamplerKind(str, Enum):
    UNIFORM = "uniform"
    BIAS_SCHEDULE = "bias_schedule"
    RATE_CAP_HEAD = "rate_cap_head"


@dataclass(frozen=True)
class Spike:
    """Rate multiplier for one hashtag over bins start_bin..end_bin (inclusive)."""

    hashtag: str
    start_bin: int
    end_bin: int
    multiplier: float


@dataclass(frozen=True)
class ScheduleEntry:
    """Inclusion multiplier g for one hashtag over bins start_bin..end_bin."""

    hashtag: str
    start_bin: int
    end_bin: int
    g: float


@dataclass(frozen=True)
class SamplerConfig:
    kind: SamplerKind
    p: float = 1.0
    schedule: Tuple[ScheduleEntry, ...] = ()
    cap: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind is not SamplerKind.RATE_CAP_HEAD and not 0 < self.p <= 1:
            raise ScenarioError("p", f"must be in (0, 1], got {self.p}")
        if self.cap < 0:
            raise ScenarioError("cap", f"must be >= 0, got {self.cap}")
        for j, entry in enumerate(self.schedule):
            if entry.g < 0:
                raise ScenarioError(f"schedule[{j}].g", "must be >= 0")
            if self.p * entry.g > 1 + 1e-12:
                raise ScenarioError(
                    f"schedule[{j}].g",
                    f"p * g = {self.p * entry.g} exceeds 1",
                )
            if entry.start_bin < 0 or entry.end_bin < entry.start_bin:
                raise ScenarioError(
                    f"schedule[{j}]",
                    f"invalid bin interval {entry.start_bin}..{entry.end_bin}",
                )

    def inclusion_multipliers(self) -> Dict[Tuple[str, int], float]:
        """(hashtag, bin) -> g; overlapping entries keep the largest g."""
        lookup: Dict[Tuple[str, int], float] = {}
        for entry in self.schedule:
            for b in range(entry.start_bin, entry.end_bin + 1):
                key = (entry.hashtag, b)
                lookup[key] = max(lookup.get(key, entry.g), entry.g)
        return lookup


@dataclass(frozen=True)
class Scenario:
    n_hashtags: int
    zipf_exponent: float
    base_rate: float
    n_bins: int
    bin_width: int = DEFAULT_BIN_WIDTH
    spikes: Tuple[Spike, ...] = ()
    samplers: Tuple[SamplerConfig, ...] = ()
    seed: int = 0
    start_ts: int = 0
    bias_delta: float = DEFAULT_BIAS_DELTA
    diurnal_amplitude: float = 0.0
    untagged_rate: float = 0.0
    window_period: Optional[int] = None
    window_duration: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n_hashtags < 1:
            raise ScenarioError("n_hashtags", f"must be >= 1, got {self.n_hashtags}")
        if not self.zipf_exponent > 0:
            raise ScenarioError(
                "zipf_exponent", f"must be > 0, got {self.zipf_exponent}"
            )
        if self.base_rate < 0:
            raise ScenarioError("base_rate", f"must be >= 0, got {self.base_rate}")
        if self.n_bins < 1:
            raise ScenarioError("n_bins", f"must be >= 1, got {self.n_bins}")
        if self.bin_width < 1:
            raise ScenarioError("bin_width", f"must be >= 1, got {self.bin_width}")
        if not 0 <= self.diurnal_amplitude < 1:
            raise ScenarioError(
                "diurnal_amplitude", f"must be in [0, 1), got {self.diurnal_amplitude}"
            )
        if self.untagged_rate < 0:
            raise ScenarioError("untagged_rate", "must be >= 0")
        if self.bias_delta <= 0:
            raise ScenarioError("bias_delta", "must be > 0")

        names = set(self.hashtag_names())
        for j, spike in enumerate(self.spikes):
            where = f"spikes[{j}]"
            if spike.hashtag not in names:
                raise ScenarioError(where, f"unknown hashtag '{spike.hashtag}'")
            if not 0 <= spike.start_bin <= spike.end_bin < self.n_bins:
                raise ScenarioError(
                    where,
                    f"bins {spike.start_bin}..{spike.end_bin} "
                    f"outside [0, {self.n_bins})",
                )
            if not spike.multiplier > 0:
                raise ScenarioError(f"{where}.multiplier", "must be > 0")

        for i, sampler in enumerate(self.samplers):
            for j, entry in enumerate(sampler.schedule):
                where = f"samplers[{i}].schedule[{j}]"
                if entry.hashtag not in names:
                    raise ScenarioError(where, f"unknown hashtag '{entry.hashtag}'")
                if entry.end_bin >= self.n_bins:
                    raise ScenarioError(
                        where,
                        f"end_bin {entry.end_bin} outside [0, {self.n_bins})",
                    )

        if (self.window_period is None) != (self.window_duration is None):
            raise ScenarioError("windows", "needs both period and duration")

    @property
    def geometry(self) -> BinGeometry:
        return BinGeometry(self.start_ts, self.bin_width, self.n_bins)

    def hashtag_names(self) -> List[str]:
        """tag001, tag002, ... in popularity order (name order = rank order)."""
        width = max(3, len(str(self.n_hashtags)))
        return [f"tag{rank:0{width}d}" for rank in range(1, self.n_hashtags + 1)]

    def sampler_names(self) -> List[str]:
        return [s.name or f"{s.kind.value}_{i}" for i, s in enumerate(self.samplers)]

    def zipf_weights(self) -> np.ndarray:
        weights = np.arange(1, self.n_hashtags + 1, dtype=np.float64) ** (
            -self.zipf_exponent
        )
        return weights / weights.sum()

    def diurnal_profile(self) -> np.ndarray:
        """Rate modulation per bin, from the time of day at the bin midpoint."""
        mid = self.start_ts + (np.arange(self.n_bins) + 0.5) * self.bin_width
        phase = 2 * math.pi * (mid % SECONDS_PER_DAY) / SECONDS_PER_DAY
        return 1.0 + self.diurnal_amplitude * np.sin(phase)

    def rate_matrix(self) -> np.ndarray:
        """Expected occurrence count per (hashtag rank, bin)."""
        rates = np.outer(self.zipf_weights(), self.diurnal_profile()) * self.base_rate
        index = {name: h for h, name in enumerate(self.hashtag_names())}
        for spike in self.spikes:
            h = index[spike.hashtag]
            rates[h, spike.start_bin : spike.end_bin + 1] *= spike.multiplier
        return rates

    def window_scheme(self) -> Optional[WindowScheme]:
        if self.window_period is None or self.window_duration is None:
            return None
        return WindowScheme.fitting(
            self.start_ts,
            self.geometry.end - 1,
            period=self.window_period,
            duration=self.window_duration,
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Scenario":
        """Build a scenario from a decoded scenario file."""
        unknown = set(data) - SCENARIO_KEYS
        if unknown:
            raise ScenarioError(sorted(unknown)[0], "unknown key")
        for required in ("n_hashtags", "zipf_exponent", "base_rate", "n_bins"):
            if required not in data:
                raise ScenarioError(required, "missing")

        windows = data.get("windows")
        if windows is not None and (
            not isinstance(windows, dict) or set(windows) != {"period", "duration"}
        ):
            raise ScenarioError(
                "windows", "expected an object with period and duration"
            )

        return cls(
            n_hashtags=_int(data, "n_hashtags"),
            zipf_exponent=_float(data, "zipf_exponent"),
            base_rate=_float(data, "base_rate"),
            n_bins=_int(data, "n_bins"),
            bin_width=_int(data, "bin_width", DEFAULT_BIN_WIDTH),
            spikes=tuple(
                _spike(item, f"spikes[{j}]")
                for j, item in enumerate(data.get("spikes", []))
            ),
            samplers=tuple(
                _sampler(item, f"samplers[{i}]")
                for i, item in enumerate(data.get("samplers", []))
            ),
            seed=_int(data, "seed", 0),
            start_ts=_int(data, "start_ts", 0),
            bias_delta=_float(data, "bias_delta", DEFAULT_BIAS_DELTA),
            diurnal_amplitude=_float(data, "diurnal_amplitude", 0.0),
            untagged_rate=_float(data, "untagged_rate", 0.0),
            window_period=None if windows is None else _int(windows, "period"),
            window_duration=None if windows is None else _int(windows, "duration"),
        )

    @classmethod
    def load(cls, path: str) -> "Scenario":
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}: invalid scenario file: {e}")
        if not isinstance(data, dict):
            raise ValueError(f"{path}: scenario must be an object")
        return cls.from_dict(data)


def _int(data: Mapping[str, Any], key: str, default: Optional[int] = None) -> int:
    value = data.get(key, default)
    if value is None or isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(key, f"expected an integer, got {value!r}")
    return value


def _float(data: Mapping[str, Any], key: str, default: Optional[float] = None) -> float:
    value = data.get(key, default)
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(key, f"expected a number, got {value!r}")
    return float(value)


def _interval(item: Any, where: str, last: str) -> Tuple[str, int, int, float]:
    if isinstance(item, (list, tuple)) and len(item) == 4:
        item = dict(zip(("hashtag", "start_bin", "end_bin", last), item))
    keys = {"hashtag", "start_bin", "end_bin", last}
    if not isinstance(item, dict) or set(item) != keys:
        raise ScenarioError(where, f"expected hashtag, start_bin, end_bin, {last}")
    try:
        return (
            normalize_hashtag(str(item["hashtag"])),
            _int(item, "start_bin"),
            _int(item, "end_bin"),
            _float(item, last),
        )
    except ScenarioError as e:
        raise ScenarioError(f"{where}.{e.field}", e.message)


def _spike(item: Any, where: str) -> Spike:
    return Spike(*_interval(item, where, "multiplier"))


def _sampler(item: Any, where: str) -> SamplerConfig:
    if not isinstance(item, dict) or "kind" not in item:
        raise ScenarioError(where, "expected an object with a 'kind'")
    try:
        kind = SamplerKind(item["kind"])
    except ValueError:
        choices = ", ".join(k.value for k in SamplerKind)
        raise ScenarioError(f"{where}.kind", f"must be one of {choices}")

    unknown = set(item) - {"kind", "p", "schedule", "cap", "name"}
    if unknown:
        raise ScenarioError(f"{where}.{sorted(unknown)[0]}", "unknown key")

    schedule = tuple(
        ScheduleEntry(*_interval(entry, f"{where}.schedule[{j}]", "g"))
        for j, entry in enumerate(item.get("schedule", []))
    )
    if schedule and kind is not SamplerKind.BIAS_SCHEDULE:
        raise ScenarioError(f"{where}.schedule", f"not allowed for {kind.value}")
    try:
        return SamplerConfig(
            kind=kind,
            p=_float(item, "p", 1.0),
            schedule=schedule,
            cap=_int(item, "cap", 0),
            name=str(item.get("name", "")),
        )
    except ScenarioError as e:
        raise ScenarioError(f"{where}.{e.field}", e.message)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    firehose: Tuple[TweetRecord, ...]
    streams: Dict[str, Tuple[TweetRecord, ...]]
    biased_bins: Dict[str, BiasedBins]
    delta: float = DEFAULT_BIAS_DELTA
    window_scheme: Optional[WindowScheme] = None
    window_streams: Dict[str, List[Tuple[TweetRecord, ...]]] = field(
        default_factory=dict
    )


def derive_seed(seed: int, *path: int) -> int:
    """A 32-bit seed for the substream (seed, path...)."""
    return int(np.random.SeedSequence(seed, spawn_key=path).generate_state(1)[0])


def draw_counts(scenario: Scenario) -> np.ndarray:
    """
    Occurrence counts per (hashtag rank, bin), as generate_firehose draws them.
    """
    rng = np.random.default_rng(np.random.SeedSequence(scenario.seed, spawn_key=(0,)))
    return _draw_counts(scenario, rng)


def _draw_counts(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    return rng.poisson(scenario.rate_matrix())


def generate_firehose(scenario: Scenario) -> Tuple[TweetRecord, ...]:
    """
    Generate the full record stream of a scenario.

    Records carry one hashtag each (or none, at ``untagged_rate`` per bin).
    Ids are 0..N-1 in (ts, draw order); the output is sorted by id.
    """
    rng = np.random.default_rng(np.random.SeedSequence(scenario.seed, spawn_key=(0,)))
    counts = _draw_counts(scenario, rng)
    n_hashtags, n_bins = counts.shape
    untagged = (
        rng.poisson(scenario.untagged_rate, size=n_bins)
        if scenario.untagged_rate > 0
        else np.zeros(n_bins, dtype=np.int64)
    )

    # draw order: bin by bin, hashtags in rank order, untagged records last
    tag_ids = np.concatenate(
        [
            np.concatenate(
                [
                    np.repeat(np.arange(n_hashtags), counts[:, b]),
                    np.full(untagged[b], -1),
                ]
            )
            for b in range(n_bins)
        ]
    ).astype(np.int64)
    bins = np.repeat(np.arange(n_bins), counts.sum(axis=0) + untagged)
    ts = (
        scenario.start_ts
        + bins * scenario.bin_width
        + rng.integers(0, scenario.bin_width, size=bins.size)
    )
    order = np.argsort(ts, kind="stable")

    tag_sets = [frozenset((name,)) for name in scenario.hashtag_names()]
    no_tags: FrozenSet[str] = frozenset()
    records = tuple(
        TweetRecord(
            id=i,
            ts=t,
            tags=tag_sets[tag] if tag >= 0 else no_tags,
            source=Source.FIREHOSE,
        )
        for i, (t, tag) in enumerate(zip(ts[order].tolist(), tag_ids[order].tolist()))
    )
    logger.info(
        f"Generated {len(records)} records over {n_bins} bins "
        f"for {n_hashtags} hashtags"
    )
    return records


def _record_bins(records: Sequence[TweetRecord], geometry: BinGeometry) -> np.ndarray:
    ts = np.fromiter((r.ts for r in records), dtype=np.int64, count=len(records))
    return np.floor_divide(ts - geometry.bin_start, geometry.bin_width)


def _rate_cap_biased_bins(
    records: Sequence[TweetRecord], bins: np.ndarray, keep: np.ndarray, delta: float
) -> BiasedBins:
    seen: Dict[Tuple[str, int], int] = defaultdict(int)
    kept: Dict[Tuple[str, int], int] = defaultdict(int)
    for record, b, k in zip(records, bins.tolist(), keep.tolist()):
        for tag in record.tags:
            seen[(tag, b)] += 1
            if k:
                kept[(tag, b)] += 1

    seen_total: Dict[str, int] = defaultdict(int)
    kept_total: Dict[str, int] = defaultdict(int)
    for (tag, _), n in seen.items():
        seen_total[tag] += n
    for (tag, _), n in kept.items():
        kept_total[tag] += n

    biased: Dict[str, Set[int]] = defaultdict(set)
    for (tag, b), n in seen.items():
        overall = kept_total[tag] / seen_total[tag]
        if overall == 0:
            biased[tag].add(b)
        elif abs((kept[(tag, b)] / n) / overall - 1) >= delta:
            biased[tag].add(b)
    return {tag: frozenset(bs) for tag, bs in sorted(biased.items())}


def apply_sampler(
    firehose: Sequence[TweetRecord],
    config: SamplerConfig,
    seed: int,
    geometry: BinGeometry,
    delta: float = DEFAULT_BIAS_DELTA,
) -> Tuple[Tuple[TweetRecord, ...], BiasedBins]:
    """
    Thin a record stream with one sampler.

    Args:
        firehose: Records to sample from; output preserves their order
        config: Sampler configuration
        seed: Seed of the sampler's random stream
        geometry: Bin start and width used by schedules and caps
        delta: Ground-truth threshold on |g - 1|

    Returns:
        (kept records, hashtag -> ground-truth biased bins)
    """
    records = tuple(firehose)
    n = len(records)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    bins = _record_bins(records, geometry)
    truth: BiasedBins = {}

    if config.kind is SamplerKind.UNIFORM:
        keep = rng.random(n) < config.p

    elif config.kind is SamplerKind.BIAS_SCHEDULE:
        lookup = config.inclusion_multipliers()
        g = np.ones(n)
        for i, (record, b) in enumerate(zip(records, bins.tolist())):
            applicable = [lookup[(t, b)] for t in record.tags if (t, b) in lookup]
            if applicable:
                g[i] = max(applicable)
        keep = rng.random(n) < config.p * g

        biased: Dict[str, Set[int]] = defaultdict(set)
        for (tag, b), mult in lookup.items():
            if abs(mult - 1) >= delta:
                biased[tag].add(b)
        truth = {tag: frozenset(bs) for tag, bs in sorted(biased.items())}

    else:
        keep = np.zeros(n, dtype=bool)
        used: Dict[int, int] = defaultdict(int)
        order = sorted(range(n), key=lambda i: (records[i].ts, records[i].id))
        for i in order:
            b = int(bins[i])
            if used[b] < config.cap:
                used[b] += 1
                keep[i] = True
        truth = _rate_cap_biased_bins(records, bins, keep, delta)

    kept = tuple(record for record, k in zip(records, keep.tolist()) if k)
    logger.debug(
        f"Sampler {config.name or config.kind.value}: kept {len(kept)} of {n} records"
    )
    return kept, truth


def sample_windows(
    firehose: Sequence[TweetRecord],
    config: SamplerConfig,
    scheme: WindowScheme,
    seed: int,
    geometry: BinGeometry,
) -> List[Tuple[TweetRecord, ...]]:
    """Run one independent query per window: window w is sampled with (seed, w)."""
    return [
        apply_sampler(window, config, derive_seed(seed, w), geometry)[0]
        for w, window in enumerate(cut_windows(firehose, scheme))
    ]


def run_scenario(scenario: Scenario, seed: Optional[int] = None) -> GroundTruth:
    """
    Generate the full stream and run every sampler of a scenario.

    Args:
        scenario: Scenario description
        seed: Overrides ``scenario.seed`` when given

    Returns:
        GroundTruth with every sampler's stream and biased bins
    """
    if seed is not None and seed != scenario.seed:
        scenario = replace(scenario, seed=seed)

    firehose = generate_firehose(scenario)
    scheme = scenario.window_scheme()
    streams: Dict[str, Tuple[TweetRecord, ...]] = {}
    biased: Dict[str, BiasedBins] = {}
    windows: Dict[str, List[Tuple[TweetRecord, ...]]] = {}

    for i, (name, config) in enumerate(
        zip(scenario.sampler_names(), scenario.samplers)
    ):
        sampler_seed = derive_seed(scenario.seed, 1, i)
        streams[name], biased[name] = apply_sampler(
            firehose, config, sampler_seed, scenario.geometry, scenario.bias_delta
        )
        if scheme is not None:
            window_seed = derive_seed(scenario.seed, 2, i)
            windows[name] = sample_windows(
                firehose, config, scheme, window_seed, scenario.geometry
            )
        logger.info(f"Sampler '{name}' kept {len(streams[name])} records")

    return GroundTruth(
        firehose=firehose,
        streams=streams,
        biased_bins=biased,
        delta=scenario.bias_delta,
        window_scheme=scheme,
        window_streams=windows,
    )
